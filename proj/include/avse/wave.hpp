// Time-domain multichannel audio and WAV file I/O.
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace avse {

struct MultichannelWave {
  double sample_rate = 16000.0;
  std::vector<std::vector<double>> channels;

  static MultichannelWave zeros(std::size_t num_channels, std::size_t num_samples,
                                double sample_rate);

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_samples() const { return channels.empty() ? 0 : channels.front().size(); }

  // Throws InvalidInput unless M >= 1 and all channels have equal length.
  void validate() const;

  friend bool operator==(const MultichannelWave&, const MultichannelWave&) = default;
};

enum class SampleFormat { kPcm16, kFloat32 };

// Reads 16-bit PCM or 32-bit IEEE float RIFF/WAVE files.
MultichannelWave read_wav(const std::filesystem::path& path);

// 16-bit output rounds to nearest and clips to [-1, 1); no dither.
void write_wav(const std::filesystem::path& path, const MultichannelWave& wave,
               SampleFormat format = SampleFormat::kFloat32);

void write_wav(const std::filesystem::path& path, std::span<const double> mono,
               double sample_rate, SampleFormat format = SampleFormat::kFloat32);

}  // namespace avse
