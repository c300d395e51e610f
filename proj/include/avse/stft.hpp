// Short-time Fourier analysis/synthesis with the power-complementary sine
// window at 50% overlap, in whole-signal and hop-by-hop streaming forms.
//
// Conventions:
//   - frame l covers samples [l*hop, l*hop + N); frames that would run past
//     the end of the signal are not produced, except that a signal shorter
//     than N yields one zero-padded frame;
//   - bins 0..N/2 (DC first, Nyquist last);
//   - forward FFT unscaled, inverse scaled by 1/N;
//   - the same sine window is used for analysis and synthesis, so overlap-add
//     reconstructs every sample covered by two frames exactly.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "avse/fft.hpp"
#include "avse/tf_grid.hpp"

namespace avse {

struct StftConfig {
  std::size_t frame_size = 512;
  std::size_t hop_size = 256;
  double sample_rate = 16000.0;

  std::size_t bins() const { return frame_size / 2 + 1; }
  double hop_seconds() const { return static_cast<double>(hop_size) / sample_rate; }

  // Throws InvalidConfig unless N is even, N >= 2, hop == N/2 and rate > 0.
  void validate() const;

  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

class ComplexSpectrogram : public TfGrid<Complex> {
 public:
  ComplexSpectrogram() = default;
  ComplexSpectrogram(const StftConfig& config, std::size_t frames)
      : TfGrid<Complex>(frames, config.bins()), config_(config) {}

  const StftConfig& config() const { return config_; }

  friend bool operator==(const ComplexSpectrogram&, const ComplexSpectrogram&) = default;

 private:
  StftConfig config_;
};

// w[n] = sin(pi (n + 0.5) / N). Throws InvalidConfig for odd or zero N.
std::vector<double> sine_window(std::size_t n);

// Number of frames stft() produces for a signal of `length` samples.
std::size_t num_frames(std::size_t length, const StftConfig& config);

// Throws InvalidInput for an empty signal.
ComplexSpectrogram stft(std::span<const double> signal, const StftConfig& config);

// Overlap-add synthesis. Output has (L-1)*hop + N samples, or exactly `length`
// samples (truncated or zero-extended) when given.
std::vector<double> istft(const ComplexSpectrogram& spec,
                          std::optional<std::size_t> length = std::nullopt);

// Samples of an L-frame signal reconstructed from two overlapping frames:
// [hop, L*hop). Empty for L < 2.
struct SampleRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};
SampleRange fully_overlapped_region(std::size_t frames, const StftConfig& config);

// Windowed forward transform of one N-sample frame. Shared by the batch and
// streaming paths so both produce bit-identical frames.
class FrameAnalyzer {
 public:
  explicit FrameAnalyzer(const StftConfig& config);
  void analyze(std::span<const double> samples, std::span<Complex> bins);

 private:
  std::vector<double> window_;
  std::vector<double> scratch_;
  RealFft fft_;
};

// Inverse transform followed by the synthesis window.
class FrameSynthesizer {
 public:
  explicit FrameSynthesizer(const StftConfig& config);
  void synthesize(std::span<const Complex> bins, std::span<double> samples);

 private:
  std::vector<double> window_;
  RealFft fft_;
};

// Sliding N-sample analysis buffer fed one hop at a time.
class StreamingStft {
 public:
  explicit StreamingStft(const StftConfig& config);

  // Appends exactly `hop` samples. Once N samples have been seen, writes the
  // newest frame (N/2+1 bins) into `frame` and returns true.
  bool push(std::span<const double> hop, std::span<Complex> frame);
  // Allocating convenience form.
  std::optional<std::vector<Complex>> push(std::span<const double> hop);

  const StftConfig& config() const { return config_; }
  std::size_t frames_emitted() const { return frames_emitted_; }

 private:
  StftConfig config_;
  FrameAnalyzer analyzer_;
  std::vector<double> buffer_;
  std::size_t filled_ = 0;
  std::size_t frames_emitted_ = 0;
};

// Overlap-add synthesis fed one frame at a time.
class StreamingIstft {
 public:
  explicit StreamingIstft(const StftConfig& config);

  // Consumes one frame and writes the `hop` samples that are final after it.
  void push(std::span<const Complex> frame, std::span<double> out);
  std::vector<double> push(std::span<const Complex> frame);

  // Remaining tail (hop samples) after the last frame; matches the end of the
  // batch istft output.
  std::vector<double> flush();

  const StftConfig& config() const { return config_; }

 private:
  StftConfig config_;
  FrameSynthesizer synthesizer_;
  std::vector<double> frame_;
  std::vector<double> tail_;
};

}  // namespace avse
