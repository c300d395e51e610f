#include "avse/beamformer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "avse/error.hpp"

namespace avse {

namespace {

void check_shapes(std::span<const ComplexSpectrogram> specs) {
  if (specs.empty()) throw InvalidInput("beamformer: no input channels");
  for (std::size_t m = 1; m < specs.size(); ++m) {
    if (!specs[m].same_shape(specs[0]) || !(specs[m].config() == specs[0].config())) {
      throw InvalidInput("beamformer: channel " + std::to_string(m) +
                         " spectrogram shape differs from channel 0");
    }
  }
}

std::vector<std::span<const Complex>> frame_views(std::span<const ComplexSpectrogram> specs,
                                                  std::size_t l) {
  std::vector<std::span<const Complex>> views;
  views.reserve(specs.size());
  for (const auto& s : specs) views.push_back(s.frame(l));
  return views;
}

}  // namespace

void delay_and_sum_frame(std::span<const std::span<const Complex>> channel_frames,
                         std::span<const double> tdoas, std::size_t frame_size,
                         std::span<Complex> out) {
  if (channel_frames.size() != tdoas.size()) {
    throw InvalidInput("beamformer: " + std::to_string(channel_frames.size()) +
                       " channels but " + std::to_string(tdoas.size()) + " TDoAs");
  }
  std::fill(out.begin(), out.end(), Complex(0.0, 0.0));
  const double step = 2.0 * std::numbers::pi / static_cast<double>(frame_size);
  for (std::size_t m = 0; m < channel_frames.size(); ++m) {
    const auto x = channel_frames[m];
    if (x.size() != out.size()) throw InvalidInput("beamformer: bin count mismatch");
    const double tau = tdoas[m];
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] += x[k] * std::polar(1.0, step * static_cast<double>(k) * tau);
    }
  }
}

void total_power_frame(std::span<const std::span<const Complex>> channel_frames,
                       std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto x : channel_frames) {
    if (x.size() != out.size()) throw InvalidInput("total power: bin count mismatch");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += std::norm(x[k]);
  }
}

void delay_frame(std::span<Complex> frame, double tau, std::size_t frame_size) {
  const double step = -2.0 * std::numbers::pi / static_cast<double>(frame_size);
  for (std::size_t k = 0; k < frame.size(); ++k) {
    frame[k] *= std::polar(1.0, step * static_cast<double>(k) * tau);
  }
}

ComplexSpectrogram delay_and_sum(std::span<const ComplexSpectrogram> specs,
                                 const TdoaTrajectory& trajectory) {
  check_shapes(specs);
  trajectory.validate();
  if (trajectory.num_mics != specs.size()) {
    throw InvalidInput("delay_and_sum: trajectory has " + std::to_string(trajectory.num_mics) +
                       " microphones, input has " + std::to_string(specs.size()));
  }
  const std::size_t frames = specs[0].frames();
  if (trajectory.num_frames() < frames) {
    throw InvalidInput("delay_and_sum: trajectory has " +
                       std::to_string(trajectory.num_frames()) + " frames, need " +
                       std::to_string(frames));
  }
  const auto& config = specs[0].config();
  ComplexSpectrogram y(config, frames);
  for (std::size_t l = 0; l < frames; ++l) {
    const auto views = frame_views(specs, l);
    delay_and_sum_frame(views, trajectory.at(l), config.frame_size, y.frame(l));
  }
  return y;
}

PowerSpectrogram total_power_reference(std::span<const ComplexSpectrogram> specs) {
  check_shapes(specs);
  PowerSpectrogram power(specs[0].frames(), specs[0].bins());
  for (std::size_t l = 0; l < power.frames(); ++l) {
    const auto views = frame_views(specs, l);
    total_power_frame(views, power.frame(l));
  }
  return power;
}

std::vector<ComplexSpectrogram> multichannel_stft(const MultichannelWave& wave,
                                                  const StftConfig& config) {
  wave.validate();
  std::vector<ComplexSpectrogram> specs;
  specs.reserve(wave.num_channels());
  for (const auto& ch : wave.channels) specs.push_back(stft(ch, config));
  return specs;
}

BeamformerStream::BeamformerStream(std::size_t num_channels, const StftConfig& config)
    : config_(config) {
  config_.validate();
  if (num_channels == 0) throw InvalidConfig("beamformer stream needs at least one channel");
  stfts_.reserve(num_channels);
  for (std::size_t m = 0; m < num_channels; ++m) stfts_.emplace_back(config_);
  frames_.assign(num_channels, std::vector<Complex>(config_.bins()));
  views_.resize(num_channels);
}

bool BeamformerStream::push(std::span<const std::span<const double>> hop,
                            std::span<const double> tdoas, BeamformerFrame& out) {
  if (hop.size() != stfts_.size()) {
    throw InvalidInput("beamformer stream: expected " + std::to_string(stfts_.size()) +
                       " channels, got " + std::to_string(hop.size()));
  }
  bool ready = false;
  for (std::size_t m = 0; m < stfts_.size(); ++m) {
    ready = stfts_[m].push(hop[m], frames_[m]);
  }
  if (!ready) return false;
  for (std::size_t m = 0; m < frames_.size(); ++m) views_[m] = frames_[m];
  out.beam.resize(config_.bins());
  out.power.resize(config_.bins());
  delay_and_sum_frame(views_, tdoas, config_.frame_size, out.beam);
  total_power_frame(views_, out.power);
  return true;
}

}  // namespace avse
