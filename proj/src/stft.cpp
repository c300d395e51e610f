#include "avse/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "avse/error.hpp"

namespace avse {

void StftConfig::validate() const {
  if (frame_size < 2 || frame_size % 2 != 0) {
    throw InvalidConfig("frame size must be even and >= 2, got " + std::to_string(frame_size));
  }
  if (hop_size * 2 != frame_size) {
    throw InvalidConfig("hop size must be half the frame size for the sine window (N=" +
                        std::to_string(frame_size) + ", hop=" + std::to_string(hop_size) + ")");
  }
  if (!(sample_rate > 0.0)) throw InvalidConfig("sample rate must be positive");
}

std::vector<double> sine_window(std::size_t n) {
  if (n < 2 || n % 2 != 0) {
    throw InvalidConfig("sine window length must be even and >= 2, got " + std::to_string(n));
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::sin(std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  return w;
}

std::size_t num_frames(std::size_t length, const StftConfig& config) {
  if (length == 0) return 0;
  if (length < config.frame_size) return 1;
  return (length - config.frame_size) / config.hop_size + 1;
}

SampleRange fully_overlapped_region(std::size_t frames, const StftConfig& config) {
  if (frames < 2) return {};
  return {config.hop_size, frames * config.hop_size};
}

FrameAnalyzer::FrameAnalyzer(const StftConfig& config)
    : window_(sine_window(config.frame_size)),
      scratch_(config.frame_size),
      fft_(config.frame_size) {}

void FrameAnalyzer::analyze(std::span<const double> samples, std::span<Complex> bins) {
  if (samples.size() != window_.size()) throw InvalidInput("analysis frame has wrong length");
  for (std::size_t i = 0; i < window_.size(); ++i) scratch_[i] = samples[i] * window_[i];
  fft_.forward(scratch_, bins);
}

FrameSynthesizer::FrameSynthesizer(const StftConfig& config)
    : window_(sine_window(config.frame_size)), fft_(config.frame_size) {}

void FrameSynthesizer::synthesize(std::span<const Complex> bins, std::span<double> samples) {
  if (bins.size() != fft_.bins()) {
    throw InvalidInput("synthesis frame has " + std::to_string(bins.size()) + " bins, expected " +
                       std::to_string(fft_.bins()));
  }
  fft_.inverse(bins, samples);
  for (std::size_t i = 0; i < window_.size(); ++i) samples[i] *= window_[i];
}

ComplexSpectrogram stft(std::span<const double> signal, const StftConfig& config) {
  config.validate();
  if (signal.empty()) throw InvalidInput("stft: empty signal");
  const std::size_t n = config.frame_size;
  const std::size_t frames = num_frames(signal.size(), config);
  ComplexSpectrogram spec(config, frames);
  FrameAnalyzer analyzer(config);
  if (signal.size() < n) {
    std::vector<double> padded(n, 0.0);
    std::copy(signal.begin(), signal.end(), padded.begin());
    analyzer.analyze(padded, spec.frame(0));
    return spec;
  }
  for (std::size_t l = 0; l < frames; ++l) {
    analyzer.analyze(signal.subspan(l * config.hop_size, n), spec.frame(l));
  }
  return spec;
}

std::vector<double> istft(const ComplexSpectrogram& spec, std::optional<std::size_t> length) {
  const auto& config = spec.config();
  config.validate();
  if (spec.bins() != config.bins()) {
    throw InvalidInput("istft: spectrogram has " + std::to_string(spec.bins()) +
                       " bins, expected " + std::to_string(config.bins()));
  }
  const std::size_t n = config.frame_size;
  const std::size_t hop = config.hop_size;
  const std::size_t natural = spec.frames() == 0 ? 0 : (spec.frames() - 1) * hop + n;
  std::vector<double> out(natural, 0.0);
  FrameSynthesizer synth(config);
  std::vector<double> frame(n);
  for (std::size_t l = 0; l < spec.frames(); ++l) {
    synth.synthesize(spec.frame(l), frame);
    double* dst = out.data() + l * hop;
    for (std::size_t i = 0; i < n; ++i) dst[i] += frame[i];
  }
  if (length) out.resize(*length, 0.0);
  return out;
}

StreamingStft::StreamingStft(const StftConfig& config)
    : config_((config.validate(), config)), analyzer_(config), buffer_(config.frame_size, 0.0) {}

bool StreamingStft::push(std::span<const double> hop, std::span<Complex> frame) {
  const std::size_t h = config_.hop_size;
  if (hop.size() != h) {
    throw InvalidInput("streaming stft: expected " + std::to_string(h) + " samples, got " +
                       std::to_string(hop.size()));
  }
  if (frame.size() != config_.bins()) throw InvalidInput("streaming stft: wrong output size");
  // buffer_ holds the latest N samples; shift out one hop, append the new one.
  std::copy(buffer_.begin() + static_cast<std::ptrdiff_t>(h), buffer_.end(), buffer_.begin());
  std::copy(hop.begin(), hop.end(), buffer_.end() - static_cast<std::ptrdiff_t>(h));
  filled_ = std::min(filled_ + h, config_.frame_size);
  if (filled_ < config_.frame_size) return false;
  analyzer_.analyze(buffer_, frame);
  ++frames_emitted_;
  return true;
}

std::optional<std::vector<Complex>> StreamingStft::push(std::span<const double> hop) {
  std::vector<Complex> frame(config_.bins());
  if (!push(hop, frame)) return std::nullopt;
  return frame;
}

StreamingIstft::StreamingIstft(const StftConfig& config)
    : config_((config.validate(), config)),
      synthesizer_(config),
      frame_(config.frame_size),
      tail_(config.hop_size, 0.0) {}

void StreamingIstft::push(std::span<const Complex> frame, std::span<double> out) {
  const std::size_t h = config_.hop_size;
  if (frame.size() != config_.bins()) {
    throw InvalidInput("streaming istft: frame has " + std::to_string(frame.size()) +
                       " bins, expected " + std::to_string(config_.bins()));
  }
  if (out.size() != h) throw InvalidInput("streaming istft: wrong output size");
  synthesizer_.synthesize(frame, frame_);
  for (std::size_t i = 0; i < h; ++i) out[i] = tail_[i] + frame_[i];
  // Match the batch accumulation order (0 + x) for the carried half.
  for (std::size_t i = 0; i < h; ++i) tail_[i] = 0.0 + frame_[h + i];
}

std::vector<double> StreamingIstft::push(std::span<const Complex> frame) {
  std::vector<double> out(config_.hop_size);
  push(frame, out);
  return out;
}

std::vector<double> StreamingIstft::flush() {
  std::vector<double> out = tail_;
  std::fill(tail_.begin(), tail_.end(), 0.0);
  return out;
}

}  // namespace avse
