#include "avse/postfilter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "avse/error.hpp"

namespace avse {

namespace {

void check_same(std::span<const ComplexSpectrogram> a, std::span<const ComplexSpectrogram> b) {
  if (a.empty() || a.size() != b.size()) {
    throw InvalidInput("ideal ratio mask: speech has " + std::to_string(a.size()) +
                       " channels, noise has " + std::to_string(b.size()));
  }
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (!a[m].same_shape(a[0]) || !b[m].same_shape(a[0])) {
      throw InvalidInput("ideal ratio mask: spectrogram shapes differ (channel " +
                         std::to_string(m) + ")");
    }
  }
}

}  // namespace

void ideal_ratio_mask_frame(std::span<const double> speech_power,
                            std::span<const double> noise_power, std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double total = speech_power[k] + noise_power[k];
    out[k] = total > 0.0 ? speech_power[k] / total : 0.0;
  }
}

MaskSpectrogram ideal_ratio_mask(std::span<const ComplexSpectrogram> speech,
                                 std::span<const ComplexSpectrogram> noise) {
  check_same(speech, noise);
  const std::size_t frames = speech[0].frames();
  const std::size_t bins = speech[0].bins();
  MaskSpectrogram mask(frames, bins);
  std::vector<double> ps(bins), pb(bins);
  for (std::size_t l = 0; l < frames; ++l) {
    std::fill(ps.begin(), ps.end(), 0.0);
    std::fill(pb.begin(), pb.end(), 0.0);
    for (std::size_t m = 0; m < speech.size(); ++m) {
      const auto s = speech[m].frame(l);
      const auto b = noise[m].frame(l);
      for (std::size_t k = 0; k < bins; ++k) {
        ps[k] += std::norm(s[k]);
        pb[k] += std::norm(b[k]);
      }
    }
    ideal_ratio_mask_frame(ps, pb, mask.frame(l));
  }
  return mask;
}

void raw_feature_frame(std::span<const Complex> beam, std::span<const double> total_power,
                       double epsilon, std::span<double> out) {
  const std::size_t bins = beam.size();
  if (total_power.size() != bins || out.size() != 2 * bins) {
    throw InvalidInput("features: expected " + std::to_string(bins) + " power bins and " +
                       std::to_string(2 * bins) + " outputs");
  }
  for (std::size_t k = 0; k < bins; ++k) {
    out[k] = std::log(std::norm(beam[k]) + epsilon);
    out[bins + k] = std::log(total_power[k] + epsilon);
  }
}

TfGrid<double> raw_features(const ComplexSpectrogram& beam, const PowerSpectrogram& total_power,
                            double epsilon) {
  if (!beam.same_shape(total_power)) {
    throw InvalidInput("features: beamformed and total-power spectrograms differ in shape");
  }
  TfGrid<double> features(beam.frames(), 2 * beam.bins());
  for (std::size_t l = 0; l < beam.frames(); ++l) {
    raw_feature_frame(beam.frame(l), total_power.frame(l), epsilon, features.frame(l));
  }
  return features;
}

void mask_to_gain_frame(std::span<const double> mask, std::span<double> gain) {
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const double c = mask[k];
    if (!(c >= 0.0 && c <= 1.0)) {
      throw InvalidInput("mask value " + std::to_string(c) + " outside [0,1]");
    }
    gain[k] = std::sqrt(c);
  }
}

GainSpectrogram mask_to_gain(const MaskSpectrogram& mask) {
  GainSpectrogram gain(mask.frames(), mask.bins());
  mask_to_gain_frame(mask.values(), gain.values());
  return gain;
}

void apply_gain_frame(std::span<const Complex> beam, std::span<const double> gain,
                      std::span<Complex> out) {
  for (std::size_t k = 0; k < beam.size(); ++k) out[k] = beam[k] * gain[k];
}

ComplexSpectrogram apply_gain(const ComplexSpectrogram& beam, const GainSpectrogram& gain) {
  if (!beam.same_shape(gain)) {
    throw InvalidInput("apply_gain: gain is " + std::to_string(gain.frames()) + "x" +
                       std::to_string(gain.bins()) + ", spectrogram is " +
                       std::to_string(beam.frames()) + "x" + std::to_string(beam.bins()));
  }
  ComplexSpectrogram out(beam.config(), beam.frames());
  apply_gain_frame(beam.values(), gain.values(), out.values());
  return out;
}

double weighted_mask_loss(const TfGrid<double>& target, const TfGrid<double>& estimate,
                          const PowerSpectrogram& beam_power) {
  if (!target.same_shape(estimate) || !target.same_shape(beam_power)) {
    throw InvalidInput("weighted loss: shape mismatch");
  }
  double loss = 0.0;
  const auto c = target.values();
  const auto c_hat = estimate.values();
  const auto w = beam_power.values();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double d = c[i] * w[i] - c_hat[i] * w[i];
    loss += d * d;
  }
  return loss;
}

PowerSpectrogram power(const ComplexSpectrogram& spec) {
  PowerSpectrogram p(spec.frames(), spec.bins());
  const auto in = spec.values();
  auto out = p.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::norm(in[i]);
  return p;
}

}  // namespace avse
