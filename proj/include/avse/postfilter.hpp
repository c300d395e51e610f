// Ratio-mask postfilter: ideal ratio mask, network features, mask -> gain,
// gain application, and the spectrogram-weighted mask loss.
#pragma once

#include <span>
#include <vector>

#include "avse/stft.hpp"
#include "avse/tf_grid.hpp"

namespace avse {

inline constexpr double kLogFloor = 1e-10;

// C[l,k] = sum_m |S_m|^2 / (sum_m |S_m|^2 + sum_m |B_m|^2); 0/0 -> 0.
MaskSpectrogram ideal_ratio_mask(std::span<const ComplexSpectrogram> speech,
                                 std::span<const ComplexSpectrogram> noise);

// Same as above for one frame, given the per-cell summed powers.
void ideal_ratio_mask_frame(std::span<const double> speech_power,
                            std::span<const double> noise_power, std::span<double> out);

// Network input before normalization:
//   [ log(|Y|^2 + eps) , log(|Yhat|^2 + eps) ]   (2 * bins values)
void raw_feature_frame(std::span<const Complex> beam, std::span<const double> total_power,
                       double epsilon, std::span<double> out);

// frames x (2*bins) raw features for whole spectrograms.
TfGrid<double> raw_features(const ComplexSpectrogram& beam, const PowerSpectrogram& total_power,
                            double epsilon = kLogFloor);

// Throws InvalidInput for masks outside [0,1]. G = sqrt(C).
GainSpectrogram mask_to_gain(const MaskSpectrogram& mask);
void mask_to_gain_frame(std::span<const double> mask, std::span<double> gain);

// Z = G * Y elementwise. Throws InvalidInput on shape mismatch.
ComplexSpectrogram apply_gain(const ComplexSpectrogram& beam, const GainSpectrogram& gain);
void apply_gain_frame(std::span<const Complex> beam, std::span<const double> gain,
                      std::span<Complex> out);

// sum_{l,k} (C - Chat)^2 (|Y|^2)^2: the squared l2 norm of C.|Y|^2 - Chat.|Y|^2.
double weighted_mask_loss(const TfGrid<double>& target, const TfGrid<double>& estimate,
                          const PowerSpectrogram& beam_power);

PowerSpectrogram power(const ComplexSpectrogram& spec);

}  // namespace avse
