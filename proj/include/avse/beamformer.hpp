// Frequency-domain delay-and-sum beamforming with per-frame TDoAs, and the
// phase-blind total power reference.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "avse/geometry.hpp"
#include "avse/stft.hpp"
#include "avse/tf_grid.hpp"
#include "avse/wave.hpp"

namespace avse {

// Y[l,k] = sum_m X_m[l,k] exp(j 2 pi k tau_m[l] / N), no 1/M normalization.
ComplexSpectrogram delay_and_sum(std::span<const ComplexSpectrogram> specs,
                                 const TdoaTrajectory& trajectory);

// |Yhat[l,k]|^2 = sum_m |X_m[l,k]|^2.
PowerSpectrogram total_power_reference(std::span<const ComplexSpectrogram> specs);

// One frame of each of the above; the batch functions are built on these so
// streaming and batch results agree bit for bit.
void delay_and_sum_frame(std::span<const std::span<const Complex>> channel_frames,
                         std::span<const double> tdoas, std::size_t frame_size,
                         std::span<Complex> out);
void total_power_frame(std::span<const std::span<const Complex>> channel_frames,
                       std::span<double> out);

// Multiplies every bin by exp(-j 2 pi k tau / N), i.e. delays the frame by tau
// samples. Used to re-reference the origin-aligned beam to one microphone.
void delay_frame(std::span<Complex> frame, double tau, std::size_t frame_size);

// Per-channel STFTs of a multichannel wave.
std::vector<ComplexSpectrogram> multichannel_stft(const MultichannelWave& wave,
                                                  const StftConfig& config);

struct BeamformerFrame {
  std::vector<Complex> beam;    // Y[l, .]
  std::vector<double> power;    // |Yhat[l, .]|^2
};

// Hop-by-hop composition of per-channel streaming STFT with the two frame
// operations above.
class BeamformerStream {
 public:
  BeamformerStream(std::size_t num_channels, const StftConfig& config);

  // `hop` holds num_channels spans of hop_size samples each. Returns true and
  // fills `out` once a frame is available; `tdoas` must be the vector current
  // for that frame.
  bool push(std::span<const std::span<const double>> hop, std::span<const double> tdoas,
            BeamformerFrame& out);

  std::size_t num_channels() const { return stfts_.size(); }
  const StftConfig& config() const { return config_; }
  // Channel spectra of the most recently emitted frame.
  std::span<const std::vector<Complex>> channel_frames() const { return frames_; }

 private:
  StftConfig config_;
  std::vector<StreamingStft> stfts_;
  std::vector<std::vector<Complex>> frames_;
  std::vector<std::span<const Complex>> views_;
};

}  // namespace avse
