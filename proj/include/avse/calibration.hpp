// Pixel-coordinate -> TDoA calibration: a bivariate polynomial per microphone
// fit by least squares, and the zero-order hold that turns a slow pixel track
// into per-STFT-frame TDoAs.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "avse/geometry.hpp"
#include "avse/stft.hpp"

namespace avse {

struct PixelSample {
  double time = 0.0;  // seconds
  double u = 0.0;
  double v = 0.0;
};

struct PixelTrack {
  int width = 640;
  int height = 480;
  double rate = 4.0;  // nominal update rate, Hz
  std::vector<PixelSample> samples;

  // Throws InvalidInput on empty tracks, non-increasing timestamps or
  // out-of-image coordinates.
  void validate() const;
};

struct CalibrationPair {
  Pixel pixel;
  std::vector<double> tdoas;  // one per microphone, samples
};

// Monomials u^a v^b with a + b <= degree, ordered by total degree, then by
// u power descending: 1, u, v, u^2, uv, v^2, u^3, ...
class CalibrationMap {
 public:
  CalibrationMap() = default;
  CalibrationMap(int degree, int width, int height, double tau_max,
                 std::vector<std::vector<double>> coefficients);

  static std::size_t num_terms(int degree);
  static void monomials(int degree, double u, double v, std::span<double> out);

  int degree() const { return degree_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double tau_max() const { return tau_max_; }
  std::size_t num_mics() const { return coefficients_.size(); }
  const std::vector<std::vector<double>>& coefficients() const { return coefficients_; }

  friend bool operator==(const CalibrationMap&, const CalibrationMap&) = default;

 private:
  int degree_ = 0;
  int width_ = 0;
  int height_ = 0;
  double tau_max_ = 0.0;
  std::vector<std::vector<double>> coefficients_;
};

struct CalibrationFit {
  CalibrationMap map;
  std::vector<double> residual_rms;  // per microphone, samples
};

// Least-squares fit, each microphone independently.
// Throws InsufficientCalibrationData when there are fewer pairs than
// monomials, DegenerateCalibration for a rank-deficient design matrix and
// InvalidInput for out-of-image pixels or ragged TDoA vectors.
CalibrationFit fit_calibration(std::span<const CalibrationPair> pairs, int degree, int width,
                               int height, double tau_max);

// Polynomial evaluation per microphone, clamped to [-tau_max, tau_max].
// Throws InvalidInput for pixels outside [1,W] x [1,H].
std::vector<double> map_pixel_to_tdoa(const CalibrationMap& map, double u, double v);

// Frame l takes the TDoAs of the latest track sample at or before its centre
// time (l*hop + N/2) / rate; frames before the first sample use the first.
TdoaTrajectory track_to_trajectory(const PixelTrack& track, const CalibrationMap& map,
                                   std::size_t num_frames, const StftConfig& config);

// Index of the track sample held at frame l (same rule as above).
std::size_t held_sample_index(const PixelTrack& track, std::size_t frame,
                              const StftConfig& config);

}  // namespace avse
