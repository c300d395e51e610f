#include "avse/calibration.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "avse/error.hpp"

namespace avse {

namespace {

void check_pixel(double u, double v, int width, int height) {
  if (!(u >= 1.0 && u <= width && v >= 1.0 && v <= height)) {
    throw InvalidInput("pixel (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") outside image [1," + std::to_string(width) + "]x[1," +
                       std::to_string(height) + "]");
  }
}

}  // namespace

void PixelTrack::validate() const {
  if (samples.empty()) throw InvalidInput("pixel track is empty");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    check_pixel(samples[i].u, samples[i].v, width, height);
    if (i > 0 && !(samples[i].time > samples[i - 1].time)) {
      throw InvalidInput("pixel track timestamps must be strictly increasing (sample " +
                         std::to_string(i) + ")");
    }
  }
}

CalibrationMap::CalibrationMap(int degree, int width, int height, double tau_max,
                               std::vector<std::vector<double>> coefficients)
    : degree_(degree),
      width_(width),
      height_(height),
      tau_max_(tau_max),
      coefficients_(std::move(coefficients)) {
  if (degree_ < 0) throw InvalidConfig("calibration degree must be >= 0");
  if (width_ < 1 || height_ < 1) throw InvalidConfig("calibration image size must be positive");
  if (!(tau_max_ >= 0.0)) throw InvalidConfig("calibration tau_max must be >= 0");
  if (coefficients_.empty()) throw InvalidConfig("calibration map has no microphones");
  for (std::size_t m = 0; m < coefficients_.size(); ++m) {
    if (coefficients_[m].size() != num_terms(degree_)) {
      throw InvalidConfig("calibration mic " + std::to_string(m) + " has " +
                          std::to_string(coefficients_[m].size()) + " coefficients, expected " +
                          std::to_string(num_terms(degree_)));
    }
  }
}

std::size_t CalibrationMap::num_terms(int degree) {
  const auto d = static_cast<std::size_t>(degree);
  return (d + 1) * (d + 2) / 2;
}

void CalibrationMap::monomials(int degree, double u, double v, std::span<double> out) {
  std::size_t i = 0;
  for (int total = 0; total <= degree; ++total) {
    for (int a = total; a >= 0; --a) {
      out[i++] = std::pow(u, a) * std::pow(v, total - a);
    }
  }
}

CalibrationFit fit_calibration(std::span<const CalibrationPair> pairs, int degree, int width,
                               int height, double tau_max) {
  if (degree < 0) throw InvalidConfig("calibration degree must be >= 0");
  const std::size_t terms = CalibrationMap::num_terms(degree);
  if (pairs.size() < terms) {
    throw InsufficientCalibrationData(
        "degree " + std::to_string(degree) + " needs at least " + std::to_string(terms) +
        " calibration pairs, got " + std::to_string(pairs.size()));
  }
  const std::size_t mics = pairs.front().tdoas.size();
  if (mics == 0) throw InvalidInput("calibration pairs carry no TDoAs");

  Eigen::MatrixXd design(pairs.size(), terms);
  Eigen::MatrixXd targets(pairs.size(), mics);
  std::vector<double> row(terms);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    check_pixel(p.pixel.u, p.pixel.v, width, height);
    if (p.tdoas.size() != mics) {
      throw InvalidInput("calibration pair " + std::to_string(i) + " has " +
                         std::to_string(p.tdoas.size()) + " TDoAs, expected " +
                         std::to_string(mics));
    }
    CalibrationMap::monomials(degree, p.pixel.u, p.pixel.v, row);
    for (std::size_t j = 0; j < terms; ++j) design(i, j) = row[j];
    for (std::size_t m = 0; m < mics; ++m) targets(i, m) = p.tdoas[m];
  }

  // Column equilibration: raw pixel powers span many orders of magnitude.
  Eigen::VectorXd scale = design.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (scale(j) == 0.0) scale(j) = 1.0;
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(terms)) {
    throw DegenerateCalibration("calibration design matrix is rank deficient (rank " +
                                std::to_string(qr.rank()) + " of " + std::to_string(terms) +
                                "); spread the calibration pixels over the image");
  }
  const Eigen::MatrixXd solution = scale.cwiseInverse().asDiagonal() * qr.solve(targets);
  const Eigen::MatrixXd residual = design * solution - targets;

  CalibrationFit fit;
  std::vector<std::vector<double>> coefficients(mics, std::vector<double>(terms));
  fit.residual_rms.resize(mics);
  for (std::size_t m = 0; m < mics; ++m) {
    for (std::size_t j = 0; j < terms; ++j) coefficients[m][j] = solution(j, m);
    fit.residual_rms[m] =
        std::sqrt(residual.col(m).squaredNorm() / static_cast<double>(pairs.size()));
  }
  fit.map = CalibrationMap(degree, width, height, tau_max, std::move(coefficients));
  return fit;
}

std::vector<double> map_pixel_to_tdoa(const CalibrationMap& map, double u, double v) {
  check_pixel(u, v, map.width(), map.height());
  const std::size_t terms = CalibrationMap::num_terms(map.degree());
  std::vector<double> row(terms);
  CalibrationMap::monomials(map.degree(), u, v, row);
  std::vector<double> tau(map.num_mics());
  for (std::size_t m = 0; m < map.num_mics(); ++m) {
    const auto& c = map.coefficients()[m];
    double acc = 0.0;
    for (std::size_t j = 0; j < terms; ++j) acc += c[j] * row[j];
    tau[m] = std::clamp(acc, -map.tau_max(), map.tau_max());
  }
  return tau;
}

std::size_t held_sample_index(const PixelTrack& track, std::size_t frame,
                              const StftConfig& config) {
  const double centre =
      (static_cast<double>(frame * config.hop_size) + config.frame_size / 2.0) /
      config.sample_rate;
  const auto it = std::upper_bound(
      track.samples.begin(), track.samples.end(), centre,
      [](double t, const PixelSample& s) { return t < s.time; });
  if (it == track.samples.begin()) return 0;
  return static_cast<std::size_t>(std::distance(track.samples.begin(), it)) - 1;
}

TdoaTrajectory track_to_trajectory(const PixelTrack& track, const CalibrationMap& map,
                                   std::size_t num_frames, const StftConfig& config) {
  track.validate();
  config.validate();
  std::vector<std::vector<double>> per_sample;
  per_sample.reserve(track.samples.size());
  for (const auto& s : track.samples) per_sample.push_back(map_pixel_to_tdoa(map, s.u, s.v));

  TdoaTrajectory traj;
  traj.num_mics = map.num_mics();
  traj.tau_max = map.tau_max();
  traj.frames.reserve(num_frames);
  for (std::size_t l = 0; l < num_frames; ++l) {
    traj.frames.push_back(per_sample[held_sample_index(track, l, config)]);
  }
  return traj;
}

}  // namespace avse
