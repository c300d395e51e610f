#include "avse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "avse/error.hpp"

namespace avse {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 direction_from_angles(double azimuth, double elevation) {
  return {std::sin(azimuth) * std::cos(elevation), -std::sin(elevation),
          std::cos(azimuth) * std::cos(elevation)};
}

std::array<double, 2> angles_from_direction(const Vec3& d) {
  const double r = norm(d);
  return {std::atan2(d[0], d[2]), std::asin(std::clamp(-d[1] / r, -1.0, 1.0))};
}

ArrayGeometry::ArrayGeometry(std::vector<Vec3> mic_positions, double speed_of_sound)
    : positions_(std::move(mic_positions)), speed_of_sound_(speed_of_sound) {
  if (positions_.size() < 2) {
    throw InvalidConfig("array geometry needs at least 2 microphones, got " +
                        std::to_string(positions_.size()));
  }
  if (!(speed_of_sound_ > 0.0)) throw InvalidConfig("speed of sound must be positive");
  Vec3 centroid{0.0, 0.0, 0.0};
  for (const auto& p : positions_) {
    for (int i = 0; i < 3; ++i) {
      if (!std::isfinite(p[i])) throw InvalidConfig("microphone position is not finite");
      centroid[i] += p[i];
    }
  }
  for (auto& c : centroid) c /= static_cast<double>(positions_.size());
  for (auto& p : positions_) {
    for (int i = 0; i < 3; ++i) p[i] -= centroid[i];
  }
}

ArrayGeometry ArrayGeometry::reference() {
  // front bar left to right, then left arm and right arm front to back
  return ArrayGeometry({{-0.062, 0.0, 0.0},
                        {-0.030, 0.0, 0.0},
                        {0.030, 0.0, 0.0},
                        {0.062, 0.0, 0.0},
                        {-0.070, 0.0, -0.040},
                        {-0.070, 0.0, -0.100},
                        {0.070, 0.0, -0.040},
                        {0.070, 0.0, -0.100}},
                       343.0);
}

double ArrayGeometry::max_radius() const {
  double r = 0.0;
  for (const auto& p : positions_) r = std::max(r, norm(p));
  return r;
}

double ArrayGeometry::tau_max(double sample_rate) const {
  return sample_rate * max_radius() / speed_of_sound_;
}

std::vector<double> tdoa_from_direction(const ArrayGeometry& geometry, const Vec3& doa,
                                        double sample_rate) {
  if (std::abs(norm(doa) - 1.0) > 1e-6) {
    throw InvalidInput("direction of arrival must be a unit vector (norm " +
                       std::to_string(norm(doa)) + ")");
  }
  const double scale = sample_rate / geometry.speed_of_sound();
  std::vector<double> tau;
  tau.reserve(geometry.num_mics());
  for (const auto& p : geometry.mic_positions()) tau.push_back(-scale * dot(p, doa));
  return tau;
}

TdoaTrajectory TdoaTrajectory::constant(std::span<const double> tdoas, double tau_max,
                                        std::size_t num_frames) {
  TdoaTrajectory t;
  t.num_mics = tdoas.size();
  t.tau_max = tau_max;
  t.frames.assign(num_frames, std::vector<double>(tdoas.begin(), tdoas.end()));
  return t;
}

void TdoaTrajectory::validate() const {
  if (num_mics == 0) throw InvalidInput("TDoA trajectory has no microphones");
  for (std::size_t l = 0; l < frames.size(); ++l) {
    if (frames[l].size() != num_mics) {
      throw InvalidInput("TDoA frame " + std::to_string(l) + " has " +
                         std::to_string(frames[l].size()) + " entries, expected " +
                         std::to_string(num_mics));
    }
    for (double tau : frames[l]) {
      if (!std::isfinite(tau) || std::abs(tau) > tau_max + 1e-9) {
        throw InvalidInput("TDoA " + std::to_string(tau) + " at frame " + std::to_string(l) +
                           " exceeds tau_max " + std::to_string(tau_max));
      }
    }
  }
}

double PinholeCamera::focal_px() const {
  const double half = horizontal_fov_deg * std::numbers::pi / 360.0;
  return (width - 1) / 2.0 / std::tan(half);
}

bool PinholeCamera::contains(const Pixel& p) const {
  constexpr double kSlack = 1e-9;
  return p.u >= 1.0 - kSlack && p.u <= width + kSlack && p.v >= 1.0 - kSlack &&
         p.v <= height + kSlack;
}

std::optional<Pixel> PinholeCamera::project(const Vec3& point) const {
  if (!(point[2] > 0.0)) return std::nullopt;
  const double f = focal_px();
  Pixel px{cx() + f * point[0] / point[2], cy() + f * point[1] / point[2]};
  if (!contains(px)) return std::nullopt;
  return px;
}

Vec3 PinholeCamera::back_project(const Pixel& pixel) const {
  const double f = focal_px();
  Vec3 d{(pixel.u - cx()) / f, (pixel.v - cy()) / f, 1.0};
  const double n = norm(d);
  for (auto& c : d) c /= n;
  return d;
}

}  // namespace avse
