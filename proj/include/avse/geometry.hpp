// Microphone-array geometry, far-field TDoAs, and the pinhole camera used to
// relate pixel coordinates to source directions.
//
// Array frame: origin at the array centroid, x to the right, y down, z forward
// (the camera's optical axis). All microphones of the reference eyeglasses
// array lie in the y = 0 plane.
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace avse {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);

// Unit vector for azimuth (radians, positive toward +x) and elevation
// (radians, positive upward, i.e. toward -y).
Vec3 direction_from_angles(double azimuth, double elevation);
// Inverse of direction_from_angles for a non-zero vector: {azimuth, elevation}.
std::array<double, 2> angles_from_direction(const Vec3& direction);

class ArrayGeometry {
 public:
  // Positions in meters; recentered so the centroid is the origin.
  // Throws InvalidConfig for fewer than two microphones or c <= 0.
  explicit ArrayGeometry(std::vector<Vec3> mic_positions, double speed_of_sound = 343.0);

  // 8-microphone eyeglasses layout: four on the front bar at x = +-0.030 and
  // +-0.062 m, two per side arm at (+-0.070, 0, -0.040) and (+-0.070, 0, -0.100).
  static ArrayGeometry reference();

  std::size_t num_mics() const { return positions_.size(); }
  const std::vector<Vec3>& mic_positions() const { return positions_; }
  double speed_of_sound() const { return speed_of_sound_; }

  // Largest microphone distance from the origin, meters.
  double max_radius() const;
  // Bound on |tau_m| in samples: rate * max_radius / c.
  double tau_max(double sample_rate) const;

 private:
  std::vector<Vec3> positions_;
  double speed_of_sound_;
};

// Plane-wave TDoA of each microphone relative to the origin, in samples:
//   tau_m = -(rate / c) * <p_m, doa>
// A microphone with positive projection on `doa` hears the source early
// (negative tau). Throws InvalidInput unless |doa| = 1 within 1e-6.
std::vector<double> tdoa_from_direction(const ArrayGeometry& geometry, const Vec3& doa,
                                        double sample_rate);

// Per-STFT-frame TDoA vectors.
struct TdoaTrajectory {
  std::size_t num_mics = 0;
  double tau_max = 0.0;
  std::vector<std::vector<double>> frames;

  std::size_t num_frames() const { return frames.size(); }
  std::span<const double> at(std::size_t frame) const { return frames.at(frame); }

  // Repeats one TDoA vector for `num_frames` frames.
  static TdoaTrajectory constant(std::span<const double> tdoas, double tau_max,
                                 std::size_t num_frames);

  // Throws InvalidInput on ragged rows or |tau| > tau_max (+1e-9).
  void validate() const;

  friend bool operator==(const TdoaTrajectory&, const TdoaTrajectory&) = default;
};

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

// Ideal pinhole camera at the array origin looking along +z, square pixels.
// Pixel coordinates are 1-based: the horizontal field of view maps exactly
// onto u in [1, width]; the principal point is ((W+1)/2, (H+1)/2).
struct PinholeCamera {
  int width = 640;
  int height = 480;
  double horizontal_fov_deg = 80.0;

  double focal_px() const;
  double cx() const { return (width + 1) / 2.0; }
  double cy() const { return (height + 1) / 2.0; }

  // Projects a point (or direction) in the array frame. nullopt if the point is
  // behind the camera or falls outside [1,W] x [1,H].
  std::optional<Pixel> project(const Vec3& point) const;
  // Unit direction through a pixel.
  Vec3 back_project(const Pixel& pixel) const;
  bool contains(const Pixel& pixel) const;
};

}  // namespace avse
