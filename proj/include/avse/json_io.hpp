// JSON files for geometry, calibration, pixel tracks and TDoA trajectories.
//
//   geometry     {"mic_positions": [[x, y, z], ...], "speed_of_sound": c}
//   calibration  {"degree": d, "width": U, "height": V, "tau_max": t,
//                 "coefficients": [[c_0, c_1, ...] per mic]}
//   pairs        {"width": U, "height": V, "tau_max": t,
//                 "pairs": [{"u": u, "v": v, "tdoas": [...]}, ...]}
//   track        [{"t": seconds, "u": u, "v": v}, ...]
//   tdoa         {"tau_max": t, "frames": [[tau_1, ..., tau_M] per frame]}
#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "avse/calibration.hpp"
#include "avse/geometry.hpp"

namespace avse {

using Json = nlohmann::json;

// Parse errors are reported as InvalidInput naming the file.
Json read_json(const std::filesystem::path& path);
// Pretty-printed with a trailing newline; byte-stable for equal input.
void write_json(const std::filesystem::path& path, const Json& value);

ArrayGeometry geometry_from_json(const Json& j);
Json geometry_to_json(const ArrayGeometry& geometry);

CalibrationMap calibration_from_json(const Json& j);
Json calibration_to_json(const CalibrationMap& map);

struct CalibrationPairs {
  int width = 640;
  int height = 480;
  double tau_max = 0.0;
  std::vector<CalibrationPair> pairs;
};
CalibrationPairs calibration_pairs_from_json(const Json& j);
Json calibration_pairs_to_json(const CalibrationPairs& pairs);

// Image size and rate are not stored in the track file.
PixelTrack track_from_json(const Json& j, int width, int height, double rate = 4.0);
Json track_to_json(const PixelTrack& track);

TdoaTrajectory trajectory_from_json(const Json& j);
Json trajectory_to_json(const TdoaTrajectory& trajectory);

}  // namespace avse
