#include "avse/json_io.hpp"

#include <fstream>

#include "avse/error.hpp"

namespace avse {

namespace {

// Wraps nlohmann type/key errors as InvalidInput with the file context.
template <typename F>
auto convert(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

}  // namespace

Json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw InvalidInput(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& value) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << value.dump(2) << '\n';
  if (!f) throw IoError("failed writing " + path.string());
}

ArrayGeometry geometry_from_json(const Json& j) {
  return convert("geometry", [&] {
    std::vector<Vec3> positions;
    for (const auto& p : j.at("mic_positions")) positions.push_back(p.get<Vec3>());
    return ArrayGeometry(std::move(positions), j.value("speed_of_sound", 343.0));
  });
}

Json geometry_to_json(const ArrayGeometry& geometry) {
  return {{"mic_positions", geometry.mic_positions()},
          {"speed_of_sound", geometry.speed_of_sound()}};
}

CalibrationMap calibration_from_json(const Json& j) {
  return convert("calibration", [&] {
    return CalibrationMap(j.at("degree").get<int>(), j.at("width").get<int>(),
                          j.at("height").get<int>(), j.at("tau_max").get<double>(),
                          j.at("coefficients").get<std::vector<std::vector<double>>>());
  });
}

Json calibration_to_json(const CalibrationMap& map) {
  return {{"degree", map.degree()},
          {"width", map.width()},
          {"height", map.height()},
          {"tau_max", map.tau_max()},
          {"coefficients", map.coefficients()}};
}

CalibrationPairs calibration_pairs_from_json(const Json& j) {
  return convert("calibration pairs", [&] {
    CalibrationPairs out;
    out.width = j.at("width").get<int>();
    out.height = j.at("height").get<int>();
    out.tau_max = j.at("tau_max").get<double>();
    for (const auto& p : j.at("pairs")) {
      out.pairs.push_back({{p.at("u").get<double>(), p.at("v").get<double>()},
                           p.at("tdoas").get<std::vector<double>>()});
    }
    return out;
  });
}

Json calibration_pairs_to_json(const CalibrationPairs& pairs) {
  Json list = Json::array();
  for (const auto& p : pairs.pairs) {
    list.push_back({{"u", p.pixel.u}, {"v", p.pixel.v}, {"tdoas", p.tdoas}});
  }
  return {{"width", pairs.width},
          {"height", pairs.height},
          {"tau_max", pairs.tau_max},
          {"pairs", list}};
}

PixelTrack track_from_json(const Json& j, int width, int height, double rate) {
  auto track = convert("track", [&] {
    PixelTrack t;
    t.width = width;
    t.height = height;
    t.rate = rate;
    if (!j.is_array()) throw InvalidInput("track JSON must be a list of {t, u, v}");
    for (const auto& s : j) {
      t.samples.push_back({s.at("t").get<double>(), s.at("u").get<double>(),
                           s.at("v").get<double>()});
    }
    return t;
  });
  track.validate();
  return track;
}

Json track_to_json(const PixelTrack& track) {
  Json list = Json::array();
  for (const auto& s : track.samples) list.push_back({{"t", s.time}, {"u", s.u}, {"v", s.v}});
  return list;
}

TdoaTrajectory trajectory_from_json(const Json& j) {
  auto traj = convert("tdoa", [&] {
    TdoaTrajectory t;
    t.tau_max = j.at("tau_max").get<double>();
    t.frames = j.at("frames").get<std::vector<std::vector<double>>>();
    t.num_mics = t.frames.empty() ? 0 : t.frames.front().size();
    return t;
  });
  traj.validate();
  return traj;
}

Json trajectory_to_json(const TdoaTrajectory& trajectory) {
  return {{"tau_max", trajectory.tau_max}, {"frames", trajectory.frames}};
}

}  // namespace avse
