#include "avse/scene.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "avse/error.hpp"
#include "avse/random.hpp"

namespace avse {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr double kRenderPeak = 0.5;

double windowed_sinc(double t) {
  constexpr double half = kFractionalDelayTaps / 2;
  if (std::abs(t) >= half) return 0.0;
  const double w = 0.42 + 0.5 * std::cos(kPi * t / half) + 0.08 * std::cos(2.0 * kPi * t / half);
  if (t == 0.0) return w;
  return w * std::sin(kPi * t) / (kPi * t);
}

std::vector<double> load_signal(const SourceSpec& src, double sample_rate) {
  if (!src.signal.empty()) return src.signal;
  if (src.file.empty()) throw InvalidInput("source has neither a signal nor a file");
  const auto wave = read_wav(src.file);
  if (wave.sample_rate != sample_rate) {
    throw InvalidInput(src.file + ": sample rate " + std::to_string(wave.sample_rate) +
                       " Hz, expected " + std::to_string(sample_rate));
  }
  if (wave.num_samples() == 0) throw InvalidInput(src.file + ": empty signal");
  return wave.channels.front();
}

// `n` samples starting at `offset`, wrapping around the end of the signal.
std::vector<double> cyclic_segment(const std::vector<double>& x, std::size_t offset,
                                   std::size_t n, double gain) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = gain * x[(offset + i) % x.size()];
  return out;
}

void add_into(MultichannelWave& acc, const MultichannelWave& w) {
  for (std::size_t m = 0; m < acc.num_channels(); ++m) {
    for (std::size_t i = 0; i < acc.num_samples(); ++i) acc.channels[m][i] += w.channels[m][i];
  }
}

double peak(const MultichannelWave& w) {
  double p = 0.0;
  for (const auto& ch : w.channels) {
    for (double v : ch) p = std::max(p, std::abs(v));
  }
  return p;
}

Json source_to_json(const SourceSpec& s) {
  return {{"file", s.file},
          {"category", s.category},
          {"offset", s.offset},
          {"azimuth_deg", s.azimuth_deg},
          {"elevation_deg", s.elevation_deg},
          {"distance_m", s.distance_m},
          {"gain_db", s.gain_db}};
}

SourceSpec source_from_json(const Json& j) {
  SourceSpec s;
  s.file = j.at("file").get<std::string>();
  s.category = j.at("category").get<std::string>();
  s.offset = j.at("offset").get<std::size_t>();
  s.azimuth_deg = j.at("azimuth_deg").get<double>();
  s.elevation_deg = j.at("elevation_deg").get<double>();
  s.distance_m = j.at("distance_m").get<double>();
  s.gain_db = j.at("gain_db").get<double>();
  return s;
}

double angle_between_deg(const Vec3& a, const Vec3& b) {
  const double c = std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0);
  return std::acos(c) / kDeg;
}

}  // namespace

std::vector<double> fractional_delay(std::span<const double> signal, double delay) {
  if (!(delay >= 0.0) || !std::isfinite(delay)) {
    throw InvalidInput("fractional delay must be finite and >= 0");
  }
  const auto n = signal.size();
  std::vector<double> out(n, 0.0);
  const double whole = std::floor(delay);
  const double frac = delay - whole;
  const auto shift = static_cast<std::ptrdiff_t>(whole);
  if (frac == 0.0) {
    for (std::size_t i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(shift, n)); i < n; ++i) {
      out[i] = signal[i - static_cast<std::size_t>(shift)];
    }
    return out;
  }
  constexpr int lo = -(kFractionalDelayTaps / 2 - 1);
  constexpr int hi = kFractionalDelayTaps / 2;
  std::vector<double> h;
  for (int i = lo; i <= hi; ++i) h.push_back(windowed_sinc(i - frac));
  const auto len = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t t = 0; t < len; ++t) {
    double acc = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const std::ptrdiff_t src = t - shift - i;
      if (src >= 0 && src < len) acc += h[static_cast<std::size_t>(i - lo)] * signal[src];
    }
    out[static_cast<std::size_t>(t)] = acc;
  }
  return out;
}

MultichannelWave propagate(std::span<const double> signal, const Vec3& position,
                           const ArrayGeometry& geometry, double sample_rate) {
  if (norm(position) <= kMinSourceDistance) {
    throw InvalidInput("source at " + std::to_string(norm(position)) +
                       " m is closer than the 0.3 m minimum");
  }
  MultichannelWave out;
  out.sample_rate = sample_rate;
  for (const auto& p : geometry.mic_positions()) {
    const Vec3 d{position[0] - p[0], position[1] - p[1], position[2] - p[2]};
    const double r = norm(d);
    if (r <= kMinSourceDistance) {
      throw InvalidInput("source is closer than 0.3 m to a microphone");
    }
    auto ch = fractional_delay(signal, r / geometry.speed_of_sound() * sample_rate);
    const double gain = 1.0 / r;
    for (auto& v : ch) v *= gain;
    out.channels.push_back(std::move(ch));
  }
  return out;
}

double channel_power(const MultichannelWave& wave, std::size_t channel) {
  const auto& ch = wave.channels.at(channel);
  if (ch.empty()) return 0.0;
  double acc = 0.0;
  for (double v : ch) acc += v * v;
  return acc / static_cast<double>(ch.size());
}

MixResult mix_at_snr(const MultichannelWave& target, const MultichannelWave& noise,
                     double snr_db) {
  target.validate();
  noise.validate();
  if (target.num_channels() != noise.num_channels() ||
      target.num_samples() != noise.num_samples()) {
    throw InvalidInput("target and noise images differ in shape");
  }
  const double ps = channel_power(target);
  const double pb = channel_power(noise);
  if (!(ps > 0.0)) throw InvalidInput("target image has zero power on channel 1");
  if (!(pb > 0.0)) throw InvalidInput("noise image has zero power on channel 1");
  MixResult r;
  r.noise_scale = std::sqrt(ps / (pb * std::pow(10.0, snr_db / 10.0)));
  r.target = target;
  r.noise = noise;
  r.mixture = target;
  for (std::size_t m = 0; m < noise.num_channels(); ++m) {
    for (std::size_t i = 0; i < noise.num_samples(); ++i) {
      r.noise.channels[m][i] *= r.noise_scale;
      r.mixture.channels[m][i] = r.target.channels[m][i] + r.noise.channels[m][i];
    }
  }
  return r;
}

Vec3 SourceSpec::position() const {
  const auto d = direction_from_angles(azimuth_deg * kDeg, elevation_deg * kDeg);
  return {distance_m * d[0], distance_m * d[1], distance_m * d[2]};
}

void ScenarioSpec::validate() const {
  if (interferers.empty() || interferers.size() > 3) {
    throw InvalidConfig(id + ": interferer count " + std::to_string(interferers.size()) +
                        " outside 1..3");
  }
  if (!(snr_db >= 0.5 && snr_db <= 10.0)) {
    throw InvalidConfig(id + ": SNR " + std::to_string(snr_db) + " dB outside [0.5, 10]");
  }
  if (!(duration_s > 0.0)) throw InvalidConfig(id + ": duration must be positive");
  if (std::abs(target.azimuth_deg) > fov_half_deg) {
    throw InvalidConfig(id + ": target azimuth " + std::to_string(target.azimuth_deg) +
                        " deg outside the +-" + std::to_string(fov_half_deg) +
                        " deg field of view");
  }
  auto check_distance = [&](const SourceSpec& s) {
    if (!(s.distance_m > kMinSourceDistance)) {
      throw InvalidConfig(id + ": source distance " + std::to_string(s.distance_m) +
                          " m must exceed 0.3 m");
    }
  };
  check_distance(target);
  for (const auto& s : interferers) {
    check_distance(s);
    const auto a = s.position();
    const auto b = target.position();
    if (norm(Vec3{a[0] - b[0], a[1] - b[1], a[2] - b[2]}) < 1e-6) {
      throw InvalidConfig(id + ": interferer placed at the target position");
    }
  }
  stft.validate();
}

std::string ScenarioSpec::interference_category() const {
  for (const auto& s : interferers) {
    if (s.category != "speech") return "mixed";
  }
  return "speech";
}

ScenarioOutput render_scenario(const ScenarioSpec& spec) {
  spec.validate();
  const double fs = spec.stft.sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * fs));

  auto source_image = [&](const SourceSpec& s) {
    const auto x = load_signal(s, fs);
    const auto seg = cyclic_segment(x, s.offset % x.size(), n, std::pow(10.0, s.gain_db / 20.0));
    return propagate(seg, s.position(), spec.geometry, fs);
  };

  const auto target = source_image(spec.target);
  auto noise = MultichannelWave::zeros(spec.geometry.num_mics(), n, fs);
  for (const auto& s : spec.interferers) add_into(noise, source_image(s));

  auto mix = mix_at_snr(target, noise, spec.snr_db);
  const double p = peak(mix.mixture);
  const double scale = p > 0.0 ? kRenderPeak / p : 1.0;

  ScenarioOutput out;
  out.target_images = std::move(mix.target);
  out.noise_images = std::move(mix.noise);
  out.mixture = MultichannelWave::zeros(spec.geometry.num_mics(), n, fs);
  for (std::size_t m = 0; m < out.mixture.num_channels(); ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      out.target_images.channels[m][i] *= scale;
      out.noise_images.channels[m][i] *= scale;
      out.mixture.channels[m][i] =
          out.target_images.channels[m][i] + out.noise_images.channels[m][i];
    }
  }

  const Vec3 pos = spec.target.position();
  auto pixel = spec.camera.project(pos);
  if (!pixel) {
    throw InvalidConfig(spec.id + ": target at azimuth " +
                        std::to_string(spec.target.azimuth_deg) + " deg, elevation " +
                        std::to_string(spec.target.elevation_deg) +
                        " deg projects outside the camera image");
  }
  pixel->u = std::clamp(pixel->u, 1.0, static_cast<double>(spec.camera.width));
  pixel->v = std::clamp(pixel->v, 1.0, static_cast<double>(spec.camera.height));
  out.pixel_track.width = spec.camera.width;
  out.pixel_track.height = spec.camera.height;
  out.pixel_track.rate = spec.track_rate;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / spec.track_rate;
    if (t >= spec.duration_s) break;
    out.pixel_track.samples.push_back({t, pixel->u, pixel->v});
  }

  const double r = norm(pos);
  const Vec3 doa{pos[0] / r, pos[1] / r, pos[2] / r};
  const auto tdoas = tdoa_from_direction(spec.geometry, doa, fs);
  out.tdoa_truth = TdoaTrajectory::constant(tdoas, spec.geometry.tau_max(fs),
                                            num_frames(n, spec.stft));

  out.metadata = scenario_to_json(spec);
  out.metadata["target_position_m"] = pos;
  Json ipos = Json::array();
  for (const auto& s : spec.interferers) ipos.push_back(s.position());
  out.metadata["interferer_positions_m"] = ipos;
  out.metadata["target_pixel"] = {{"u", pixel->u}, {"v", pixel->v}};
  out.metadata["noise_scale"] = mix.noise_scale;
  out.metadata["output_scale"] = scale;
  out.metadata["num_samples"] = n;
  out.metadata["num_frames"] = out.tdoa_truth.num_frames();
  return out;
}

std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InvalidInput("corpus directory " + dir.string() + " not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (e.is_regular_file() && ext == ".wav") files.push_back(e.path());
  }
  if (files.empty()) throw InvalidInput("corpus directory " + dir.string() + " has no .wav files");
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<ScenarioSpec> generate_batch(const Corpus& corpus, const BatchConfig& config,
                                         std::uint64_t seed) {
  if (corpus.speech.empty()) throw InvalidInput("speech corpus is empty");
  if (config.min_interferers < 1 || config.max_interferers > 3 ||
      config.min_interferers > config.max_interferers) {
    throw InvalidConfig("interferer count range must lie within 1..3");
  }
  if (corpus.speech.size() < 2 && corpus.noise.empty()) {
    throw InvalidInput("corpora too small: interferers need a file other than the target's");
  }
  config.stft.validate();

  std::map<std::string, std::size_t> lengths;
  auto length_of = [&](const std::string& file) {
    auto it = lengths.find(file);
    if (it != lengths.end()) return it->second;
    const auto wave = read_wav(file);
    if (wave.sample_rate != config.stft.sample_rate) {
      throw InvalidInput(file + ": sample rate " + std::to_string(wave.sample_rate) +
                         " Hz, expected " + std::to_string(config.stft.sample_rate));
    }
    if (wave.num_samples() == 0) throw InvalidInput(file + ": empty signal");
    return lengths[file] = wave.num_samples();
  };

  std::vector<ScenarioSpec> specs;
  specs.reserve(config.count);
  for (std::size_t k = 0; k < config.count; ++k) {
    const std::uint64_t scenario_seed = Rng::derive_seed(seed, k);
    Rng rng(scenario_seed);
    ScenarioSpec spec;
    char id[32];
    std::snprintf(id, sizeof id, "scenario_%04zu", k);
    spec.id = id;
    spec.seed = scenario_seed;
    spec.duration_s = config.duration_s;
    spec.fov_half_deg = config.fov_half_deg;
    spec.geometry = config.geometry;
    spec.camera = config.camera;
    spec.stft = config.stft;

    auto& t = spec.target;
    t.file = corpus.speech[rng.index(corpus.speech.size())].generic_string();
    t.category = "speech";
    t.azimuth_deg = rng.uniform(-config.fov_half_deg, config.fov_half_deg);
    t.elevation_deg = rng.uniform(-config.elevation_max_deg, config.elevation_max_deg);
    t.distance_m = rng.uniform(config.distance_min_m, config.distance_max_m);
    t.gain_db = 0.0;
    t.offset = rng.index(length_of(t.file));

    spec.snr_db = rng.uniform(config.snr_min_db, config.snr_max_db);
    const std::size_t count =
        config.min_interferers + rng.index(config.max_interferers - config.min_interferers + 1);

    std::set<std::string> used{t.file};
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<std::string> speech, noise, fallback_speech, fallback_noise;
      for (const auto& f : corpus.speech) {
        const auto s = f.generic_string();
        if (s == t.file) continue;
        (used.count(s) ? fallback_speech : speech).push_back(s);
      }
      for (const auto& f : corpus.noise) {
        const auto s = f.generic_string();
        (used.count(s) ? fallback_noise : noise).push_back(s);
      }
      if (speech.empty() && noise.empty()) {
        speech = std::move(fallback_speech);
        noise = std::move(fallback_noise);
      }
      bool pick_speech;
      if (speech.empty()) {
        pick_speech = false;
      } else if (noise.empty()) {
        pick_speech = true;
      } else {
        pick_speech = rng.uniform() < 0.5;
      }
      const auto& pool = pick_speech ? speech : noise;

      SourceSpec s;
      s.file = pool[rng.index(pool.size())];
      s.category = pick_speech ? "speech" : "noise";
      const Vec3 target_dir = direction_from_angles(t.azimuth_deg * kDeg, t.elevation_deg * kDeg);
      for (int attempt = 0;; ++attempt) {
        s.azimuth_deg = rng.uniform(-180.0, 180.0);
        s.elevation_deg = rng.uniform(-config.elevation_max_deg, config.elevation_max_deg);
        const Vec3 dir = direction_from_angles(s.azimuth_deg * kDeg, s.elevation_deg * kDeg);
        if (angle_between_deg(dir, target_dir) >= config.min_separation_deg) break;
        if (attempt > 10000) throw InvalidConfig("cannot place interferer with required separation");
      }
      s.distance_m = rng.uniform(config.distance_min_m, config.distance_max_m);
      s.gain_db = rng.uniform(config.interferer_gain_min_db, config.interferer_gain_max_db);
      s.offset = rng.index(length_of(s.file));
      used.insert(s.file);
      spec.interferers.push_back(std::move(s));
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

Json scenario_to_json(const ScenarioSpec& spec) {
  Json interferers = Json::array();
  for (const auto& s : spec.interferers) interferers.push_back(source_to_json(s));
  return {{"id", spec.id},
          {"seed", spec.seed},
          {"snr_db", spec.snr_db},
          {"duration_s", spec.duration_s},
          {"fov_half_deg", spec.fov_half_deg},
          {"track_rate", spec.track_rate},
          {"category", spec.interference_category()},
          {"target", source_to_json(spec.target)},
          {"interferers", interferers}};
}

ScenarioSpec scenario_from_json(const Json& j, const ArrayGeometry& geometry,
                                const PinholeCamera& camera, const StftConfig& stft) {
  try {
    ScenarioSpec spec;
    spec.id = j.at("id").get<std::string>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.snr_db = j.at("snr_db").get<double>();
    spec.duration_s = j.at("duration_s").get<double>();
    spec.fov_half_deg = j.at("fov_half_deg").get<double>();
    spec.track_rate = j.value("track_rate", 4.0);
    spec.target = source_from_json(j.at("target"));
    for (const auto& s : j.at("interferers")) spec.interferers.push_back(source_from_json(s));
    spec.geometry = geometry;
    spec.camera = camera;
    spec.stft = stft;
    return spec;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed scenario JSON: ") + e.what());
  }
}

Json camera_to_json(const PinholeCamera& camera) {
  return {{"width", camera.width},
          {"height", camera.height},
          {"horizontal_fov_deg", camera.horizontal_fov_deg}};
}

PinholeCamera camera_from_json(const Json& j) {
  PinholeCamera c;
  c.width = j.value("width", c.width);
  c.height = j.value("height", c.height);
  c.horizontal_fov_deg = j.value("horizontal_fov_deg", c.horizontal_fov_deg);
  if (c.width < 1 || c.height < 1 || !(c.horizontal_fov_deg > 0.0 && c.horizontal_fov_deg < 180.0)) {
    throw InvalidConfig("camera needs positive image size and 0 < fov < 180 deg");
  }
  return c;
}

Json stft_to_json(const StftConfig& config) {
  return {{"frame_size", config.frame_size},
          {"hop_size", config.hop_size},
          {"sample_rate", config.sample_rate}};
}

StftConfig stft_from_json(const Json& j) {
  StftConfig c;
  c.frame_size = j.value("frame_size", c.frame_size);
  c.hop_size = j.value("hop_size", c.hop_size);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.validate();
  return c;
}

}  // namespace avse
