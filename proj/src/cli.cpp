#include "avse/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "avse/calibration.hpp"
#include "avse/error.hpp"
#include "avse/json_io.hpp"
#include "avse/metrics.hpp"
#include "avse/parallel.hpp"
#include "avse/pipeline.hpp"
#include "avse/scene.hpp"
#include "avse/wave.hpp"
#include "avse/weights_io.hpp"

namespace avse {

namespace {

namespace fs = std::filesystem;

constexpr double kReferenceAlgorithmicMs = 40.0;
constexpr double kReferenceTotalMs = 120.0;

std::shared_ptr<spdlog::logger> logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> log;
  std::call_once(once, [] {
    log = spdlog::stderr_color_mt("avse");
    log->set_pattern("[%l] %v");
  });
  return log;
}

struct GlobalOptions {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool verbose = false;
};

// Flags shared by enhance and stream-bench.
struct EnhanceOptions {
  std::optional<std::string> scenario;
  std::optional<std::string> mixture;
  std::optional<std::string> tdoa;
  std::optional<std::string> track;
  std::optional<std::string> calibration;
  std::optional<std::string> target;
  std::optional<std::string> noise;
  std::optional<std::string> mask;
  std::optional<std::string> weights;
  std::optional<std::string> normalization;
  std::optional<int> reference_mic;
  std::optional<std::string> out;
  std::optional<std::string> dump;
  std::optional<std::string> manifest;
  std::optional<std::string> out_dir;
  std::optional<std::string> report;
  bool pcm16 = false;
};

struct SimulateOptions {
  std::optional<std::string> speech_dir;
  std::optional<std::string> noise_dir;
  std::optional<std::size_t> count;
  std::optional<double> duration;
  std::optional<std::string> out;
};

struct CalibrateOptions {
  std::optional<std::string> pairs;
  std::optional<std::size_t> synthetic;
  std::optional<int> degree;
  std::optional<std::string> out;
  std::optional<std::string> pairs_out;
};

struct EvaluateOptions {
  std::optional<std::string> manifest;
  std::optional<std::string> enhanced;
  std::optional<std::string> csv;
  std::optional<std::string> summary;
  std::optional<int> reference_mic;
};

// Resolved settings: flag > config file > default.
struct Settings {
  Json file = Json::object();
  fs::path base;  // directory of the config file, for relative paths
  StftConfig stft;
  ArrayGeometry geometry = ArrayGeometry::reference();
  PinholeCamera camera;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  SampleFormat format = SampleFormat::kFloat32;

  template <typename T>
  T pick(const std::optional<T>& flag, const char* key, T fallback) const {
    if (flag) return *flag;
    if (file.contains(key)) {
      try {
        return file.at(key).get<T>();
      } catch (const Json::exception& e) {
        throw InvalidConfig(std::string("config key '") + key + "': " + e.what());
      }
    }
    return fallback;
  }

  std::optional<fs::path> path(const std::optional<std::string>& flag, const char* key) const {
    if (flag) return fs::path(*flag);
    if (file.contains(key)) return base / file.at(key).get<std::string>();
    return std::nullopt;
  }
};

Settings resolve_settings(const GlobalOptions& g) {
  Settings s;
  if (g.config) {
    s.file = read_json(*g.config);
    if (!s.file.is_object()) throw InvalidConfig("config file must hold a JSON object");
    s.base = fs::path(*g.config).parent_path();
  }
  const auto& f = s.file;
  try {
    s.stft = stft_from_json(f);
    if (f.contains("geometry")) {
      const auto& geo = f.at("geometry");
      s.geometry = geometry_from_json(geo.is_string() ? read_json(s.base / geo.get<std::string>())
                                                      : geo);
    }
    if (f.contains("camera")) s.camera = camera_from_json(f.at("camera"));
  } catch (const Json::exception& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
  s.seed = s.pick<std::uint64_t>(g.seed, "seed", 0);
  s.threads = s.pick<std::size_t>(g.threads, "threads", 1);
  if (s.threads == 0) throw InvalidConfig("--threads must be >= 1");
  return s;
}

void log_resolved(const std::string& command, const Json& resolved) {
  logger()->info("{}: resolved config {}", command, resolved.dump());
}

Json base_resolved(const Settings& s) {
  return {{"stft", stft_to_json(s.stft)},
          {"geometry", geometry_to_json(s.geometry)},
          {"camera", camera_to_json(s.camera)},
          {"seed", s.seed},
          {"threads", s.threads}};
}

MultichannelWave read_checked(const fs::path& p, const Settings& s) {
  auto w = read_wav(p);
  if (w.sample_rate != s.stft.sample_rate) {
    throw InvalidInput(p.string() + ": sample rate " + std::to_string(w.sample_rate) +
                       " Hz, expected " + std::to_string(s.stft.sample_rate));
  }
  return w;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Settings& s, const SimulateOptions& o) {
  const Json sim = s.file.value("simulate", Json::object());
  auto pick = [&](auto flag, const char* key, auto fallback) {
    using T = decltype(fallback);
    if (flag) return static_cast<T>(*flag);
    return sim.contains(key) ? sim.at(key).get<T>() : fallback;
  };
  BatchConfig bc;
  bc.geometry = s.geometry;
  bc.camera = s.camera;
  bc.stft = s.stft;
  bc.count = pick(o.count, "count", bc.count);
  bc.duration_s = pick(o.duration, "duration_s", bc.duration_s);
  bc.snr_min_db = sim.value("snr_min_db", bc.snr_min_db);
  bc.snr_max_db = sim.value("snr_max_db", bc.snr_max_db);
  bc.min_interferers = sim.value("min_interferers", bc.min_interferers);
  bc.max_interferers = sim.value("max_interferers", bc.max_interferers);
  bc.fov_half_deg = sim.value("fov_half_deg", bc.fov_half_deg);
  bc.elevation_max_deg = sim.value("elevation_max_deg", bc.elevation_max_deg);
  bc.distance_min_m = sim.value("distance_min_m", bc.distance_min_m);
  bc.distance_max_m = sim.value("distance_max_m", bc.distance_max_m);
  bc.min_separation_deg = sim.value("min_separation_deg", bc.min_separation_deg);
  if (bc.snr_min_db < 0.5 || bc.snr_max_db > 10.0 || bc.snr_min_db > bc.snr_max_db) {
    throw InvalidConfig("SNR range must lie within [0.5, 10] dB");
  }

  std::optional<std::string> speech_flag = o.speech_dir, noise_flag = o.noise_dir;
  const auto speech_dir = s.path(speech_flag, "speech_dir");
  const auto noise_dir = s.path(noise_flag, "noise_dir");
  if (!speech_dir) throw InvalidConfig("simulate needs --speech-dir");
  if (!o.out) throw InvalidConfig("simulate needs --out");
  Corpus corpus;
  corpus.speech = list_wavs(*speech_dir);
  if (noise_dir) corpus.noise = list_wavs(*noise_dir);

  Json resolved = base_resolved(s);
  resolved["count"] = bc.count;
  resolved["duration_s"] = bc.duration_s;
  resolved["speech_dir"] = speech_dir->generic_string();
  resolved["noise_dir"] = noise_dir ? noise_dir->generic_string() : "";
  log_resolved("simulate", resolved);

  const auto specs = generate_batch(corpus, bc, s.seed);
  const fs::path out(*o.out);
  fs::create_directories(out / "scenarios");

  Json scenarios = Json::array();
  for (const auto& spec : specs) {
    auto j = scenario_to_json(spec);
    j["dir"] = "scenarios/" + spec.id;
    scenarios.push_back(j);
  }
  parallel_for(specs.size(), s.threads, [&](std::size_t i) {
    const auto& spec = specs[i];
    const auto r = render_scenario(spec);
    const fs::path dir = out / "scenarios" / spec.id;
    fs::create_directories(dir);
    write_wav(dir / "mixture.wav", r.mixture, s.format);
    write_wav(dir / "target.wav", r.target_images, s.format);
    write_wav(dir / "noise.wav", r.noise_images, s.format);
    write_json(dir / "track.json", track_to_json(r.pixel_track));
    write_json(dir / "tdoa.json", trajectory_to_json(r.tdoa_truth));
    write_json(dir / "meta.json", r.metadata);
    logger()->debug("rendered {}", spec.id);
  });

  Json manifest = {{"version", 1},
                   {"seed", s.seed},
                   {"count", bc.count},
                   {"duration_s", bc.duration_s},
                   {"stft", stft_to_json(s.stft)},
                   {"geometry", geometry_to_json(s.geometry)},
                   {"camera", camera_to_json(s.camera)},
                   {"scenarios", scenarios}};
  write_json(out / "manifest.json", manifest);
  std::printf("simulated %zu scenarios into %s\n", specs.size(), out.string().c_str());
  return kExitOk;
}

// ---------------------------------------------------------------- enhance

struct EnhanceJob {
  MultichannelWave mixture;
  std::optional<MultichannelWave> target;
  std::optional<MultichannelWave> noise;
  TdoaTrajectory trajectory;
};

PipelineConfig pipeline_config(const Settings& s, const EnhanceOptions& o) {
  PipelineConfig pc;
  pc.stft = s.stft;
  pc.mask_source = mask_source_from_string(s.pick(o.mask, "mask", std::string("none")));
  pc.normalization =
      normalization_from_string(s.pick(o.normalization, "normalization", std::string("peak")));
  const int ref = s.pick(o.reference_mic, "reference_mic", 1);
  if (ref < 0) throw InvalidConfig("--reference-mic must be >= 0 (0 keeps the array origin)");
  if (ref == 0) {
    pc.align_to_mic.reset();
  } else {
    pc.align_to_mic = static_cast<std::size_t>(ref - 1);
  }
  return pc;
}

std::optional<GruPostfilter> load_model(const Settings& s, const EnhanceOptions& o,
                                        const PipelineConfig& pc) {
  if (pc.mask_source != MaskSource::kGru) return std::nullopt;
  const auto path = s.path(o.weights, "weights");
  if (!path) throw InvalidConfig("gru mode requires --weights");
  return GruPostfilter(load_weights(*path));
}

TdoaTrajectory trajectory_for(const Settings& s, const EnhanceOptions& o,
                              const std::optional<fs::path>& scenario_tdoa,
                              std::size_t frames) {
  if (o.tdoa) return trajectory_from_json(read_json(*o.tdoa));
  if (o.track) {
    const auto cal = s.path(o.calibration, "calibration");
    if (!cal) throw InvalidConfig("--track requires --calibration");
    const auto map = calibration_from_json(read_json(*cal));
    const auto track = track_from_json(read_json(*o.track), map.width(), map.height());
    return track_to_trajectory(track, map, frames, s.stft);
  }
  if (scenario_tdoa) return trajectory_from_json(read_json(*scenario_tdoa));
  throw InvalidConfig("need --tdoa, --track or --scenario");
}

EnhanceJob load_job(const Settings& s, const EnhanceOptions& o, const PipelineConfig& pc,
                    const std::optional<fs::path>& scenario_dir) {
  EnhanceJob job;
  std::optional<fs::path> mixture, target, noise, tdoa;
  if (scenario_dir) {
    mixture = *scenario_dir / "mixture.wav";
    target = *scenario_dir / "target.wav";
    noise = *scenario_dir / "noise.wav";
    tdoa = *scenario_dir / "tdoa.json";
  }
  if (o.mixture) mixture = *o.mixture;
  if (o.target) target = *o.target;
  if (o.noise) noise = *o.noise;
  if (!mixture) throw InvalidConfig("need --mixture or --scenario");
  job.mixture = read_checked(*mixture, s);
  if (job.mixture.num_channels() != s.geometry.num_mics()) {
    throw InvalidInput(mixture->string() + " has " + std::to_string(job.mixture.num_channels()) +
                       " channels, geometry has " + std::to_string(s.geometry.num_mics()) +
                       " microphones");
  }
  if (pc.mask_source == MaskSource::kOracle) {
    if (!target || !noise) throw InvalidConfig("oracle mode requires --target and --noise");
    job.target = read_checked(*target, s);
    job.noise = read_checked(*noise, s);
  }
  job.trajectory =
      trajectory_for(s, o, tdoa, num_frames(job.mixture.num_samples(), s.stft));
  return job;
}

PipelineInputs inputs_for(const EnhanceJob& job, const std::optional<GruPostfilter>& model) {
  PipelineInputs in;
  in.mixture = &job.mixture;
  in.trajectory = &job.trajectory;
  in.target_images = job.target ? &*job.target : nullptr;
  in.noise_images = job.noise ? &*job.noise : nullptr;
  in.model = model ? &*model : nullptr;
  return in;
}

void write_dump(const fs::path& dir, const EnhanceResult& r, const PipelineConfig& pc) {
  fs::create_directories(dir);
  write_wav(dir / "beam.wav", istft(r.beam, r.output.size()), pc.stft.sample_rate);
  if (!r.mask.empty()) {
    std::ofstream f(dir / "mask.f32", std::ios::binary | std::ios::trunc);
    for (double v : r.mask.values()) {
      const auto x = static_cast<float>(v);
      f.write(reinterpret_cast<const char*>(&x), sizeof x);
    }
    if (!f) throw IoError("failed writing " + (dir / "mask.f32").string());
  }
  write_json(dir / "dump.json", {{"frames", r.beam.frames()},
                                 {"bins", r.beam.bins()},
                                 {"mask_source", to_string(pc.mask_source)},
                                 {"mask_file", r.mask.empty() ? "" : "mask.f32"},
                                 {"mask_dtype", "float32, frames x bins, row-major"}});
}

Json enhance_resolved(const Settings& s, const PipelineConfig& pc, const EnhanceOptions& o) {
  Json j = base_resolved(s);
  j["mask"] = to_string(pc.mask_source);
  j["normalization"] = to_string(pc.normalization);
  j["reference_mic"] = pc.align_to_mic ? static_cast<int>(*pc.align_to_mic) + 1 : 0;
  const auto w = s.path(o.weights, "weights");
  j["weights"] = w ? w->generic_string() : "";
  j["output_format"] = s.format == SampleFormat::kPcm16 ? "pcm16" : "float32";
  return j;
}

int cmd_enhance(Settings s, const EnhanceOptions& o) {
  if (o.pcm16) s.format = SampleFormat::kPcm16;
  const auto pc = pipeline_config(s, o);
  log_resolved("enhance", enhance_resolved(s, pc, o));
  const auto model = load_model(s, o, pc);

  if (o.manifest) {
    if (!o.out_dir) throw InvalidConfig("--manifest requires --out-dir");
    const fs::path mpath(*o.manifest);
    const auto manifest = read_json(mpath);
    const auto& list = manifest.at("scenarios");
    const fs::path out_dir(*o.out_dir);
    fs::create_directories(out_dir);
    parallel_for(list.size(), s.threads, [&](std::size_t i) {
      const auto& sc = list[i];
      const fs::path dir = mpath.parent_path() / sc.at("dir").get<std::string>();
      const auto job = load_job(s, o, pc, dir);
      auto r = enhance(inputs_for(job, model), pc);
      normalize_output(r.output, pc);
      write_wav(out_dir / (sc.at("id").get<std::string>() + ".wav"), r.output,
                pc.stft.sample_rate, s.format);
    });
    std::printf("enhanced %zu scenarios into %s\n", list.size(), out_dir.string().c_str());
    return kExitOk;
  }

  if (!o.out) throw InvalidConfig("enhance needs --out");
  std::optional<fs::path> scenario;
  if (o.scenario) scenario = fs::path(*o.scenario);
  const auto job = load_job(s, o, pc, scenario);
  auto r = enhance(inputs_for(job, model), pc);
  if (o.dump) write_dump(*o.dump, r, pc);
  normalize_output(r.output, pc);
  write_wav(*o.out, r.output, pc.stft.sample_rate, s.format);
  std::printf("wrote %s (%zu samples)\n", o.out->c_str(), r.output.size());
  return kExitOk;
}

// ---------------------------------------------------------------- stream-bench

std::string cpu_model() {
  std::ifstream f("/proc/cpuinfo");
  std::string line;
  while (std::getline(f, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto pos = line.find(':');
      if (pos != std::string::npos) return line.substr(pos + 2);
    }
  }
  return "unknown";
}

int cmd_stream_bench(Settings s, const EnhanceOptions& o) {
  if (o.pcm16) s.format = SampleFormat::kPcm16;
  const auto pc = pipeline_config(s, o);
  log_resolved("stream-bench", enhance_resolved(s, pc, o));
  if (!o.out) throw InvalidConfig("stream-bench needs --out");
  const auto model = load_model(s, o, pc);
  std::optional<fs::path> scenario;
  if (o.scenario) scenario = fs::path(*o.scenario);
  const auto job = load_job(s, o, pc, scenario);
  const auto in = inputs_for(job, model);

  auto streamed = run_streaming(in, pc);
  const auto batch = enhance(in, pc);
  const bool identical = streamed.output == batch.output;
  normalize_output(streamed.output, pc);
  write_wav(*o.out, streamed.output, pc.stft.sample_rate, s.format);

  const auto& l = streamed.latency;
  std::printf("algorithmic latency : %.1f ms (frame %zu + hop %zu at %.0f Hz)\n", l.algorithmic_ms,
              pc.stft.frame_size, pc.stft.hop_size, pc.stft.sample_rate);
  std::printf("reference figures   : %.0f ms algorithmic, %.0f ms total incl. hardware\n",
              kReferenceAlgorithmicMs, kReferenceTotalMs);
  std::printf("per-hop compute     : p50 %.3f ms, p95 %.3f ms, max %.3f ms (budget %.1f ms)\n",
              l.p50_ms, l.p95_ms, l.max_ms, l.hop_ms);
  std::printf("real-time factor    : %.4f over %zu hops\n", l.real_time_factor, l.hops);
  std::printf("stream == batch     : %s\n", identical ? "yes" : "NO");

  if (o.report) {
    Json report = {{"algorithmic_latency_ms", l.algorithmic_ms},
                   {"reference_algorithmic_latency_ms", kReferenceAlgorithmicMs},
                   {"reference_total_latency_ms", kReferenceTotalMs},
                   {"hop_budget_ms", l.hop_ms},
                   {"hop_compute_ms", {{"p50", l.p50_ms}, {"p95", l.p95_ms}, {"max", l.max_ms}}},
                   {"real_time_factor", l.real_time_factor},
                   {"hops", l.hops},
                   {"real_time", l.p95_ms < l.hop_ms},
                   {"stream_matches_batch", identical},
                   {"mask", to_string(pc.mask_source)},
                   {"machine",
                    {{"cpu", cpu_model()},
                     {"hardware_threads", std::thread::hardware_concurrency()},
                     {"compiler", __VERSION__}}}};
    write_json(*o.report, report);
  }
  if (!identical) throw std::runtime_error("streaming output differs from the batch pipeline");
  return kExitOk;
}

// ---------------------------------------------------------------- calibrate

CalibrationPairs synthetic_pairs(const Settings& s, std::size_t grid) {
  if (grid < 2) throw InvalidConfig("--synthetic needs a grid of at least 2 x 2");
  CalibrationPairs p;
  p.width = s.camera.width;
  p.height = s.camera.height;
  p.tau_max = s.geometry.tau_max(s.stft.sample_rate);
  for (std::size_t iy = 0; iy < grid; ++iy) {
    for (std::size_t ix = 0; ix < grid; ++ix) {
      const Pixel px{1.0 + (s.camera.width - 1.0) * static_cast<double>(ix) / static_cast<double>(grid - 1),
                     1.0 + (s.camera.height - 1.0) * static_cast<double>(iy) / static_cast<double>(grid - 1)};
      p.pairs.push_back(
          {px, tdoa_from_direction(s.geometry, s.camera.back_project(px), s.stft.sample_rate)});
    }
  }
  return p;
}

int cmd_calibrate(const Settings& s, const CalibrateOptions& o) {
  const int degree = s.pick(o.degree, "calibration_degree", 3);
  Json resolved = base_resolved(s);
  resolved["degree"] = degree;
  log_resolved("calibrate", resolved);
  if (!o.out) throw InvalidConfig("calibrate needs --out");
  CalibrationPairs pairs;
  if (o.pairs) {
    pairs = calibration_pairs_from_json(read_json(*o.pairs));
  } else if (o.synthetic) {
    pairs = synthetic_pairs(s, *o.synthetic);
  } else {
    throw InvalidConfig("calibrate needs --pairs or --synthetic");
  }
  if (o.pairs_out) write_json(*o.pairs_out, calibration_pairs_to_json(pairs));
  const auto fit = fit_calibration(pairs.pairs, degree, pairs.width, pairs.height, pairs.tau_max);
  write_json(*o.out, calibration_to_json(fit.map));
  std::printf("degree %d fit over %zu pairs\n", degree, pairs.pairs.size());
  for (std::size_t m = 0; m < fit.residual_rms.size(); ++m) {
    std::printf("mic %zu residual rms %.3e samples\n", m + 1, fit.residual_rms[m]);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const Settings& s, const EvaluateOptions& o) {
  if (!o.manifest || !o.enhanced) throw InvalidConfig("evaluate needs --manifest and --enhanced");
  const int ref = s.pick(o.reference_mic, "reference_mic", 1);
  if (ref < 1) throw InvalidConfig("--reference-mic must be >= 1 for evaluation");
  Json resolved = base_resolved(s);
  resolved["reference_mic"] = ref;
  log_resolved("evaluate", resolved);

  const fs::path mpath(*o.manifest);
  const auto manifest = read_json(mpath);
  const auto& list = manifest.at("scenarios");
  const fs::path enhanced_dir(*o.enhanced);

  std::vector<std::string> missing;
  for (const auto& sc : list) {
    const auto f = enhanced_dir / (sc.at("id").get<std::string>() + ".wav");
    if (!fs::exists(f)) missing.push_back(f.string());
  }
  if (!missing.empty()) {
    for (const auto& m : missing) logger()->error("missing enhanced file {}", m);
    throw InvalidInput(std::to_string(missing.size()) + " enhanced file(s) missing, first: " +
                       missing.front());
  }

  EvalReport report;
  report.rows.resize(list.size());
  const auto ch = static_cast<std::size_t>(ref - 1);
  parallel_for(list.size(), s.threads, [&](std::size_t i) {
    const auto& sc = list[i];
    const fs::path dir = mpath.parent_path() / sc.at("dir").get<std::string>();
    const auto id = sc.at("id").get<std::string>();
    const auto target = read_checked(dir / "target.wav", s);
    const auto mixture = read_checked(dir / "mixture.wav", s);
    const auto enhanced = read_checked(enhanced_dir / (id + ".wav"), s);
    if (ch >= target.num_channels()) throw InvalidConfig("reference microphone out of range");
    auto row = evaluate_signals(target.channels[ch], mixture.channels[ch],
                                enhanced.channels.front(), s.stft.sample_rate);
    row.id = id;
    row.category = sc.at("category").get<std::string>();
    report.rows[i] = row;
  });

  const fs::path csv = o.csv ? fs::path(*o.csv) : enhanced_dir / "eval.csv";
  const fs::path summary = o.summary ? fs::path(*o.summary) : enhanced_dir / "eval_summary.json";
  {
    std::ofstream f(csv, std::ios::trunc);
    f << report.to_csv();
    if (!f) throw IoError("failed writing " + csv.string());
  }
  write_json(summary, report.summary_json());
  const auto all = report.summary();
  std::printf("%zu scenarios: SI-SDR %.2f -> %.2f dB, STOI %.3f -> %.3f\n", all.count,
              all.si_sdr_input, all.si_sdr_output, all.stoi_input, all.stoi_output);
  return kExitOk;
}

void add_enhance_inputs(CLI::App* cmd, EnhanceOptions& o) {
  cmd->add_option("--scenario", o.scenario, "scenario directory written by simulate");
  cmd->add_option("--mixture", o.mixture, "multichannel mixture WAV");
  cmd->add_option("--tdoa", o.tdoa, "per-frame TDoA JSON");
  cmd->add_option("--track", o.track, "pixel track JSON (needs --calibration)");
  cmd->add_option("--calibration", o.calibration, "calibration map JSON");
  cmd->add_option("--target", o.target, "target images WAV (oracle mask)");
  cmd->add_option("--noise", o.noise, "noise images WAV (oracle mask)");
  cmd->add_option("--mask", o.mask, "mask source: oracle, gru or none");
  cmd->add_option("--weights", o.weights, "GRU postfilter weights file");
  cmd->add_option("--normalization", o.normalization, "output normalization: peak or none");
  cmd->add_option("--reference-mic", o.reference_mic,
                  "align output to this microphone (1-based; 0 = array origin)");
  cmd->add_option("--out", o.out, "enhanced output WAV");
  cmd->add_flag("--pcm16", o.pcm16, "write 16-bit PCM instead of 32-bit float");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Multichannel speech enhancement: beamforming and mask postfiltering"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--threads", g.threads, "worker threads for batch commands");
  app.add_flag("-v,--verbose", g.verbose, "debug logging");

  SimulateOptions so;
  auto* sim = app.add_subcommand("simulate", "render random scenarios from speech/noise corpora");
  sim->add_option("--speech-dir", so.speech_dir, "directory of speech WAVs");
  sim->add_option("--noise-dir", so.noise_dir, "directory of noise WAVs");
  sim->add_option("--count", so.count, "number of scenarios");
  sim->add_option("--duration", so.duration, "scenario length in seconds");
  sim->add_option("--out", so.out, "output directory");

  EnhanceOptions eo;
  auto* enh = app.add_subcommand("enhance", "offline enhancement of one mixture or a manifest");
  add_enhance_inputs(enh, eo);
  enh->add_option("--dump", eo.dump, "directory for intermediate beam and mask");
  enh->add_option("--manifest", eo.manifest, "enhance every scenario of a manifest");
  enh->add_option("--out-dir", eo.out_dir, "output directory for --manifest");

  EnhanceOptions bo;
  auto* bench = app.add_subcommand("stream-bench", "hop-by-hop enhancement with latency report");
  add_enhance_inputs(bench, bo);
  bench->add_option("--report", bo.report, "latency report JSON");

  CalibrateOptions co;
  auto* cal = app.add_subcommand("calibrate", "fit the pixel -> TDoA polynomial map");
  cal->add_option("--pairs", co.pairs, "calibration pairs JSON");
  cal->add_option("--synthetic", co.synthetic,
                  "generate an N x N pixel grid of pairs from the geometry and camera");
  cal->add_option("--degree", co.degree, "polynomial degree");
  cal->add_option("--out", co.out, "calibration map JSON");
  cal->add_option("--pairs-out", co.pairs_out, "write the pairs used");

  EvaluateOptions vo;
  auto* eval = app.add_subcommand("evaluate", "SI-SDR / STOI of enhanced files against a manifest");
  eval->add_option("--manifest", vo.manifest, "manifest.json from simulate");
  eval->add_option("--enhanced", vo.enhanced, "directory of <id>.wav enhanced files");
  eval->add_option("--csv", vo.csv, "per-scenario CSV (default <enhanced>/eval.csv)");
  eval->add_option("--summary", vo.summary, "summary JSON (default <enhanced>/eval_summary.json)");
  eval->add_option("--reference-mic", vo.reference_mic, "reference microphone (1-based)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  logger()->set_level(g.verbose ? spdlog::level::debug : spdlog::level::info);
  try {
    const auto settings = resolve_settings(g);
    if (sim->parsed()) return cmd_simulate(settings, so);
    if (enh->parsed()) return cmd_enhance(settings, eo);
    if (bench->parsed()) return cmd_stream_bench(settings, bo);
    if (cal->parsed()) return cmd_calibrate(settings, co);
    if (eval->parsed()) return cmd_evaluate(settings, vo);
    return kExitUsage;
  } catch (const Error& e) {
    logger()->error("{}", e.what());
    return kExitData;
  } catch (const Json::exception& e) {
    logger()->error("malformed JSON: {}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    logger()->critical("internal error: {}", e.what());
    return kExitInternal;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("avse");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());
  argv.push_back(nullptr);
  return run_cli(static_cast<int>(storage.size()), argv.data());
}

}  // namespace avse
