// Free-field scenario simulator: direct-path propagation to the array,
// SNR-controlled mixing, camera projection of the target, and batch
// generation of random scenarios from speech/noise corpora.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "avse/calibration.hpp"
#include "avse/geometry.hpp"
#include "avse/json_io.hpp"
#include "avse/stft.hpp"
#include "avse/wave.hpp"

namespace avse {

inline constexpr double kMinSourceDistance = 0.3;  // meters
inline constexpr int kFractionalDelayTaps = 64;

// 64-tap Blackman-windowed sinc fractional delay, 1/r amplitude with r_ref = 1 m.
// Channel m is the signal delayed by |position - p_m| / c and trimmed to the
// input length. Throws InvalidInput for sources closer than 0.3 m.
MultichannelWave propagate(std::span<const double> signal, const Vec3& position,
                           const ArrayGeometry& geometry, double sample_rate);

// Delays `signal` by `delay` samples (>= 0) with the fractional-delay filter.
std::vector<double> fractional_delay(std::span<const double> signal, double delay);

struct MixResult {
  MultichannelWave mixture;
  MultichannelWave target;
  MultichannelWave noise;
  double noise_scale = 1.0;
};

// Mean power over channel 0 (microphone 1).
double channel_power(const MultichannelWave& wave, std::size_t channel = 0);

// Scales the noise so 10 log10(P_target / P_noise) == snr_db on channel 0.
MixResult mix_at_snr(const MultichannelWave& target, const MultichannelWave& noise,
                     double snr_db);

struct SourceSpec {
  std::string file;           // corpus file (informational when `signal` is set)
  std::string category;       // "speech" or "noise"
  std::size_t offset = 0;     // start sample within the file; the file repeats cyclically
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double distance_m = 1.5;
  double gain_db = 0.0;
  std::vector<double> signal;  // loaded samples; read from `file` when empty

  Vec3 position() const;
};

struct ScenarioSpec {
  std::string id = "scenario";
  std::uint64_t seed = 0;
  SourceSpec target;
  std::vector<SourceSpec> interferers;
  double snr_db = 5.0;
  double duration_s = 10.0;
  double fov_half_deg = 40.0;  // target azimuth limit
  double track_rate = 4.0;     // Hz
  ArrayGeometry geometry = ArrayGeometry::reference();
  PinholeCamera camera;
  StftConfig stft;

  // Throws InvalidConfig on count/SNR/FOV/distance violations.
  void validate() const;
  // "speech" if every interferer is speech, otherwise "mixed".
  std::string interference_category() const;
};

struct ScenarioOutput {
  MultichannelWave mixture;
  MultichannelWave target_images;
  MultichannelWave noise_images;
  PixelTrack pixel_track;
  TdoaTrajectory tdoa_truth;
  Json metadata;
};

ScenarioOutput render_scenario(const ScenarioSpec& spec);

struct Corpus {
  std::vector<std::filesystem::path> speech;
  std::vector<std::filesystem::path> noise;
};

// Sorted *.wav files of a directory. Throws InvalidInput naming the directory
// when it is missing or holds no WAV files.
std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& dir);

struct BatchConfig {
  std::size_t count = 100;
  double duration_s = 10.0;
  double snr_min_db = 0.5;
  double snr_max_db = 10.0;
  std::size_t min_interferers = 1;
  std::size_t max_interferers = 3;
  double fov_half_deg = 40.0;
  double elevation_max_deg = 10.0;
  double distance_min_m = 1.0;
  double distance_max_m = 3.0;
  double interferer_gain_min_db = -6.0;
  double interferer_gain_max_db = 0.0;
  double min_separation_deg = 20.0;  // angle between target and any interferer
  ArrayGeometry geometry = ArrayGeometry::reference();
  PinholeCamera camera;
  StftConfig stft;
};

// Scenario k draws from Rng(derive_seed(seed, k)). Signals are left unloaded;
// render_scenario reads them from the corpus files. Throws InvalidInput for an
// empty speech corpus or when the corpora are too small to keep target and
// interferer files distinct.
std::vector<ScenarioSpec> generate_batch(const Corpus& corpus, const BatchConfig& config,
                                         std::uint64_t seed);

Json scenario_to_json(const ScenarioSpec& spec);
// Signals are not loaded.
ScenarioSpec scenario_from_json(const Json& j, const ArrayGeometry& geometry,
                                const PinholeCamera& camera, const StftConfig& stft);

Json camera_to_json(const PinholeCamera& camera);
PinholeCamera camera_from_json(const Json& j);
Json stft_to_json(const StftConfig& config);
StftConfig stft_from_json(const Json& j);

}  // namespace avse
