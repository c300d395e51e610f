#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "avse/error.hpp"
#include "avse/scene.hpp"
#include "avse/synth.hpp"
#include "oracles.hpp"

using namespace avse;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ScenarioSpec small_spec() {
  ScenarioSpec s;
  s.id = "unit";
  s.duration_s = 1.0;
  s.snr_db = 3.0;
  s.target.category = "speech";
  s.target.azimuth_deg = 15;
  s.target.elevation_deg = 5;
  s.target.distance_m = 2.0;
  s.target.signal = synth_speech(1.5, 16000, 1);
  SourceSpec i;
  i.category = "noise";
  i.azimuth_deg = -90;
  i.distance_m = 1.5;
  i.gain_db = -3;
  i.offset = 123;
  i.signal = synth_noise(NoiseKind::kPink, 0.7, 16000, 2);
  s.interferers.push_back(i);
  return s;
}

}  // namespace

TEST_CASE("integer fractional delay is an exact shift", "[scene]") {
  const auto x = oracle::white_noise(200, 1);
  const auto y = fractional_delay(x, 7.0);
  REQUIRE(y.size() == x.size());
  for (std::size_t i = 0; i < 7; ++i) CHECK(y[i] == 0.0);
  for (std::size_t i = 7; i < x.size(); ++i) CHECK(y[i] == x[i - 7]);
  CHECK(fractional_delay(x, 0.0) == x);
}

TEST_CASE("fractional delay of a low-frequency tone", "[scene]") {
  std::vector<double> x(4000);
  const double f = 440.0 / 16000.0;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2 * M_PI * f * i);
  for (double d : {0.25, 0.5, 3.7}) {
    const auto y = fractional_delay(x, d);
    double err = 0;
    for (std::size_t i = 100; i < 3900; ++i)
      err = std::max(err, std::abs(y[i] - std::sin(2 * M_PI * f * (i - d))));
    CHECK(err < 2e-3);
  }
}

TEST_CASE("propagation delay and 1/r gain", "[scene]") {
  const auto g = ArrayGeometry::reference();
  std::vector<double> x(3000, 0.0);
  x[100] = 1.0;
  const Vec3 pos{0.3, 0.0, 1.2};
  const auto w = propagate(x, pos, g, 16000);
  REQUIRE(w.num_channels() == 8);
  for (std::size_t m = 0; m < 8; ++m) {
    const auto& p = g.mic_positions()[m];
    const double r = std::hypot(pos[0] - p[0], pos[1] - p[1], pos[2] - p[2]);
    const double delay = r / 343.0 * 16000;
    // centroid of the impulse response and its sum
    double sum = 0, moment = 0;
    for (std::size_t i = 0; i < w.num_samples(); ++i) {
      sum += w.channels[m][i];
      moment += w.channels[m][i] * double(i);
    }
    CHECK_THAT(sum, WithinRel(1.0 / r, 2e-3));
    CHECK_THAT(moment / sum, WithinAbs(100 + delay, 0.05));
  }
  CHECK_THROWS_AS(propagate(x, {0.1, 0, 0.1}, g, 16000), InvalidInput);
}

TEST_CASE("mixing hits the requested SNR on channel 0", "[scene]") {
  MultichannelWave t, n;
  t.channels = {oracle::white_noise(5000, 1, 0.3), oracle::white_noise(5000, 2)};
  n.channels = {oracle::white_noise(5000, 3, 2.0), oracle::white_noise(5000, 4)};
  for (double snr : {0.5, 5.0, 10.0}) {
    const auto mix = mix_at_snr(t, n, snr);
    CHECK_THAT(10 * std::log10(channel_power(mix.target) / channel_power(mix.noise)),
               WithinAbs(snr, 1e-9));
    for (std::size_t m = 0; m < 2; ++m)
      for (std::size_t i = 0; i < 5000; i += 97)
        CHECK(mix.mixture.channels[m][i] == mix.target.channels[m][i] + mix.noise.channels[m][i]);
  }
  MultichannelWave silent = MultichannelWave::zeros(2, 5000, 16000);
  CHECK_THROWS_AS(mix_at_snr(t, silent, 5.0), InvalidInput);
}

TEST_CASE("render produces consistent components and truth", "[scene]") {
  const auto spec = small_spec();
  const auto out = render_scenario(spec);
  REQUIRE(out.mixture.num_channels() == 8);
  REQUIRE(out.mixture.num_samples() == 16000);
  double peak = 0;
  for (std::size_t m = 0; m < 8; ++m) {
    for (std::size_t i = 0; i < 16000; ++i) {
      CHECK(out.mixture.channels[m][i] ==
            out.target_images.channels[m][i] + out.noise_images.channels[m][i]);
      peak = std::max(peak, std::abs(out.mixture.channels[m][i]));
    }
  }
  CHECK_THAT(peak, WithinAbs(0.5, 1e-12));
  CHECK_THAT(10 * std::log10(channel_power(out.target_images) / channel_power(out.noise_images)),
             WithinAbs(3.0, 1e-9));
  CHECK(out.pixel_track.samples.size() == 4);
  CHECK(out.pixel_track.samples[3].time == 0.75);
  CHECK(out.tdoa_truth.num_frames() == num_frames(16000, spec.stft));
  const auto tau = tdoa_from_direction(spec.geometry,
                                       direction_from_angles(15 * M_PI / 180, 5 * M_PI / 180),
                                       16000);
  for (std::size_t m = 0; m < 8; ++m) CHECK_THAT(out.tdoa_truth.at(0)[m], WithinAbs(tau[m], 1e-12));
  // pixel of the target lies right of centre and above it
  CHECK(out.pixel_track.samples[0].u > 320.5);
  CHECK(out.pixel_track.samples[0].v < 240.5);
  CHECK(out.metadata.at("num_samples") == 16000);
}

TEST_CASE("scenario validation", "[scene]") {
  auto s = small_spec();
  s.snr_db = 12;
  CHECK_THROWS_AS(s.validate(), InvalidConfig);
  s = small_spec();
  s.interferers.clear();
  CHECK_THROWS_AS(s.validate(), InvalidConfig);
  s = small_spec();
  s.target.azimuth_deg = 50;
  CHECK_THROWS_AS(s.validate(), InvalidConfig);
  s = small_spec();
  s.target.distance_m = 0.2;
  CHECK_THROWS_AS(s.validate(), InvalidConfig);
  CHECK(small_spec().interference_category() == "mixed");
}

TEST_CASE("batch generation respects the scenario constraints", "[scene]") {
  oracle::TempDir dir("batch");
  oracle::write_corpus(dir.path(), 6, 4, 2.0, 3);
  Corpus corpus{list_wavs(dir / "speech"), list_wavs(dir / "noise")};
  BatchConfig cfg;
  cfg.count = 40;
  cfg.duration_s = 1.0;
  const auto a = generate_batch(corpus, cfg, 11);
  const auto b = generate_batch(corpus, cfg, 11);
  REQUIRE(a.size() == 40);
  std::set<std::string> categories;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto& s = a[k];
    CHECK(scenario_to_json(s) == scenario_to_json(b[k]));
    CHECK_NOTHROW(s.validate());
    CHECK(s.snr_db >= 0.5);
    CHECK(s.snr_db <= 10.0);
    CHECK(s.interferers.size() >= 1);
    CHECK(s.interferers.size() <= 3);
    CHECK(std::abs(s.target.azimuth_deg) <= 40.0);
    CHECK(std::abs(s.target.elevation_deg) <= 10.0);
    CHECK(s.target.distance_m >= 1.0);
    CHECK(s.target.distance_m <= 3.0);
    CHECK(s.target.category == "speech");
    const Vec3 tp = s.target.position();
    for (const auto& i : s.interferers) {
      CHECK(i.file != s.target.file);
      const Vec3 ip = i.position();
      const double cosang = dot(tp, ip) / (norm(tp) * norm(ip));
      CHECK(std::acos(std::clamp(cosang, -1.0, 1.0)) * 180 / M_PI >= 20.0 - 1e-9);
      CHECK(i.gain_db >= -6.0);
      CHECK(i.gain_db <= 0.0);
    }
    categories.insert(s.interference_category());
  }
  CHECK(categories.size() == 2);
  CHECK(a[0].id == "scenario_0000");
  CHECK(scenario_to_json(generate_batch(corpus, cfg, 12)[0]) != scenario_to_json(a[0]));

  // json round trip keeps the scenario
  const auto back = scenario_from_json(scenario_to_json(a[3]), cfg.geometry, cfg.camera, cfg.stft);
  CHECK(scenario_to_json(back) == scenario_to_json(a[3]));

  // rendering from files works and is deterministic
  CHECK(render_scenario(a[0]).mixture == render_scenario(a[0]).mixture);

  CHECK_THROWS_AS(list_wavs(dir / "nothing"), InvalidInput);
  CHECK_THROWS_AS(generate_batch(Corpus{}, cfg, 1), InvalidInput);
}

TEST_CASE("synthetic signals are deterministic and peak-normalized", "[scene][synth]") {
  const auto s = synth_speech(1.0, 16000, 5);
  CHECK(s == synth_speech(1.0, 16000, 5));
  CHECK(s != synth_speech(1.0, 16000, 6));
  double p = 0;
  for (double v : s) p = std::max(p, std::abs(v));
  CHECK_THAT(p, WithinAbs(0.5, 1e-12));
  for (auto k : {"white", "pink", "brown", "babble"}) {
    const auto n = synth_noise(noise_kind_from_string(k), 0.5, 16000, 1);
    CHECK(n.size() == 8000);
    CHECK(to_string(noise_kind_from_string(k)) == k);
  }
  CHECK_THROWS_AS(noise_kind_from_string("purple"), InvalidConfig);
}
