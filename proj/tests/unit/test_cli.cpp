#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "avse/cli.hpp"
#include "avse/json_io.hpp"
#include "avse/wave.hpp"
#include "avse/weights_io.hpp"
#include "oracles.hpp"

using namespace avse;
namespace fs = std::filesystem;

TEST_CASE("usage errors exit with 1", "[cli]") {
  CHECK(run_cli(std::vector<std::string>{}) == kExitUsage);
  CHECK(run_cli({"frobnicate"}) == kExitUsage);
  CHECK(run_cli({"enhance", "--no-such-flag"}) == kExitUsage);
  CHECK(run_cli({"--help"}) == kExitOk);
}

TEST_CASE("data errors exit with 2", "[cli]") {
  oracle::TempDir dir("cli_err");
  CHECK(run_cli({"enhance", "--mixture", (dir / "nope.wav").string(), "--tdoa",
                 (dir / "t.json").string(), "--out", (dir / "o.wav").string()}) == kExitData);
  CHECK(run_cli({"enhance", "--mask", "magic", "--out", "x.wav"}) == kExitData);
  CHECK(run_cli({"--config", (dir / "missing.json").string(), "calibrate"}) == kExitData);
  {
    std::ofstream f(dir / "bad.json");
    f << "{ not json";
  }
  CHECK(run_cli({"--config", (dir / "bad.json").string(), "calibrate"}) == kExitData);
  CHECK(run_cli({"calibrate", "--synthetic", "2", "--degree", "3", "--out",
                 (dir / "c.json").string()}) == kExitData);
  CHECK(run_cli({"simulate", "--speech-dir", (dir / "none").string(), "--out",
                 (dir / "sim").string()}) == kExitData);
}

TEST_CASE("simulate, enhance, evaluate and calibrate end to end", "[cli]") {
  oracle::TempDir dir("cli_e2e");
  oracle::write_corpus(dir / "corpus", 4, 2, 2.0, 1);
  const auto sim = (dir / "sim").string();
  REQUIRE(run_cli({"--seed", "3", "--threads", "2", "simulate", "--speech-dir",
                   (dir / "corpus/speech").string(), "--noise-dir",
                   (dir / "corpus/noise").string(), "--count", "3", "--duration", "1.5", "--out",
                   sim}) == kExitOk);
  const auto manifest = read_json(dir / "sim/manifest.json");
  REQUIRE(manifest.at("scenarios").size() == 3);
  const auto sc0 = dir / "sim/scenarios/scenario_0000";
  for (auto f : {"mixture.wav", "target.wav", "noise.wav", "track.json", "tdoa.json", "meta.json"})
    CHECK(fs::exists(sc0 / f));
  CHECK(read_wav(sc0 / "mixture.wav").num_channels() == 8);

  REQUIRE(run_cli({"--threads", "2", "enhance", "--mask", "oracle", "--manifest",
                   (dir / "sim/manifest.json").string(), "--out-dir",
                   (dir / "enh").string()}) == kExitOk);
  REQUIRE(run_cli({"evaluate", "--manifest", (dir / "sim/manifest.json").string(), "--enhanced",
                   (dir / "enh").string()}) == kExitOk);
  const auto summary = read_json(dir / "enh/eval_summary.json");
  CHECK(summary.at("all").at("count") == 3);

  fs::remove(dir / "enh/scenario_0001.wav");
  CHECK(run_cli({"evaluate", "--manifest", (dir / "sim/manifest.json").string(), "--enhanced",
                 (dir / "enh").string()}) == kExitData);

  // calibration from synthetic pairs, then enhancement from the pixel track
  REQUIRE(run_cli({"calibrate", "--synthetic", "9", "--out", (dir / "cal.json").string(),
                   "--pairs-out", (dir / "pairs.json").string()}) == kExitOk);
  REQUIRE(run_cli({"calibrate", "--pairs", (dir / "pairs.json").string(), "--degree", "2",
                   "--out", (dir / "cal2.json").string()}) == kExitOk);
  CHECK(read_json(dir / "cal2.json").at("degree") == 2);
  REQUIRE(run_cli({"enhance", "--mixture", (sc0 / "mixture.wav").string(), "--track",
                   (sc0 / "track.json").string(), "--calibration", (dir / "cal.json").string(),
                   "--pcm16", "--out", (dir / "track.wav").string(), "--dump",
                   (dir / "dump").string()}) == kExitOk);
  CHECK(fs::exists(dir / "dump/beam.wav"));
  CHECK(read_wav(dir / "track.wav").num_samples() == 24000);

  // gru mode through a config file with relative paths
  save_weights(GruPostfilterWeights::random(514, 8, 2, 257, 1), dir / "w.grupf");
  write_json(dir / "cfg.json", {{"mask", "gru"}, {"weights", "w.grupf"}, {"reference_mic", 2}});
  REQUIRE(run_cli({"--config", (dir / "cfg.json").string(), "stream-bench", "--scenario",
                   sc0.string(), "--out", (dir / "s.wav").string(), "--report",
                   (dir / "r.json").string()}) == kExitOk);
  const auto report = read_json(dir / "r.json");
  CHECK(report.at("algorithmic_latency_ms") == 48.0);
  CHECK(report.at("stream_matches_batch") == true);
  CHECK(report.at("mask") == "gru");

  // gru mode without weights is a configuration error
  CHECK(run_cli({"enhance", "--scenario", sc0.string(), "--mask", "gru", "--out",
                 (dir / "g.wav").string()}) == kExitData);
}
