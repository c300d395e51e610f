#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "avse/error.hpp"
#include "avse/gru.hpp"
#include "avse/json_io.hpp"
#include "avse/weights_io.hpp"
#include "oracles.hpp"

using namespace avse;
using Catch::Matchers::WithinAbs;

namespace {

struct Golden {
  GruPostfilterWeights weights;
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> masks32;
  std::vector<std::vector<double>> masks64;
};

Golden load_golden() {
  const auto j = read_json(oracle::fixture("gru/golden.json"));
  Golden g;
  g.weights = load_weights(oracle::fixture("gru/" + j.at("weights").get<std::string>()));
  g.raw = j.at("raw_features").get<std::vector<std::vector<double>>>();
  g.masks32 = j.at("masks_torch_float32").get<std::vector<std::vector<double>>>();
  g.masks64 = j.at("masks_torch_float64").get<std::vector<std::vector<double>>>();
  return g;
}

std::vector<std::vector<double>> run(const GruPostfilter& model,
                                     const std::vector<std::vector<double>>& raw) {
  GruState state(model);
  std::vector<std::vector<double>> out;
  std::vector<double> x(model.input_dim());
  for (const auto& r : raw) {
    model.normalize(r, x);
    out.push_back(state.step(x));
  }
  return out;
}

// Uint32 LE header length at byte 8.
std::uint32_t header_len(const std::string& b) {
  std::uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n |= std::uint32_t(std::uint8_t(b[8 + i])) << (8 * i);
  return n;
}

}  // namespace

TEST_CASE("toy weights reproduce PyTorch masks", "[gru][fixture]") {
  const auto g = load_golden();
  CHECK(g.weights.input_dim == 6);
  CHECK(g.weights.hidden_dim == 5);
  CHECK(g.weights.num_layers == 2);
  CHECK(g.weights.output_dim == 3);
  const GruPostfilter model(g.weights);
  const auto got = run(model, g.raw);
  REQUIRE(got.size() == g.masks64.size());
  for (std::size_t l = 0; l < got.size(); ++l) {
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK_THAT(got[l][k], WithinAbs(g.masks64[l][k], 1e-10));
      CHECK_THAT(got[l][k], WithinAbs(g.masks32[l][k], 1e-5));
    }
  }
}

TEST_CASE("toy weights match the plain-loop recurrence", "[gru]") {
  const auto g = load_golden();
  const GruPostfilter model(g.weights);
  std::vector<std::vector<double>> norm;
  for (const auto& r : g.raw) {
    std::vector<double> x(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      x[i] = (r[i] - g.weights.feature_mean[i]) / double(g.weights.feature_std[i]);
    norm.push_back(x);
  }
  const auto want = oracle::gru_forward(g.weights, norm);
  const auto got = run(model, g.raw);
  for (std::size_t l = 0; l < got.size(); ++l)
    for (std::size_t k = 0; k < 3; ++k) CHECK_THAT(got[l][k], WithinAbs(want[l][k], 1e-12));
}

TEST_CASE("zero weights give exactly one half", "[gru]") {
  const GruPostfilter model(GruPostfilterWeights::zeros(10, 8, 2, 4));
  GruState s(model);
  const auto x = oracle::white_noise(10, 1, 5.0);
  for (int i = 0; i < 5; ++i) {
    for (double v : s.step(x)) CHECK(v == 0.5);
  }
  const auto w = GruPostfilterWeights::zeros_for(StftConfig{});
  CHECK(w.input_dim == 514);
  CHECK(w.hidden_dim == 512);
  CHECK(w.output_dim == 257);
  CHECK(w.num_layers == 2);
}

TEST_CASE("reset restores the initial state and inference is causal", "[gru]") {
  const GruPostfilter model(GruPostfilterWeights::random(6, 7, 2, 3, 99));
  std::vector<std::vector<double>> a;
  for (int i = 0; i < 12; ++i) a.push_back(oracle::white_noise(6, 100 + i));
  auto b = a;
  for (int i = 8; i < 12; ++i) b[i] = oracle::white_noise(6, 500 + i, 10.0);
  const auto ya = run(model, a);
  const auto yb = run(model, b);
  for (int i = 0; i < 8; ++i) CHECK(ya[i] == yb[i]);
  CHECK(ya[8] != yb[8]);

  GruState s(model);
  std::vector<double> x(6);
  model.normalize(a[0], x);
  const auto first = s.step(x);
  s.step(x);
  s.reset();
  CHECK(s.step(x) == first);
}

TEST_CASE("batch inference equals the streaming state", "[gru][stream]") {
  const GruPostfilter model(GruPostfilterWeights::random(4, 6, 2, 4, 3));
  TfGrid<double> feats(20, 4);
  auto v = oracle::white_noise(80, 8);
  std::copy(v.begin(), v.end(), feats.values().begin());
  const auto m = gru_infer(feats, model);
  GruState s(model);
  for (std::size_t l = 0; l < 20; ++l) {
    const auto f = feats.frame(l);
    const auto out = s.step(std::vector<double>(f.begin(), f.end()));
    CHECK(std::equal(out.begin(), out.end(), m.frame(l).begin()));
  }
}

TEST_CASE("weights file re-export is byte-identical", "[weights][fixture]") {
  const auto bytes = oracle::read_bytes(oracle::fixture("gru/toy.grupf"));
  REQUIRE(bytes.size() > 12);
  CHECK(std::memcmp(bytes.data(), kWeightsMagic.data(), 8) == 0);
  CHECK(serialize_weights(parse_weights(bytes)) == bytes);
}

TEST_CASE("weights round trip through a file", "[weights]") {
  oracle::TempDir dir("weights");
  const auto w = GruPostfilterWeights::random(10, 6, 3, 5, 17);
  save_weights(w, dir / "w.grupf");
  CHECK(load_weights(dir / "w.grupf") == w);
  CHECK_THROWS_AS(load_weights(dir / "missing.grupf"), Error);
}

TEST_CASE("malformed weights files are rejected", "[weights]") {
  const auto good = serialize_weights(GruPostfilterWeights::random(4, 3, 1, 2, 1));

  auto bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(parse_weights(bad), InvalidWeights);
  bad = good;
  bad[7] = 2;  // version byte
  CHECK_THROWS_AS(parse_weights(bad), InvalidWeights);
  CHECK_THROWS_AS(parse_weights(good.substr(0, 10)), InvalidWeights);
  CHECK_THROWS_AS(parse_weights(good.substr(0, good.size() - 4)), InvalidWeights);
  CHECK_THROWS_AS(parse_weights(good + "xxxx"), InvalidWeights);

  // tamper with a header dimension without changing the header length
  const std::uint32_t hl = header_len(good);
  std::string header = good.substr(12, hl);
  const auto pos = header.find("\"input_dim\":4");
  REQUIRE(pos != std::string::npos);
  bad = good;
  bad[12 + pos + 12] = '5';
  CHECK_THROWS_AS(parse_weights(bad), InvalidWeights);

  // header length pointing past the end
  bad = good;
  bad[11] = char(0x7f);
  CHECK_THROWS_AS(parse_weights(bad), InvalidWeights);

  // std must be positive
  auto w = GruPostfilterWeights::random(4, 3, 1, 2, 1);
  w.feature_std[2] = 0.0f;
  CHECK_THROWS_AS(w.validate(), InvalidWeights);

  // empty header object
  std::string empty(kWeightsMagic.begin(), kWeightsMagic.end());
  empty += std::string("\x02\x00\x00\x00", 4) + "{}";
  CHECK_THROWS_AS(parse_weights(empty), InvalidWeights);
}
