#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "avse/error.hpp"
#include "avse/fft.hpp"
#include "avse/stft.hpp"
#include "oracles.hpp"

using namespace avse;
using Catch::Matchers::WithinAbs;

TEST_CASE("RealFft forward agrees with a direct DFT", "[fft]") {
  for (std::size_t n : {2u, 4u, 12u, 64u, 512u}) {
    const auto x = oracle::white_noise(n, n);
    RealFft fft(n);
    std::vector<Complex> got(fft.bins());
    fft.forward(x, got);
    const auto want = oracle::dft(x);
    for (std::size_t k = 0; k < want.size(); ++k) {
      CHECK(std::abs(got[k] - want[k]) < 1e-10 * std::sqrt(double(n)));
    }
  }
}

TEST_CASE("RealFft inverse is scaled by 1/N", "[fft]") {
  const std::size_t n = 64;
  const auto x = oracle::white_noise(n, 3);
  RealFft fft(n);
  std::vector<Complex> spec(fft.bins());
  std::vector<double> back(n);
  fft.forward(x, spec);
  fft.inverse(spec, back);
  for (std::size_t i = 0; i < n; ++i) CHECK_THAT(back[i], WithinAbs(x[i], 1e-13));

  // single DC bin of value N -> all ones
  std::vector<Complex> dc(fft.bins(), 0.0);
  dc[0] = double(n);
  fft.inverse(dc, back);
  for (double v : back) CHECK_THAT(v, WithinAbs(1.0, 1e-14));
}

TEST_CASE("sine window values and complementarity", "[stft]") {
  const auto w = sine_window(4);
  CHECK_THAT(w[0], WithinAbs(std::sin(M_PI * 0.5 / 4), 1e-15));
  CHECK_THAT(w[3], WithinAbs(std::sin(M_PI * 3.5 / 4), 1e-15));
  for (std::size_t n : {4u, 64u, 512u}) {
    const auto v = sine_window(n);
    for (std::size_t i = 0; i < n / 2; ++i) {
      CHECK_THAT(v[i] * v[i] + v[i + n / 2] * v[i + n / 2], WithinAbs(1.0, 1e-12));
    }
  }
  CHECK_THROWS_AS(sine_window(5), InvalidConfig);
  CHECK_THROWS_AS(sine_window(0), InvalidConfig);
}

TEST_CASE("frame count", "[stft]") {
  StftConfig c;
  CHECK(num_frames(160000, c) == 624);
  CHECK(num_frames(512, c) == 1);
  CHECK(num_frames(767, c) == 1);
  CHECK(num_frames(768, c) == 2);
  CHECK(num_frames(100, c) == 1);
  CHECK_THROWS_AS(stft(std::vector<double>{}, c), InvalidInput);
}

TEST_CASE("config validation", "[stft]") {
  StftConfig c;
  c.hop_size = 128;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = {};
  c.frame_size = 511;
  c.hop_size = 255;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = {};
  c.sample_rate = 0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
}

TEST_CASE("stft frame equals windowed DFT of the frame", "[stft]") {
  StftConfig c{16, 8, 16000.0};
  const auto x = oracle::white_noise(40, 9);
  const auto spec = stft(x, c);
  REQUIRE(spec.frames() == 4);
  REQUIRE(spec.bins() == 9);
  const auto w = sine_window(16);
  for (std::size_t l = 0; l < spec.frames(); ++l) {
    std::vector<double> frame(16);
    for (std::size_t i = 0; i < 16; ++i) frame[i] = x[l * 8 + i] * w[i];
    const auto want = oracle::dft(frame);
    for (std::size_t k = 0; k < 9; ++k) CHECK(std::abs(spec(l, k) - want[k]) < 1e-12);
  }
}

TEST_CASE("round trip reconstructs the fully overlapped region", "[stft]") {
  StftConfig c;
  const auto x = oracle::white_noise(16000 + 77, 11);
  const auto spec = stft(x, c);
  const auto y = istft(spec, x.size());
  REQUIRE(y.size() == x.size());
  const auto r = fully_overlapped_region(spec.frames(), c);
  CHECK(r.begin == 256);
  CHECK(r.end == spec.frames() * 256);
  double err = 0;
  for (std::size_t i = r.begin; i < r.end; ++i) err = std::max(err, std::abs(y[i] - x[i]));
  CHECK(err < 1e-12);
  CHECK(istft(spec).size() == (spec.frames() - 1) * 256 + 512);
  CHECK(fully_overlapped_region(1, c).end == fully_overlapped_region(1, c).begin);
}

TEST_CASE("streaming stft and istft match batch exactly", "[stft][stream]") {
  StftConfig c;
  const auto x = oracle::white_noise(256 * 40, 5);
  const auto spec = stft(x, c);
  StreamingStft s(c);
  std::vector<Complex> frame(c.bins());
  std::size_t l = 0;
  for (std::size_t h = 0; h + 256 <= x.size(); h += 256) {
    const bool ready = s.push(std::span(x).subspan(h, 256), frame);
    CHECK(ready == (h > 0));
    if (ready) {
      REQUIRE(l < spec.frames());
      CHECK(std::equal(frame.begin(), frame.end(), spec.frame(l).begin()));
      ++l;
    }
  }
  CHECK(l == spec.frames());

  StreamingIstft si(c);
  std::vector<double> out;
  for (std::size_t f = 0; f < spec.frames(); ++f) {
    const auto hop = si.push(spec.frame(f));
    out.insert(out.end(), hop.begin(), hop.end());
  }
  const auto tail = si.flush();
  out.insert(out.end(), tail.begin(), tail.end());
  const auto batch = istft(spec);
  REQUIRE(out.size() == batch.size());
  CHECK(out == batch);
}
