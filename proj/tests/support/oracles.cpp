#include "oracles.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "avse/synth.hpp"
#include "avse/wave.hpp"

namespace oracle {

namespace fs = std::filesystem;

fs::path fixture(const std::string& relative) { return fs::path(AVSE_FIXTURE_DIR) / relative; }

std::vector<Complex> dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<Complex> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    long double re = 0, im = 0;
    for (std::size_t t = 0; t < n; ++t) {
      // reduce k*t mod n first so the angle stays small
      const long double a = -2.0L * M_PIl * static_cast<long double>((k * t) % n) / n;
      re += x[t] * std::cos(a);
      im += x[t] * std::sin(a);
    }
    out[k] = {static_cast<double>(re), static_cast<double>(im)};
  }
  return out;
}

namespace {
double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

std::vector<std::vector<double>> gru_forward(const avse::GruPostfilterWeights& w,
                                             const std::vector<std::vector<double>>& inputs) {
  const std::size_t h = w.hidden_dim;
  std::vector<std::vector<double>> state(w.num_layers, std::vector<double>(h, 0.0));
  std::vector<std::vector<double>> out;
  for (const auto& frame : inputs) {
    std::vector<double> x = frame;
    for (std::size_t layer = 0; layer < w.num_layers; ++layer) {
      const auto& L = w.layers[layer];
      const std::size_t in = x.size();
      auto& hp = state[layer];
      std::vector<double> hn(h);
      for (std::size_t i = 0; i < h; ++i) {
        double gi[3], gh[3];
        for (int g = 0; g < 3; ++g) {
          const std::size_t row = g * h + i;
          double a = L.bias_ih[row], b = L.bias_hh[row];
          for (std::size_t j = 0; j < in; ++j) a += double(L.weight_ih[row * in + j]) * x[j];
          for (std::size_t j = 0; j < h; ++j) b += double(L.weight_hh[row * h + j]) * hp[j];
          gi[g] = a;
          gh[g] = b;
        }
        const double r = sigm(gi[0] + gh[0]);
        const double z = sigm(gi[1] + gh[1]);
        const double nn = std::tanh(gi[2] + r * gh[2]);
        hn[i] = (1.0 - z) * nn + z * hp[i];
      }
      hp = hn;
      x = hn;
    }
    std::vector<double> y(w.output_dim);
    for (std::size_t o = 0; o < w.output_dim; ++o) {
      double a = w.head_bias[o];
      for (std::size_t j = 0; j < h; ++j) a += double(w.head_weight[o * h + j]) * x[j];
      y[o] = sigm(a);
    }
    out.push_back(y);
  }
  return out;
}

std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double scale) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> x(n);
  for (auto& v : x) v = d(eng);
  return x;
}

double energy(const std::vector<double>& x, std::size_t begin, std::size_t end) {
  long double e = 0;
  for (std::size_t i = begin; i < end; ++i) e += static_cast<long double>(x[i]) * x[i];
  return static_cast<double>(e);
}

std::string read_bytes(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  path_ = fs::temp_directory_path() /
          ("avse_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_corpus(const fs::path& dir, std::size_t speech, std::size_t noise, double seconds,
                  std::uint64_t seed) {
  fs::create_directories(dir / "speech");
  fs::create_directories(dir / "noise");
  const avse::NoiseKind kinds[] = {avse::NoiseKind::kWhite, avse::NoiseKind::kPink,
                                   avse::NoiseKind::kBrown, avse::NoiseKind::kBabble};
  for (std::size_t i = 0; i < speech; ++i) {
    avse::write_wav(dir / "speech" / ("s" + std::to_string(100 + i) + ".wav"),
                    avse::synth_speech(seconds, 16000.0, seed * 1000 + i), 16000.0);
  }
  for (std::size_t i = 0; i < noise; ++i) {
    avse::write_wav(dir / "noise" / ("n" + std::to_string(100 + i) + ".wav"),
                    avse::synth_noise(kinds[i % 4], seconds, 16000.0, seed * 1000 + 500 + i),
                    16000.0);
  }
}

}  // namespace oracle
