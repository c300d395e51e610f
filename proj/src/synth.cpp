#include "avse/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "avse/error.hpp"
#include "avse/random.hpp"

namespace avse {

namespace {

constexpr double kPi = std::numbers::pi;

// Two-pole resonator, unity gain at the centre frequency (approximately).
struct Resonator {
  double a1 = 0.0, a2 = 0.0, g = 0.0;
  double y1 = 0.0, y2 = 0.0;

  void set(double freq, double bandwidth, double rate) {
    const double r = std::exp(-kPi * bandwidth / rate);
    a1 = 2.0 * r * std::cos(2.0 * kPi * freq / rate);
    a2 = -r * r;
    g = 1.0 - r;
  }
  double tick(double x) {
    const double y = g * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

struct Vowel {
  double f1, f2, f3;
};

constexpr std::array<Vowel, 8> kVowels = {{{730, 1090, 2440},
                                          {270, 2290, 3010},
                                          {300, 870, 2240},
                                          {530, 1840, 2480},
                                          {570, 840, 2410},
                                          {660, 1720, 2410},
                                          {440, 1020, 2240},
                                          {490, 1350, 1690}}};

void peak_normalize(std::vector<double>& x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0) {
    for (auto& v : x) v *= peak / m;
  }
}

}  // namespace

std::vector<double> synth_speech(double seconds, double sample_rate, std::uint64_t seed) {
  if (!(seconds > 0.0) || !(sample_rate > 0.0)) {
    throw InvalidConfig("synth_speech needs positive duration and rate");
  }
  const auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  std::vector<double> out(n, 0.0);
  Rng rng(seed);
  const double base_f0 = rng.uniform(90.0, 220.0);

  std::array<Resonator, 3> formants;
  Resonator fricative;
  double phase = 0.0;
  std::size_t pos = static_cast<std::size_t>(rng.uniform(0.0, 0.2) * sample_rate);
  while (pos < n) {
    const bool voiced = rng.uniform() < 0.8;
    const auto len = static_cast<std::size_t>(
        (voiced ? rng.uniform(0.12, 0.35) : rng.uniform(0.06, 0.15)) * sample_rate);
    const double level = rng.uniform(0.4, 1.0);
    const Vowel& a = kVowels[rng.index(kVowels.size())];
    const Vowel& b = kVowels[rng.index(kVowels.size())];
    const double f0_start = base_f0 * rng.uniform(0.85, 1.2);
    const double f0_end = base_f0 * rng.uniform(0.8, 1.15);
    fricative.set(rng.uniform(3000.0, 6000.0), 1500.0, sample_rate);

    for (std::size_t i = 0; i < len && pos + i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(len);
      const double env = std::sin(kPi * t);
      double s;
      if (voiced) {
        if (i % 64 == 0) {
          formants[0].set(a.f1 + (b.f1 - a.f1) * t, 80.0, sample_rate);
          formants[1].set(a.f2 + (b.f2 - a.f2) * t, 100.0, sample_rate);
          formants[2].set(a.f3 + (b.f3 - a.f3) * t, 150.0, sample_rate);
        }
        const double f0 = f0_start + (f0_end - f0_start) * t;
        phase += f0 / sample_rate;
        phase -= std::floor(phase);
        // band-limited-ish glottal source: sawtooth with a little aspiration
        const double source = (1.0 - 2.0 * phase) + 0.05 * rng.normal();
        s = 0.5 * formants[0].tick(source) + 0.35 * formants[1].tick(source) +
            0.15 * formants[2].tick(source);
      } else {
        s = 0.5 * fricative.tick(rng.normal());
      }
      out[pos + i] += level * env * s;
    }
    pos += len;
    // gaps between syllables, with occasional longer pauses
    const double gap = rng.uniform() < 0.15 ? rng.uniform(0.3, 0.7) : rng.uniform(0.02, 0.12);
    pos += static_cast<std::size_t>(gap * sample_rate);
  }
  peak_normalize(out, 0.5);
  return out;
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "white") return NoiseKind::kWhite;
  if (name == "pink") return NoiseKind::kPink;
  if (name == "brown") return NoiseKind::kBrown;
  if (name == "babble") return NoiseKind::kBabble;
  throw InvalidConfig("unknown noise kind '" + name + "' (white, pink, brown, babble)");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kPink: return "pink";
    case NoiseKind::kBrown: return "brown";
    case NoiseKind::kBabble: return "babble";
  }
  return "white";
}

std::vector<double> synth_noise(NoiseKind kind, double seconds, double sample_rate,
                                std::uint64_t seed) {
  if (!(seconds > 0.0) || !(sample_rate > 0.0)) {
    throw InvalidConfig("synth_noise needs positive duration and rate");
  }
  const auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  std::vector<double> out(n, 0.0);
  Rng rng(seed);
  switch (kind) {
    case NoiseKind::kWhite:
      for (auto& v : out) v = rng.normal();
      break;
    case NoiseKind::kPink: {
      // Kellet's refined pink filter
      double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
      for (auto& v : out) {
        const double w = rng.normal();
        b0 = 0.99886 * b0 + w * 0.0555179;
        b1 = 0.99332 * b1 + w * 0.0750759;
        b2 = 0.96900 * b2 + w * 0.1538520;
        b3 = 0.86650 * b3 + w * 0.3104856;
        b4 = 0.55000 * b4 + w * 0.5329522;
        b5 = -0.7616 * b5 - w * 0.0168980;
        v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
        b6 = w * 0.115926;
      }
      break;
    }
    case NoiseKind::kBrown: {
      double acc = 0.0;
      for (auto& v : out) {
        acc = 0.995 * acc + 0.1 * rng.normal();
        v = acc;
      }
      break;
    }
    case NoiseKind::kBabble:
      for (std::uint64_t talker = 0; talker < 6; ++talker) {
        const auto s = synth_speech(seconds, sample_rate, Rng::derive_seed(seed, talker));
        for (std::size_t i = 0; i < n; ++i) out[i] += s[i];
      }
      break;
  }
  peak_normalize(out, 0.5);
  return out;
}

}  // namespace avse
