#include "avse/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "avse/error.hpp"
#include "avse/fft.hpp"

namespace avse {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

constexpr double kStoiRate = 10000.0;
constexpr std::size_t kStoiFrame = 256;
constexpr std::size_t kStoiHop = 128;
constexpr std::size_t kStoiFft = 512;
constexpr std::size_t kStoiBands = 15;
constexpr double kStoiMinFreq = 150.0;
constexpr std::size_t kStoiSegment = 30;
constexpr double kStoiBeta = -15.0;
constexpr double kStoiDynRange = 40.0;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

// Hann window without its zero end points (MATLAB hanning(n)).
std::vector<double> hanning_inner(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i + 1) / static_cast<double>(n + 1));
  }
  return w;
}

std::size_t num_stoi_frames(std::size_t len) {
  // frames start at 0, hop, ... strictly below len - frame
  if (len <= kStoiFrame) return 0;
  return (len - kStoiFrame - 1) / kStoiHop + 1;
}

void remove_silent_frames(std::vector<double>& x, std::vector<double>& y) {
  const auto w = hanning_inner(kStoiFrame);
  const std::size_t frames = num_stoi_frames(x.size());
  std::vector<double> energy(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < kStoiFrame; ++i) {
      const double v = w[i] * x[f * kStoiHop + i];
      acc += v * v;
    }
    energy[f] = 20.0 * std::log10(std::sqrt(acc) + kEps);
  }
  const double top = frames ? *std::max_element(energy.begin(), energy.end()) : 0.0;
  std::vector<std::size_t> keep;
  for (std::size_t f = 0; f < frames; ++f) {
    if (top - kStoiDynRange - energy[f] < 0.0) keep.push_back(f);
  }
  if (keep.empty()) throw InsufficientSignal("STOI: reference has no active frames");
  const std::size_t out_len = (keep.size() - 1) * kStoiHop + kStoiFrame;
  std::vector<double> xs(out_len, 0.0), ys(out_len, 0.0);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const std::size_t src = keep[k] * kStoiHop;
    const std::size_t dst = k * kStoiHop;
    for (std::size_t i = 0; i < kStoiFrame; ++i) {
      xs[dst + i] += w[i] * x[src + i];
      ys[dst + i] += w[i] * y[src + i];
    }
  }
  x = std::move(xs);
  y = std::move(ys);
}

// frames x bins power spectrum |X|^2 of Hann-windowed 256-sample frames.
std::vector<std::vector<double>> stoi_power_spectrum(const std::vector<double>& x) {
  const auto w = hanning_inner(kStoiFrame);
  RealFft fft(kStoiFft);
  std::vector<double> buf(kStoiFft, 0.0);
  std::vector<Complex> spec(kStoiFft / 2 + 1);
  std::vector<std::vector<double>> out;
  const std::size_t frames = num_stoi_frames(x.size());
  for (std::size_t f = 0; f < frames; ++f) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (std::size_t i = 0; i < kStoiFrame; ++i) buf[i] = w[i] * x[f * kStoiHop + i];
    fft.forward(buf, spec);
    std::vector<double> p(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) p[k] = std::norm(spec[k]);
    out.push_back(std::move(p));
  }
  return out;
}

// [first, last) FFT bin of each third-octave band.
std::array<std::pair<std::size_t, std::size_t>, kStoiBands> third_octave_bands() {
  const std::size_t bins = kStoiFft / 2 + 1;
  auto nearest = [&](double freq) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < bins; ++i) {
      const double f = kStoiRate * static_cast<double>(i) / static_cast<double>(kStoiFft);
      const double d = (f - freq) * (f - freq);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  std::array<std::pair<std::size_t, std::size_t>, kStoiBands> bands{};
  for (std::size_t b = 0; b < kStoiBands; ++b) {
    const double k = static_cast<double>(b);
    bands[b] = {nearest(kStoiMinFreq * std::pow(2.0, (2.0 * k - 1.0) / 6.0)),
                nearest(kStoiMinFreq * std::pow(2.0, (2.0 * k + 1.0) / 6.0))};
  }
  return bands;
}

double l2(const std::array<double, kStoiSegment>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

double si_sdr(std::span<const double> estimate, std::span<const double> reference) {
  if (estimate.size() != reference.size()) {
    throw InvalidInput("SI-SDR: estimate has " + std::to_string(estimate.size()) +
                       " samples, reference " + std::to_string(reference.size()));
  }
  double er = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    er += estimate[i] * reference[i];
    rr += reference[i] * reference[i];
  }
  if (!(rr > 0.0)) throw InvalidInput("SI-SDR: reference signal is all zeros");
  const double alpha = er / rr;
  double target = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double t = alpha * reference[i];
    const double e = t - estimate[i];
    target += t * t;
    noise += e * e;
  }
  // no projection onto the reference (includes an all-zero estimate)
  if (target == 0.0) return -kSiSdrCapDb;
  if (noise == 0.0) return kSiSdrCapDb;
  return std::clamp(10.0 * std::log10(target / noise), -kSiSdrCapDb, kSiSdrCapDb);
}

std::vector<double> resampling_filter(std::size_t up, std::size_t down) {
  const std::size_t g = std::gcd(up, down);
  up /= g;
  down /= g;
  const double rejection_db = 60.0;
  const double stopband = 1.0 / (2.0 * static_cast<double>(std::max(up, down)));
  const double roll_off = stopband / 10.0;
  const auto half = static_cast<std::ptrdiff_t>(std::ceil((rejection_db - 8.0) / (28.714 * roll_off)));
  const double beta = 0.1102 * (rejection_db - 8.7);
  const double len = static_cast<double>(2 * half + 1);
  std::vector<double> h;
  h.reserve(static_cast<std::size_t>(2 * half + 1));
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  for (std::ptrdiff_t t = -half; t <= half; ++t) {
    const double n = static_cast<double>(t + half);
    const double r = 2.0 * n / (len - 1.0) - 1.0;
    const double kaiser = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h.push_back(kaiser * 2.0 * static_cast<double>(up) * stopband *
                sinc(2.0 * stopband * static_cast<double>(t)));
  }
  const double sum = std::accumulate(h.begin(), h.end(), 0.0);
  for (auto& v : h) v = v / sum * static_cast<double>(up);
  return h;
}

std::vector<double> resample_poly(std::span<const double> x, std::size_t up, std::size_t down,
                                  std::span<const double> h) {
  if (h.size() % 2 == 0) throw InvalidInput("resampling filter must have odd length");
  if (up == 0 || down == 0) throw InvalidInput("resampling factors must be positive");
  const std::size_t n_out = (x.size() * up + down - 1) / down;
  const auto half = static_cast<std::ptrdiff_t>((h.size() - 1) / 2);
  const auto taps = static_cast<std::ptrdiff_t>(h.size());
  const auto u = static_cast<std::ptrdiff_t>(up);
  const auto n_in = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> y(n_out, 0.0);
  for (std::size_t n = 0; n < n_out; ++n) {
    const std::ptrdiff_t centre = static_cast<std::ptrdiff_t>(n * down) + half;
    // taps with 0 <= centre - j*up < taps
    std::ptrdiff_t j_lo = centre - taps + 1 <= 0 ? 0 : (centre - taps + 1 + u - 1) / u;
    std::ptrdiff_t j_hi = std::min(centre / u, n_in - 1);
    double acc = 0.0;
    for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) acc += h[static_cast<std::size_t>(centre - j * u)] * x[static_cast<std::size_t>(j)];
    y[n] = acc;
  }
  return y;
}

double stoi(std::span<const double> estimate, std::span<const double> reference,
            double sample_rate) {
  if (estimate.size() != reference.size()) {
    throw InvalidInput("STOI: estimate has " + std::to_string(estimate.size()) +
                       " samples, reference " + std::to_string(reference.size()));
  }
  std::vector<double> x(reference.begin(), reference.end());
  std::vector<double> y(estimate.begin(), estimate.end());
  if (sample_rate != kStoiRate) {
    const auto rate = static_cast<std::size_t>(std::llround(sample_rate));
    const auto target = static_cast<std::size_t>(kStoiRate);
    if (static_cast<double>(rate) != sample_rate) throw InvalidInput("STOI needs an integer sample rate");
    const std::size_t g = std::gcd(target, rate);
    const auto h = resampling_filter(target / g, rate / g);
    x = resample_poly(x, target / g, rate / g, h);
    y = resample_poly(y, target / g, rate / g, h);
  }
  remove_silent_frames(x, y);
  const auto xp = stoi_power_spectrum(x);
  const auto yp = stoi_power_spectrum(y);
  const std::size_t frames = xp.size();
  if (frames < kStoiSegment) {
    throw InsufficientSignal("STOI: " + std::to_string(frames) +
                             " frames after silence removal, need at least 30 (384 ms)");
  }
  const auto bands = third_octave_bands();
  std::vector<std::array<double, kStoiBands>> xb(frames), yb(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t b = 0; b < kStoiBands; ++b) {
      double sx = 0.0, sy = 0.0;
      for (std::size_t k = bands[b].first; k < bands[b].second; ++k) {
        sx += xp[f][k];
        sy += yp[f][k];
      }
      xb[f][b] = std::sqrt(sx);
      yb[f][b] = std::sqrt(sy);
    }
  }
  const double clip = std::pow(10.0, -kStoiBeta / 20.0);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t m = kStoiSegment; m <= frames; ++m) {
    for (std::size_t b = 0; b < kStoiBands; ++b) {
      std::array<double, kStoiSegment> xs, ys;
      for (std::size_t i = 0; i < kStoiSegment; ++i) {
        xs[i] = xb[m - kStoiSegment + i][b];
        ys[i] = yb[m - kStoiSegment + i][b];
      }
      const double alpha = l2(xs) / (l2(ys) + kEps);
      for (std::size_t i = 0; i < kStoiSegment; ++i) {
        ys[i] = std::min(ys[i] * alpha, xs[i] * (1.0 + clip));
      }
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / kStoiSegment;
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / kStoiSegment;
      for (std::size_t i = 0; i < kStoiSegment; ++i) {
        xs[i] -= mx;
        ys[i] -= my;
      }
      const double nx = l2(xs) + kEps;
      const double ny = l2(ys) + kEps;
      double corr = 0.0;
      for (std::size_t i = 0; i < kStoiSegment; ++i) corr += (xs[i] / nx) * (ys[i] / ny);
      total += corr;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

EvalRow evaluate_signals(std::span<const double> reference, std::span<const double> mixture,
                         std::span<const double> enhanced, double sample_rate) {
  if (mixture.size() != reference.size()) {
    throw InvalidInput("mixture and reference lengths differ");
  }
  std::vector<double> out(reference.size(), 0.0);
  std::copy_n(enhanced.begin(), std::min(enhanced.size(), out.size()), out.begin());
  EvalRow row;
  row.si_sdr_input = si_sdr(mixture, reference);
  row.si_sdr_output = si_sdr(out, reference);
  row.stoi_input = stoi(mixture, reference, sample_rate);
  row.stoi_output = stoi(out, reference, sample_rate);
  return row;
}

EvalSummary EvalReport::summary(const std::string& category) const {
  EvalSummary s;
  for (const auto& r : rows) {
    if (!category.empty() && r.category != category) continue;
    ++s.count;
    s.si_sdr_input += r.si_sdr_input;
    s.si_sdr_output += r.si_sdr_output;
    s.stoi_input += r.stoi_input;
    s.stoi_output += r.stoi_output;
    if (r.si_sdr_output > r.si_sdr_input) ++s.improved;
  }
  if (s.count) {
    const auto n = static_cast<double>(s.count);
    s.si_sdr_input /= n;
    s.si_sdr_output /= n;
    s.stoi_input /= n;
    s.stoi_output /= n;
  }
  return s;
}

std::string EvalReport::to_csv() const {
  std::string out = "id,category,si_sdr_input,si_sdr_output,stoi_input,stoi_output\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.6f\n", r.si_sdr_input, r.si_sdr_output,
                  r.stoi_input, r.stoi_output);
    out += r.id + "," + r.category + buf;
  }
  return out;
}

Json EvalReport::summary_json() const {
  auto to_json = [](const EvalSummary& s) {
    return Json{{"count", s.count},
                {"si_sdr_input", s.si_sdr_input},
                {"si_sdr_output", s.si_sdr_output},
                {"si_sdr_improvement", s.si_sdr_output - s.si_sdr_input},
                {"stoi_input", s.stoi_input},
                {"stoi_output", s.stoi_output},
                {"stoi_improvement", s.stoi_output - s.stoi_input},
                {"improved", s.improved}};
  };
  return {{"all", to_json(summary())},
          {"speech", to_json(summary("speech"))},
          {"mixed", to_json(summary("mixed"))}};
}

}  // namespace avse
