// Objective metrics: SI-SDR and STOI, and per-scenario evaluation reports.
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "avse/json_io.hpp"

namespace avse {

inline constexpr double kSiSdrCapDb = 60.0;

// 10 log10(|a r|^2 / |a r - e|^2) with a = <e, r> / |r|^2, no mean removal,
// clamped to [-60, 60] dB; an estimate with no projection on the reference
// (e.g. all zeros) scores -60. Throws InvalidInput on length mismatch or an
// all-zero reference.
double si_sdr(std::span<const double> estimate, std::span<const double> reference);

// Rational resampler y[n] = sum_j h[n*down + (len(h)-1)/2 - j*up] x[j] with
// ceil(len*up/down) outputs. `h` must have odd length.
std::vector<double> resample_poly(std::span<const double> x, std::size_t up, std::size_t down,
                                  std::span<const double> h);

// Kaiser-windowed sinc anti-aliasing filter (60 dB rejection) for up/down
// resampling, normalized to sum to `up`.
std::vector<double> resampling_filter(std::size_t up, std::size_t down);

// Short-time objective intelligibility (classic, not extended): 10 kHz,
// 40 dB silent-frame removal, 256-sample frames, 512-point FFT, 15 third-octave
// bands from 150 Hz, 30-frame segments, clipping at -15 dB SDR.
// Throws InsufficientSignal when fewer than 30 frames survive silence removal.
double stoi(std::span<const double> estimate, std::span<const double> reference,
            double sample_rate);

struct EvalRow {
  std::string id;
  std::string category;  // "speech" or "mixed"
  double si_sdr_input = 0.0;
  double si_sdr_output = 0.0;
  double stoi_input = 0.0;
  double stoi_output = 0.0;
};

// Input metrics compare mixture against reference, output metrics compare
// enhanced against reference. `enhanced` is truncated or zero-padded to the
// reference length.
EvalRow evaluate_signals(std::span<const double> reference, std::span<const double> mixture,
                         std::span<const double> enhanced, double sample_rate);

struct EvalSummary {
  std::size_t count = 0;
  double si_sdr_input = 0.0;
  double si_sdr_output = 0.0;
  double stoi_input = 0.0;
  double stoi_output = 0.0;
  std::size_t improved = 0;  // rows with si_sdr_output > si_sdr_input
};

struct EvalReport {
  std::vector<EvalRow> rows;

  // Means over rows whose category matches; empty `category` means all rows.
  EvalSummary summary(const std::string& category = "") const;
  std::string to_csv() const;
  Json summary_json() const;
};

}  // namespace avse
