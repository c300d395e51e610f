#include "avse/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <utility>

#include "avse/error.hpp"

namespace avse {

namespace {

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2 || n % 2 != 0) {
    throw InvalidConfig("RealFft: size must be even and >= 2, got " + std::to_string(n));
  }
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(n_);
  auto* spec = fftw_alloc_complex(bins());
  spectrum_ = spec;
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() { release(); }

RealFft::RealFft(RealFft&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      real_(std::exchange(other.real_, nullptr)),
      spectrum_(std::exchange(other.spectrum_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
  if (this != &other) {
    release();
    n_ = std::exchange(other.n_, 0);
    real_ = std::exchange(other.real_, nullptr);
    spectrum_ = std::exchange(other.spectrum_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void RealFft::release() {
  if (real_ == nullptr) return;
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(spectrum_);
  real_ = nullptr;
  spectrum_ = nullptr;
}

void RealFft::forward(std::span<const double> in, std::span<Complex> out) {
  if (in.size() != n_ || out.size() != bins()) {
    throw InvalidInput("RealFft::forward: size mismatch");
  }
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  auto* spec = static_cast<fftw_complex*>(spectrum_);
  for (std::size_t k = 0; k < bins(); ++k) out[k] = Complex(spec[k][0], spec[k][1]);
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) {
  if (in.size() != bins() || out.size() != n_) {
    throw InvalidInput("RealFft::inverse: size mismatch");
  }
  auto* spec = static_cast<fftw_complex*>(spectrum_);
  for (std::size_t k = 0; k < bins(); ++k) {
    spec[k][0] = in[k].real();
    spec[k][1] = in[k].imag();
  }
  spec[0][1] = 0.0;
  spec[bins() - 1][1] = 0.0;
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = real_[i] * scale;
}

}  // namespace avse
