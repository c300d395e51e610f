// Real-input FFT of fixed size, backed by FFTW.
#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace avse {

using Complex = std::complex<double>;

// Forward transform is unscaled; inverse is scaled by 1/n. The imaginary parts
// of the DC and Nyquist bins are ignored by the inverse (real-valued output).
//
// Each instance owns its plan and work buffers, so one instance must not be
// used from two threads at once; distinct instances are independent.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();

  RealFft(RealFft&& other) noexcept;
  RealFft& operator=(RealFft&& other) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // in: n samples, out: n/2+1 bins
  void forward(std::span<const double> in, std::span<Complex> out);
  // in: n/2+1 bins, out: n samples
  void inverse(std::span<const Complex> in, std::span<double> out);

 private:
  void release();

  std::size_t n_ = 0;
  double* real_ = nullptr;
  void* spectrum_ = nullptr;  // fftw_complex*
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace avse
