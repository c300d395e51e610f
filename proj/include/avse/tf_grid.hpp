// Dense frames x bins containers for time-frequency data.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "avse/fft.hpp"

namespace avse {

// Row-major: one contiguous row of `bins` values per frame.
template <typename T>
class TfGrid {
 public:
  using value_type = T;

  TfGrid() = default;
  TfGrid(std::size_t frames, std::size_t bins, T fill = T{})
      : frames_(frames), bins_(bins), data_(frames * bins, fill) {}

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t l, std::size_t k) { return data_[l * bins_ + k]; }
  const T& operator()(std::size_t l, std::size_t k) const { return data_[l * bins_ + k]; }

  std::span<T> frame(std::size_t l) { return {data_.data() + l * bins_, bins_}; }
  std::span<const T> frame(std::size_t l) const { return {data_.data() + l * bins_, bins_}; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  template <typename U>
  bool same_shape(const TfGrid<U>& other) const {
    return frames_ == other.frames() && bins_ == other.bins();
  }

  friend bool operator==(const TfGrid&, const TfGrid&) = default;

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<T> data_;
};

// |.|^2-style non-negative real spectrogram (e.g. the total power reference).
using PowerSpectrogram = TfGrid<double>;

// Values in [0,1]: ideal or estimated ratio masks.
class MaskSpectrogram : public TfGrid<double> {
 public:
  using TfGrid<double>::TfGrid;
};

// Values in [0,1]: per-cell postfilter gains.
class GainSpectrogram : public TfGrid<double> {
 public:
  using TfGrid<double>::TfGrid;
};

}  // namespace avse
