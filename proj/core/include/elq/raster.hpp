#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "elq/errors.hpp"

namespace elq {

struct Rgb {
  uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline int rgb_distance_sq(const Rgb& a, const Rgb& b) {
  const int dr = int(a.r) - int(b.r);
  const int dg = int(a.g) - int(b.g);
  const int db = int(a.b) - int(b.b);
  return dr * dr + dg * dg + db * db;
}

inline double rgb_distance(const Rgb& a, const Rgb& b) {
  return std::sqrt(double(rgb_distance_sq(a, b)));
}

inline uint8_t rgb_luma(const Rgb& c) {
  return uint8_t(std::lround(0.299 * c.r + 0.587 * c.g + 0.114 * c.b));
}

// Dense row-major 2D grid.  (0,0) is the top-left pixel, x grows rightward,
// y grows downward (deeper into the tissue for our frames).
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{}) : w_(width), h_(height) {
    if (width <= 0 || height <= 0)
      fail(Err::InvalidArgument, "raster dimensions must be positive");
    data_.assign(size_t(width) * size_t(height), fill);
  }

  int width() const { return w_; }
  int height() const { return h_; }
  bool empty() const { return data_.empty(); }
  size_t size() const { return data_.size(); }

  bool in_bounds(int x, int y) const { return x >= 0 && x < w_ && y >= 0 && y < h_; }

  T& at(int x, int y) {
    assert(in_bounds(x, y));
    return data_[size_t(y) * size_t(w_) + size_t(x)];
  }
  const T& at(int x, int y) const {
    assert(in_bounds(x, y));
    return data_[size_t(y) * size_t(w_) + size_t(x)];
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <typename U>
  bool same_shape(const Raster<U>& other) const {
    return w_ == other.width() && h_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int w_ = 0, h_ = 0;
  std::vector<T> data_;
};

}  // namespace elq
