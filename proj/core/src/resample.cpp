#include "fpm/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace fpm {
namespace {

struct Taps {
  std::array<std::size_t, 4> index;
  std::array<double, 4> weight;
};

std::vector<Taps> make_taps(std::size_t in, std::size_t out) {
  std::vector<Taps> taps(out);
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  const long last = static_cast<long>(in) - 1;
  for (std::size_t d = 0; d < out; ++d) {
    const double s = (static_cast<double>(d) + 0.5) * ratio - 0.5;
    const double base = std::floor(s);
    const double t = s - base;
    for (int k = 0; k < 4; ++k) {
      const long i = static_cast<long>(base) - 1 + k;
      taps[d].index[k] = static_cast<std::size_t>(std::clamp(i, 0L, last));
      taps[d].weight[k] = cubic_kernel(t - static_cast<double>(k - 1));
    }
  }
  return taps;
}

}  // namespace

double cubic_kernel(double x, double a) {
  x = std::abs(x);
  if (x <= 1.0) {
    return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  }
  if (x < 2.0) {
    return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  }
  return 0.0;
}

RealImage resize_bicubic(const RealImage& src, std::size_t out_width, std::size_t out_height) {
  const auto tx = make_taps(src.width(), out_width);
  const auto ty = make_taps(src.height(), out_height);

  RealImage rows(out_width, src.height());
  for (std::size_t y = 0; y < src.height(); ++y) {
    for (std::size_t x = 0; x < out_width; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        acc += tx[x].weight[k] * src(tx[x].index[k], y);
      }
      rows(x, y) = acc;
    }
  }
  RealImage out(out_width, out_height);
  for (std::size_t y = 0; y < out_height; ++y) {
    for (std::size_t x = 0; x < out_width; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        acc += ty[y].weight[k] * rows(x, ty[y].index[k]);
      }
      out(x, y) = acc;
    }
  }
  return out;
}

}  // namespace fpm
