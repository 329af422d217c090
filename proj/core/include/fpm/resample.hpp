#pragma once

#include <cstddef>

#include "fpm/field.hpp"

namespace fpm {

/// Keys cubic convolution kernel with parameter a.
double cubic_kernel(double x, double a = -0.5);

/// Separable bicubic resize (a = -0.5, half-pixel centers: source
/// coordinate = (dst + 0.5) * in / out - 0.5). Taps outside the image are
/// clamped to the nearest edge pixel. No output clamping.
RealImage resize_bicubic(const RealImage& src, std::size_t out_width, std::size_t out_height);

}  // namespace fpm
