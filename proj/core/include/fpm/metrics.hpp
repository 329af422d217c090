#pragma once

#include "fpm/field.hpp"

namespace fpm {

/// Reported PSNR for identical images (and the ceiling for near-identical ones).
inline constexpr double kPsnrCapDb = 99.0;

/// 10 log10(1 / MSE) with data range 1, capped at kPsnrCapDb.
double psnr(const RealImage& reference, const RealImage& test);

/// Mean SSIM over all valid 11x11 Gaussian windows (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, dynamic range 1. Both sides must be at least 11.
double ssim(const RealImage& reference, const RealImage& test);

}  // namespace fpm
