#pragma once

#include <cstddef>

#include "fpm/field.hpp"

namespace fpm {

/// Orthonormal 2D DFT, output centered so zero frequency sits at
/// (width / 2, height / 2). Throws ValidationError naming the first
/// non-finite pixel.
Spectrum forward_dft(const ComplexField& field);

/// Exact inverse of forward_dft.
ComplexField inverse_dft(const Spectrum& spectrum);

/// Amplitude factor applied when cropping a size x size window out of a
/// source spectrum, sqrt(size^2 / (width * height)). A constant field keeps
/// its value through crop + inverse_dft.
double crop_scale(const Spectrum& source, std::size_t size);

/// Extracts the size x size window whose center bin is the source bin at
/// `center`, scaled by crop_scale. Throws GeometryError if the window leaves
/// the source.
Spectrum crop_spectrum(const Spectrum& spectrum, BinOffset center, std::size_t size);

/// Writes `patch` back into the window of `target` centered at `center`.
///
/// Per bin with mask value m: t += m * (patch / scale - m * t). Bins with
/// m = 1 are replaced, bins with m = 0 are untouched, ramp bins take a
/// relaxed projection step. crop_spectrum followed by embed_spectrum is the
/// identity on the mask support.
Spectrum embed_spectrum(const Spectrum& patch, const Spectrum& target, BinOffset center,
                        const Pupil& mask);

/// In-place form of embed_spectrum.
void embed_spectrum_into(Spectrum& target, const Spectrum& patch, BinOffset center,
                         const Pupil& mask);

/// Elementwise product of a spectrum window with the pupil mask.
void apply_pupil(Spectrum& spectrum, const Pupil& pupil);

}  // namespace fpm
