#pragma once

#include <span>

#include "nsda/grid.hpp"

namespace nsda::fft {

// Thin wrappers over FFTW complex-to-complex 2D transforms. Plans are created
// once per (thread, n) with FFTW_ESTIMATE, so a given grid always runs the
// same arithmetic and results are bit-reproducible.

/// Analysis: out_k = n^-2 * sum_x in(x) exp(-i k.x). A single cos(k.x) maps to
/// 1/2 at +k and -k.
void forward(const Grid& grid, std::span<const cplx> in, std::span<cplx> out);

/// Synthesis: out(x) = sum_k in_k exp(i k.x). Inverse of forward().
void backward(const Grid& grid, std::span<const cplx> in, std::span<cplx> out);

/// Analysis of real samples.
void forward_real(const Grid& grid, std::span<const double> in, std::span<cplx> out);

}  // namespace nsda::fft
