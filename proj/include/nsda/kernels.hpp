#pragma once

// Data-parallel inner loops. Every kernel exists twice with identical
// signatures: `serial` is the plain reference loop kept for testing and `omp`
// is the OpenMP version the library calls through `kernels::active`.
// Reductions are blocked per grid row and the row partials are added in row
// order in both variants, so the two agree bit for bit at any thread count.

#include <span>
#include <vector>

#include "nsda/grid.hpp"

namespace nsda {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Squared shortest periodic distance between two points of [0, L)^2.
double periodic_distance2(Point a, Point b, double length) noexcept;

namespace kernels {

namespace serial {
#include "nsda/detail/kernel_decls.inc"
}  // namespace serial

namespace omp {
#include "nsda/detail/kernel_decls.inc"
}  // namespace omp

#ifdef NSDA_HAVE_OPENMP
namespace active = omp;
#else
namespace active = serial;
#endif

}  // namespace kernels
}  // namespace nsda
