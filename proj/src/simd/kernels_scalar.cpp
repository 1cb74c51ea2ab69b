#include <cmath>

#include "junction/simd/kernels.hpp"

namespace junction::simd {

namespace {

void sweep_scalar(const SweepView& s, const double* v, double* next, std::size_t begin,
                  std::size_t end) {
  for (std::size_t n = begin; n < end; ++n) {
    if (s.flagged[n]) {
      next[n] = s.flagged_value;
      continue;
    }
    double best = INFINITY;
    for (std::uint32_t k = s.offsets[n]; k < s.offsets[n + 1]; ++k) {
      const double fx = s.fx[k], fy = s.fy[k];
      const double gx = 1.0 - fx, gy = 1.0 - fy;
      const double a = gx * v[s.lo[k]] + fx * v[s.lo[k] + 1];
      const double b = gx * v[s.hi[k]] + fx * v[s.hi[k] + 1];
      const double q = s.cost[k] + s.discount[k] * (gy * a + fy * b);
      best = q < best ? q : best;
    }
    next[n] = best;
  }
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t begin, std::size_t end) {
  double m = 0.0;
  for (std::size_t n = begin; n < end; ++n) {
    const double d = std::abs(a[n] - b[n]);
    m = d > m ? d : m;
  }
  return m;
}

}  // namespace

Kernels scalar_kernels() { return {"scalar", sweep_scalar, max_abs_diff_scalar}; }

}  // namespace junction::simd
