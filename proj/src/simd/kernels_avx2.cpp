// Compiled with -mavx2 (no FMA) so products and sums round as in the scalar kernel.

#include <immintrin.h>

#include <cmath>

#include "junction/simd/kernels.hpp"

namespace junction::simd {

namespace {

double hmin(__m256d x) {
  const __m128d lo = _mm256_castpd256_pd128(x);
  const __m128d hi = _mm256_extractf128_pd(x, 1);
  const __m128d m = _mm_min_pd(lo, hi);
  const __m128d s = _mm_min_pd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(s);
}

void sweep_avx2(const SweepView& s, const double* v, double* next, std::size_t begin,
                std::size_t end) {
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t n = begin; n < end; ++n) {
    if (s.flagged[n]) {
      next[n] = s.flagged_value;
      continue;
    }
    std::uint32_t k = s.offsets[n];
    const std::uint32_t stop = s.offsets[n + 1];
    __m256d best4 = _mm256_set1_pd(INFINITY);
    for (; k + 4 <= stop; k += 4) {
      const __m128i lo = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s.lo + k));
      const __m128i hi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s.hi + k));
      const __m256d fx = _mm256_loadu_pd(s.fx + k);
      const __m256d fy = _mm256_loadu_pd(s.fy + k);
      const __m256d gx = _mm256_sub_pd(one, fx);
      const __m256d gy = _mm256_sub_pd(one, fy);
      const __m256d v00 = _mm256_i32gather_pd(v, lo, 8);
      const __m256d v01 = _mm256_i32gather_pd(v + 1, lo, 8);
      const __m256d v10 = _mm256_i32gather_pd(v, hi, 8);
      const __m256d v11 = _mm256_i32gather_pd(v + 1, hi, 8);
      const __m256d a = _mm256_add_pd(_mm256_mul_pd(gx, v00), _mm256_mul_pd(fx, v01));
      const __m256d b = _mm256_add_pd(_mm256_mul_pd(gx, v10), _mm256_mul_pd(fx, v11));
      const __m256d interp = _mm256_add_pd(_mm256_mul_pd(gy, a), _mm256_mul_pd(fy, b));
      const __m256d q = _mm256_add_pd(_mm256_loadu_pd(s.cost + k),
                                      _mm256_mul_pd(_mm256_loadu_pd(s.discount + k), interp));
      best4 = _mm256_min_pd(q, best4);
    }
    double best = hmin(best4);
    for (; k < stop; ++k) {
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

double max_abs_diff_avx2(const double* a, const double* b, std::size_t begin, std::size_t end) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m4 = _mm256_setzero_pd();
  std::size_t n = begin;
  for (; n + 4 <= end; n += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + n), _mm256_loadu_pd(b + n));
    m4 = _mm256_max_pd(_mm256_andnot_pd(sign, d), m4);
  }
  const __m128d h = _mm_max_pd(_mm256_castpd256_pd128(m4), _mm256_extractf128_pd(m4, 1));
  double m = _mm_cvtsd_f64(_mm_max_pd(h, _mm_unpackhi_pd(h, h)));
  for (; n < end; ++n) {
    const double d = std::abs(a[n] - b[n]);
    m = d > m ? d : m;
  }
  return m;
}

}  // namespace

Kernels avx2_kernels() { return {"avx2", sweep_avx2, max_abs_diff_avx2}; }

}  // namespace junction::simd
