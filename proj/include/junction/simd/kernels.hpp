#pragma once

// Inner loops of the value-iteration sweep. Every variant performs the same
// IEEE operations in the same order, so results are bit-identical.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace junction::simd {

struct SweepView {
  const std::uint32_t* offsets;
  const std::int32_t* lo;
  const std::int32_t* hi;
  const double* fx;
  const double* fy;
  const double* cost;
  const double* discount;
  const std::uint8_t* flagged;
  double flagged_value;
};

/// next[n] = min over candidates k of node n of
///   cost[k] + discount[k] * ((1-fy)*((1-fx)*v[lo] + fx*v[lo+1]) + fy*((1-fx)*v[hi] + fx*v[hi+1]))
/// for n in [begin, end).
using SweepFn = void (*)(const SweepView& s, const double* v, double* next, std::size_t begin,
                         std::size_t end);
/// max |a[n] - b[n]| over [begin, end).
using MaxAbsDiffFn = double (*)(const double* a, const double* b, std::size_t begin,
                                std::size_t end);

struct Kernels {
  std::string_view name;
  SweepFn sweep;
  MaxAbsDiffFn max_abs_diff;
};

Kernels scalar_kernels();
/// Null function pointers when the build has no AVX2 variant.
Kernels avx2_kernels();

bool cpu_has_avx2();

/// AVX2 when the CPU supports it, unless JUNCTION_SIMD=scalar is set.
const Kernels& active_kernels();

}  // namespace junction::simd
