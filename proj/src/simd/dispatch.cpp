#include <cstdlib>
#include <string_view>

#include "junction/simd/kernels.hpp"

namespace junction::simd {

#ifndef JUNCTION_HAVE_AVX2
Kernels avx2_kernels() { return {"avx2", nullptr, nullptr}; }
#endif

bool cpu_has_avx2() {
#if defined(JUNCTION_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Kernels& active_kernels() {
  static const Kernels chosen = [] {
    const char* env = std::getenv("JUNCTION_SIMD");
    if (env && std::string_view(env) == "scalar") return scalar_kernels();
    return cpu_has_avx2() ? avx2_kernels() : scalar_kernels();
  }();
  return chosen;
}

}  // namespace junction::simd
