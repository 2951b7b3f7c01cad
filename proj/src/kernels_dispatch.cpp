#include "vibronic/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace vibronic::kernels {

#if defined(VIBRONIC_WITH_AVX2)
namespace detail {
const KernelTable& avx2_table();
}
#endif

bool cpu_has_avx2() {
#if defined(VIBRONIC_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return has;
#else
  return false;
#endif
}

const KernelTable* avx2_kernels() {
#if defined(VIBRONIC_WITH_AVX2)
  if (cpu_has_avx2()) return &detail::avx2_table();
#endif
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& table = [&]() -> const KernelTable& {
    const char* env = std::getenv("VIBRONIC_ISA");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace vibronic::kernels
