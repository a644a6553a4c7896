#include <cstdlib>
#include <string_view>

#include "adaptcd/simd/kernels.hpp"

namespace adaptcd::simd {

#if defined(ADAPTCD_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table();
}
#endif

const KernelTable* avx2_kernels() {
#if defined(ADAPTCD_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active_kernels() {
    static const KernelTable& chosen = []() -> const KernelTable& {
        const char* env = std::getenv("ADAPTCD_SIMD");
        if (env != nullptr && std::string_view(env) == "scalar") {
            return scalar_kernels();
        }
        if (const KernelTable* t = avx2_kernels()) {
            return *t;
        }
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace adaptcd::simd
