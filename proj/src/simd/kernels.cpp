#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace marginlab::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(MARGINLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* resolve_default() {
    if (const char* env = std::getenv("MARGINLAB_SIMD")) {
        const std::string want(env);
        if (want == "scalar") return &detail::scalar_table();
        if (want == "avx2" && backend_available(Backend::avx2)) return &kernels_for(Backend::avx2);
    }
    if (backend_available(Backend::avx2)) return &kernels_for(Backend::avx2);
    return &detail::scalar_table();
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{resolve_default()};
    return slot;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept { return detail::scalar_table(); }

bool backend_available(Backend backend) noexcept {
    switch (backend) {
        case Backend::scalar: return true;
        case Backend::avx2: return cpu_has_avx2();
    }
    return false;
}

const KernelTable& kernels_for(Backend backend) {
    if (!backend_available(backend))
        throw std::runtime_error("simd backend '" + std::string(backend_name(backend)) +
                                 "' is not available on this machine");
    switch (backend) {
        case Backend::scalar: return detail::scalar_table();
        case Backend::avx2:
#if defined(MARGINLAB_HAVE_AVX2)
            return detail::avx2_table();
#else
            break;
#endif
    }
    throw std::runtime_error("unreachable simd backend");
}

const KernelTable& kernels() noexcept { return *active_slot().load(std::memory_order_acquire); }

Backend active_backend() noexcept { return kernels().backend; }

void set_backend(Backend backend) {
    active_slot().store(&kernels_for(backend), std::memory_order_release);
}

std::string_view backend_name(Backend backend) noexcept {
    switch (backend) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

}  // namespace marginlab::simd
