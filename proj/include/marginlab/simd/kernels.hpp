#pragma once

// Dense double-precision inner loops used by every numeric module.
//
// Each kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active table is chosen once at first use from the
// CPU feature bits; MARGINLAB_SIMD=scalar|avx2 in the environment overrides
// the choice. Results of the two variants agree to rounding (the vector
// versions reassociate sums), not bit-for-bit.

#include <cstddef>
#include <string_view>

namespace marginlab::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
    Backend backend;

    // sum_k a[k] * b[k]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // x *= alpha
    void (*scale)(double alpha, double* x, std::size_t n);
    // sum_k x[k]^2
    double (*sum_sq)(const double* x, std::size_t n);
    // out[k] = max(in[k], 0)
    void (*relu)(const double* in, double* out, std::size_t n);
    // g[k] = pre[k] > 0 ? g[k] : 0   (relu subgradient with phi'(0) = 0)
    void (*relu_mask)(const double* pre, double* g, std::size_t n);
    // y[r] = dot(A[r, :], x) for row-major A (rows x cols)
    void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
    // A[r, :] += alpha * u[r] * v   for row-major A (rows x cols)
    void (*ger)(double alpha, const double* u, std::size_t rows, const double* v, std::size_t cols,
                double* a);
};

const KernelTable& scalar_kernels() noexcept;
// Throws std::runtime_error when the backend is not compiled in or the CPU lacks it.
const KernelTable& kernels_for(Backend backend);

bool backend_available(Backend backend) noexcept;

// Active table; resolved on first call.
const KernelTable& kernels() noexcept;
Backend active_backend() noexcept;
// Replaces the active table. Not thread-safe; intended for tests and tools.
void set_backend(Backend backend);

std::string_view backend_name(Backend backend) noexcept;

}  // namespace marginlab::simd
