// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "kernels_impl.hpp"

#include <immintrin.h>

namespace marginlab::simd::detail {

namespace {

inline double hsum(__m256d v) noexcept {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
    }
    if (k + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
        k += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) s += a[k] * b[k];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
    for (; k < n; ++k) y[k] += alpha * x[k];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) _mm256_storeu_pd(x + k, _mm256_mul_pd(va, _mm256_loadu_pd(x + k)));
    for (; k < n; ++k) x[k] *= alpha;
}

double sum_sq_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

void relu_avx2(const double* in, double* out, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d v = _mm256_loadu_pd(in + k);
        // keep strictly positive lanes; maps -0.0 and NaN to +0.0 like the scalar path
        const __m256d mask = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(out + k, _mm256_and_pd(mask, v));
    }
    for (; k < n; ++k) out[k] = in[k] > 0.0 ? in[k] : 0.0;
}

void relu_mask_avx2(const double* pre, double* g, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(pre + k), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(g + k, _mm256_and_pd(mask, _mm256_loadu_pd(g + k)));
    }
    for (; k < n; ++k)
        if (!(pre[k] > 0.0)) g[k] = 0.0;
}

void gemv_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(a + r * cols, x, cols);
}

void ger_avx2(double alpha, const double* u, std::size_t rows, const double* v, std::size_t cols,
              double* a) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double c = alpha * u[r];
        if (c != 0.0) axpy_avx2(c, v, a + r * cols, cols);
    }
}

}  // namespace

const KernelTable& avx2_table() noexcept {
    static const KernelTable table{Backend::avx2, dot_avx2,  axpy_avx2,      scale_avx2,
                                   sum_sq_avx2,   relu_avx2, relu_mask_avx2, gemv_avx2,
                                   ger_avx2};
    return table;
}

}  // namespace marginlab::simd::detail
