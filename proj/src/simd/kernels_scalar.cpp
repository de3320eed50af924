#include "kernels_impl.hpp"

namespace marginlab::simd::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) x[k] *= alpha;
}

double sum_sq_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += x[k] * x[k];
    return s;
}

void relu_scalar(const double* in, double* out, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) out[k] = in[k] > 0.0 ? in[k] : 0.0;
}

void relu_mask_scalar(const double* pre, double* g, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k)
        if (!(pre[k] > 0.0)) g[k] = 0.0;
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * cols, x, cols);
}

void ger_scalar(double alpha, const double* u, std::size_t rows, const double* v, std::size_t cols,
                double* a) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double c = alpha * u[r];
        if (c != 0.0) axpy_scalar(c, v, a + r * cols, cols);
    }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
    static const KernelTable table{Backend::scalar, dot_scalar, axpy_scalar, scale_scalar,
                                   sum_sq_scalar,   relu_scalar, relu_mask_scalar, gemv_scalar,
                                   ger_scalar};
    return table;
}

}  // namespace marginlab::simd::detail
