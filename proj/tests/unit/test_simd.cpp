#include "marginlab/simd/kernels.hpp"

#include "marginlab/core/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace marginlab;
using marginlab::simd::Backend;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t stream) {
    CounterRng rng(Seed{42}, stream);
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

long double dot_oracle(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<long double>(a[k]) * b[k];
    return s;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar dot and sum_sq match an extended-precision oracle") {
    const auto& s = simd::scalar_kernels();
    for (std::size_t n : {0u, 1u, 3u, 7u, 64u, 1001u}) {
        const auto a = random_vec(n, 1), b = random_vec(n, 2);
        const double ref = static_cast<double>(dot_oracle(a, b));
        CHECK(s.dot(a.data(), b.data(), n) == doctest::Approx(ref).epsilon(1e-12));
        CHECK(s.sum_sq(a.data(), n) == doctest::Approx(static_cast<double>(dot_oracle(a, a))).epsilon(1e-12));
    }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    if (!simd::backend_available(Backend::avx2)) {
        MESSAGE("AVX2 not available on this machine; equivalence test skipped");
        return;
    }
    const auto& s = simd::scalar_kernels();
    const auto& v = simd::kernels_for(Backend::avx2);
    for (std::size_t n = 0; n <= 67; ++n) {
        CAPTURE(n);
        const auto a = random_vec(n, 10 + n), b = random_vec(n, 100 + n);
        const double scale = 1.0 + std::sqrt(static_cast<double>(n));
        CHECK(std::abs(v.dot(a.data(), b.data(), n) - s.dot(a.data(), b.data(), n)) <= 1e-13 * scale * scale);
        CHECK(std::abs(v.sum_sq(a.data(), n) - s.sum_sq(a.data(), n)) <= 1e-13 * scale * scale);

        // Element-wise kernels involve one rounding each (FMA aside) and must agree closely.
        auto ys = b, yv = b;
        s.axpy(0.37, a.data(), ys.data(), n);
        v.axpy(0.37, a.data(), yv.data(), n);
        for (std::size_t k = 0; k < n; ++k) CHECK(yv[k] == doctest::Approx(ys[k]).epsilon(1e-15));

        auto xs = a, xv = a;
        s.scale(-1.5, xs.data(), n);
        v.scale(-1.5, xv.data(), n);
        CHECK(xs == xv);

        std::vector<double> rs(n), rv(n);
        s.relu(a.data(), rs.data(), n);
        v.relu(a.data(), rv.data(), n);
        CHECK(rs == rv);

        auto gs = b, gv = b;
        s.relu_mask(a.data(), gs.data(), n);
        v.relu_mask(a.data(), gv.data(), n);
        CHECK(gs == gv);
    }
}

TEST_CASE("relu_mask uses derivative zero at exactly zero") {
    const auto& s = simd::scalar_kernels();
    std::vector<double> pre{0.0, -0.0, 1e-300, -1e-300};
    std::vector<double> g{1, 1, 1, 1};
    s.relu_mask(pre.data(), g.data(), pre.size());
    CHECK(g == std::vector<double>{0, 0, 1, 0});
    if (simd::backend_available(Backend::avx2)) {
        std::vector<double> pre8(8, 0.0), g8(8, 1.0);
        pre8[3] = 2.0;
        simd::kernels_for(Backend::avx2).relu_mask(pre8.data(), g8.data(), 8);
        CHECK(g8 == std::vector<double>{0, 0, 0, 1, 0, 0, 0, 0});
    }
}

TEST_CASE("avx2 gemv and ger agree with the scalar reference") {
    if (!simd::backend_available(Backend::avx2)) return;
    const auto& s = simd::scalar_kernels();
    const auto& v = simd::kernels_for(Backend::avx2);
    for (std::size_t rows : {1u, 5u, 17u}) {
        for (std::size_t cols : {1u, 4u, 9u, 33u}) {
            const auto a = random_vec(rows * cols, rows * 100 + cols);
            const auto x = random_vec(cols, 7);
            std::vector<double> ys(rows), yv(rows);
            s.gemv(a.data(), rows, cols, x.data(), ys.data());
            v.gemv(a.data(), rows, cols, x.data(), yv.data());
            for (std::size_t r = 0; r < rows; ++r) CHECK(yv[r] == doctest::Approx(ys[r]).epsilon(1e-12));

            const auto u = random_vec(rows, 8);
            auto as = a, av = a;
            s.ger(0.5, u.data(), rows, x.data(), cols, as.data());
            v.ger(0.5, u.data(), rows, x.data(), cols, av.data());
            for (std::size_t k = 0; k < as.size(); ++k) CHECK(av[k] == doctest::Approx(as[k]).epsilon(1e-14));
        }
    }
}

TEST_CASE("backend switch changes the active table") {
    const Backend before = simd::active_backend();
    simd::set_backend(Backend::scalar);
    CHECK(simd::kernels().backend == Backend::scalar);
    CHECK(simd::backend_name(Backend::scalar) == "scalar");
    simd::set_backend(before);
    CHECK(simd::active_backend() == before);
}

}  // TEST_SUITE
