#include "marginlab/lowerbound/probes.hpp"

#include "marginlab/core/errors.hpp"
#include "marginlab/core/samplers.hpp"
#include "marginlab/ntk/kernel.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace marginlab;

namespace {

std::vector<double> random_signs(std::size_t m, CounterRng& rng) {
    std::vector<double> z(m);
    for (double& v : z) v = rng.sign();
    return z;
}

// Direct enumeration of the cube average, without the z / -z pairing.
double cube_oracle(std::size_t d, const std::vector<double>& pts, const std::vector<double>& beta, int p, int q) {
    const std::size_t n = beta.size();
    long double total = 0.0L;
    std::vector<double> z(d);
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        for (std::size_t k = 0; k < d; ++k) z[k] = (mask >> k) & 1 ? 1.0 : -1.0;
        long double fq = 0.0L, fp = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            long double ip = 0.0L;
            for (std::size_t k = 0; k < d; ++k) ip += z[k] * pts[i * d + k];
            fq += beta[i] * std::pow(ip, q);
            fp += beta[i] * std::pow(ip, p);
        }
        total += fq * fp;
    }
    return static_cast<double>(total / static_cast<long double>(std::size_t{1} << d));
}

}  // namespace

TEST_SUITE("lowerbound") {

TEST_CASE("closed-form tilde kernels match the lifted definition") {
    CounterRng rng(Seed{1}, 0);
    for (std::size_t d : {8u, 13u, 30u}) {
        for (int t = 0; t < 100 / 3 + 1; ++t) {
            const auto z = random_signs(d - 2, rng), zp = random_signs(d - 2, rng);
            CHECK(ktilde1(z, zp, d) == doctest::Approx(ktilde1_lifted(z, zp)).epsilon(1e-12));
            CHECK(ktilde2(z, zp, d) == doctest::Approx(ktilde2_lifted(z, zp)).epsilon(1e-12).scale(1.0));
        }
    }
    // z = z': t = (d-2)/(d-1); orthogonal z: t = 0 gives K~1 = 0 and K~2 = (d-1)/pi.
    const std::vector<double> a{1, 1, -1, -1, 1, -1}, b{1, 1, 1, 1, 1, 1};
    const double t = 6.0 / 7.0;
    CHECK(ktilde1(a, a, 8) == doctest::Approx(7.0 * t * (1 - std::acos(t) / std::numbers::pi)));
    CHECK(ktilde1(a, b, 8) == doctest::Approx(0.0).scale(1.0));
    CHECK(ktilde2(a, b, 8) == doctest::Approx(7.0 / std::numbers::pi));
    CHECK_THROWS_AS(ktilde1(a, b, 9), DimensionError);
    const std::vector<double> bad{1, 1, 0.5, -1, 1, -1};
    CHECK_THROWS_AS(ktilde1(a, bad, 8), DimensionError);
}

TEST_CASE("f_tilde is linear in beta") {
    const std::size_t d = 10;
    CounterRng rng(Seed{2}, 0);
    const auto z = random_signs(d - 2, rng), z1 = random_signs(d - 2, rng), z2 = random_signs(d - 2, rng);
    std::vector<double> tails = z1;
    tails.insert(tails.end(), z2.begin(), z2.end());
    const std::vector<double> zero{0.0, 0.0};
    CHECK(f_tilde(z, tails, zero, 0.3, 0.7, d) == 0.0);
    const std::vector<double> one{2.0};
    const double expect = 2.0 * (0.3 * ktilde1(z1, z, d) + 0.7 * (ktilde1(z1, z, d) + ktilde2(z1, z, d)));
    CHECK(f_tilde(z, z1, one, 0.3, 0.7, d) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("cancellation residuals") {
    const std::size_t d = 16;
    CounterRng rng(Seed{3}, 0);
    std::vector<double> x{0.0, 1.0};
    for (double s : random_signs(d - 2, rng)) x.push_back(s);
    const ResidualStats r = cancellation_residuals(x, d, 500, Seed{4});
    CHECK(r.count == 500);
    CHECK(r.k1_max == 0.0);
    CHECK(r.k2_max >= r.k2_mean);
    const ResidualStats none = cancellation_residuals(x, d, 0, Seed{4});
    CHECK(none.count == 0);
    std::vector<double> small(7, 1.0);
    CHECK_THROWS(cancellation_residuals(small, 7, 10, Seed{4}));
    CHECK_THROWS_AS(cancellation_residuals(x, d + 1, 10, Seed{4}), DimensionError);
}

TEST_CASE("residuals shrink roughly like 1/d") {
    CounterRng rng(Seed{5}, 0);
    auto mean_k2 = [&](std::size_t d) {
        std::vector<double> x{1.0, 0.0};
        for (double s : random_signs(d - 2, rng)) x.push_back(s);
        return cancellation_residuals(x, d, 3000, Seed{6}).k2_mean;
    };
    const double r64 = mean_k2(64), r256 = mean_k2(256);
    const double slope = std::log(r256 / r64) / std::log(4.0);
    CHECK(slope < -0.6);
    CHECK(slope > -1.4);
}

TEST_CASE("polynomial g") {
    for (std::size_t d : {8u, 20u, 100u}) {
        for (double t1 : {0.0, 0.4, 1.0}) {
            const double t2 = 1.0 - t1 + 0.25;
            const PolyG g(d, t1, t2);
            CHECK(g.coeff[3] == 0.0);
            const double a2 = g.scaled_coefficient(2);
            CHECK(std::abs(a2 - (t1 + t2 / 2) / (std::numbers::pi * (d - 1))) <= 1e-14 * (1 + std::abs(a2)));
            CHECK(poly_g_residual(0.0, t1, t2, d) <= 1e-14 * (d - 1));
            double worst = 0.0;
            for (int i = -750; i <= 750; ++i) {
                const double t = i * 1e-3;
                const double res = poly_g_residual(t, t1, t2, d);
                // Taylor remainder of h1 and h2 beyond degree 4 is O(t^5) (h2 is even, so O(t^6)).
                CHECK(res <= (d - 1) * (t1 + t2) * std::pow(std::abs(t), 5) + 1e-12 * (d - 1));
                worst = std::max(worst, res);
                // The error is odd-dominated but the magnitudes at +-t stay comparable.
                if (std::abs(t) >= 0.3) {
                    const double mirrored = poly_g_residual(-t, t1, t2, d);
                    CHECK(res <= 2.0 * mirrored + 1e-12);
                }
            }
            CHECK(worst > 0.0);
            CHECK_THROWS_AS(poly_g_residual(0.7501, t1, t2, d), DomainError);
        }
    }
    // At t = 0.5 the scaled residual is comfortably small.
    CHECK(poly_g_residual(0.5, 0.0, 1.0, 2) <= 1.19 * std::pow(0.5, 5));
}

TEST_CASE("cube expectation: parity, oracle and edge cases") {
    CounterRng rng(Seed{7}, 0);
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t d = 2 + inst % 9;
        const std::size_t n = 1 + inst % 5;
        std::vector<double> pts, beta(n);
        for (std::size_t i = 0; i < n; ++i)
            for (double s : random_signs(d, rng)) pts.push_back(s);
        for (double& b : beta) b = rng.normal();
        CHECK(cube_exp_bruteforce(d, pts, beta, 1, 2) == 0.0);
        CHECK(cube_exp_bruteforce(d, pts, beta, 3, 0) == 0.0);
        CHECK(cube_exp_bruteforce(d, pts, beta, 2, 2) >= 0.0);
        if (inst % 20 == 0) {
            for (auto [p, q] : {std::pair{2, 2}, std::pair{1, 3}, std::pair{0, 4}}) {
                const double oracle = cube_oracle(d, pts, beta, p, q);
                CHECK(cube_exp_bruteforce(d, pts, beta, p, q) == doctest::Approx(oracle).epsilon(1e-10).scale(1.0));
            }
            double s = 0.0;
            for (double b : beta) s += b;
            CHECK(cube_exp_bruteforce(d, pts, beta, 0, 0) == doctest::Approx(s * s).epsilon(1e-12));
        }
    }
    std::vector<double> pts(15, 1.0);
    const std::vector<double> beta{1.0};
    CHECK_THROWS_AS(cube_exp_bruteforce(15, pts, beta, 1, 2), ScaleError);
    CHECK_THROWS_AS(cube_exp_bruteforce(3, std::vector<double>(3, 1.0), beta, 7, 1), DomainError);
}

TEST_CASE("Wilson interval") {
    const ProbabilityEstimate e = wilson_interval(50, 100);
    CHECK(e.p == 0.5);
    CHECK(e.lower == doctest::Approx(0.40383).epsilon(1e-4));
    CHECK(e.upper == doctest::Approx(0.59617).epsilon(1e-4));
    const ProbabilityEstimate all = wilson_interval(20, 20);
    CHECK(all.upper == doctest::Approx(1.0));
    CHECK(all.lower < 1.0);
    const ProbabilityEstimate none = wilson_interval(0, 20);
    CHECK(none.lower == doctest::Approx(0.0).scale(1.0));
    CHECK(none.upper > 0.0);
}

TEST_CASE("mass and gap probes") {
    const Dataset support = sample_distribution_d(12, 10, Seed{8});
    std::vector<double> zero(12, 0.0), beta(12);
    CounterRng rng(Seed{9}, 0);
    for (double& b : beta) b = rng.normal();
    // beta = 0 puts every draw on the threshold 0.
    const ProbabilityEstimate z = f_tilde_mass_probe(support, zero, 0.0, 1.0, 0.5, 200, Seed{1});
    CHECK(z.p == 1.0);
    double last = 2.0;
    for (double m : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        const ProbabilityEstimate e = f_tilde_mass_probe(support, beta, 0.0, 1.0, 1.0, 2000, Seed{2}, m);
        CHECK(e.p <= last);
        CHECK(e.lower <= e.p);
        CHECK(e.p <= e.upper);
        last = e.p;
    }
    const RatioSample gaps = f_tilde_gap_probe(support, beta, 0.0, 1.0, 300, Seed{3});
    CHECK(gaps.ratios.size() == 600);
    CHECK(gaps.quantile(0.5) <= gaps.quantile(0.99));
    for (double r : gaps.ratios) CHECK(r >= 0.0);
}

}  // TEST_SUITE
