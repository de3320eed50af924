#include "marginlab/ntk/kernel.hpp"

#include "marginlab/core/errors.hpp"
#include "marginlab/core/rng.hpp"
#include "marginlab/core/samplers.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

using namespace marginlab;

namespace {

std::vector<double> gaussian(std::size_t d, CounterRng& rng) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.normal();
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

}  // namespace

TEST_SUITE("ntk") {

TEST_CASE("closed-form values at special angles") {
    const std::vector<double> x{3, 4}, y{-4, 3}, z{-6, -8};
    CHECK(k1(x, x) == doctest::Approx(25.0).epsilon(1e-15));
    CHECK(k2(x, x) == doctest::Approx(0.0));
    CHECK(k1(x, y) == doctest::Approx(0.0));
    CHECK(k2(x, y) == doctest::Approx(25.0 / M_PI).epsilon(1e-15));
    CHECK(k1(x, z) == doctest::Approx(0.0));
    CHECK(k2(x, z) == doctest::Approx(0.0));
    CHECK(ntk(x, y, NtkConfig{0.5, 2.0}) == doctest::Approx(2.0 * 25.0 / M_PI));
}

TEST_CASE("symmetry and degree-one homogeneity in each argument") {
    CounterRng rng(Seed{1}, 0);
    for (int t = 0; t < 20; ++t) {
        auto a = gaussian(7, rng), b = gaussian(7, rng);
        CHECK(k1(a, b) == doctest::Approx(k1(b, a)).epsilon(1e-14));
        CHECK(k2(a, b) == doctest::Approx(k2(b, a)).epsilon(1e-14));
        auto a3 = a;
        for (double& v : a3) v *= 3.0;
        CHECK(k1(a3, b) == doctest::Approx(3.0 * k1(a, b)).epsilon(1e-12));
        CHECK(k2(a3, b) == doctest::Approx(3.0 * k2(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("errors and config validation") {
    const std::vector<double> zero{0, 0}, x{1, 0}, short_x{1};
    CHECK_THROWS_AS(k1(zero, x), DegenerateInputError);
    CHECK_THROWS_AS(k2(x, short_x), DimensionError);
    CHECK_THROWS(NtkConfig{-1.0, 1.0}.validate());
    CHECK_THROWS(NtkConfig{0.0, 0.0}.validate());
}

TEST_CASE("Monte Carlo over random relu features matches K1 and K1 + K2") {
    // For u ~ N(0, I): 2 E[relu(u.x) relu(u.x')] = K1 + K2 and
    // 2 E[1(u.x > 0) 1(u.x' > 0)] x.x' = K1.
    CounterRng rng(Seed{11}, 0);
    const std::size_t d = 5, samples = 200'000;
    for (int pair = 0; pair < 3; ++pair) {
        const auto x = gaussian(d, rng), y = gaussian(d, rng);
        double s_relu = 0, ss_relu = 0, s_ind = 0, ss_ind = 0;
        for (std::size_t k = 0; k < samples; ++k) {
            const auto u = gaussian(d, rng);
            const double a = dot(u, x), b = dot(u, y);
            const double r = 2.0 * std::max(a, 0.0) * std::max(b, 0.0);
            const double i = (a > 0 && b > 0) ? 2.0 * dot(x, y) : 0.0;
            s_relu += r;
            ss_relu += r * r;
            s_ind += i;
            ss_ind += i * i;
        }
        const double n = samples;
        const double m_relu = s_relu / n, se_relu = std::sqrt((ss_relu / n - m_relu * m_relu) / n);
        const double m_ind = s_ind / n, se_ind = std::sqrt((ss_ind / n - m_ind * m_ind) / n);
        CHECK(std::abs(m_relu - (k1(x, y) + k2(x, y))) <= 4.0 * se_relu);
        CHECK(std::abs(m_ind - k1(x, y)) <= 4.0 * se_ind + 1e-12);
    }
}

TEST_CASE("gram matrix is exactly symmetric and positive semidefinite") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Dataset data = sample_distribution_d(40, 10, Seed{s});
        const Eigen::MatrixXd g = gram(data, NtkConfig{1.0, 1.0});
        CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8 * g.trace());
        const double lmax = es.eigenvalues().maxCoeff();
        const double est = power_iteration_lambda_max(g, 200);
        CHECK(est <= lmax * (1.0 + 1e-12));
        CHECK(est >= 0.99 * lmax);
    }
}

TEST_CASE("kernel ridge interpolates with a tiny ridge") {
    const Dataset d_sample = sample_distribution_d(30, 8, Seed{4});
    std::vector<double> features, targets;
    for (std::size_t i = 0; i < d_sample.n(); ++i) {
        const auto x = d_sample.x(i);
        features.insert(features.end(), x.begin(), x.end());
        targets.push_back(std::sin(3.0 * x[0]) + x[1] * x[2]);
    }
    const Dataset data = Dataset::from_rows(8, features, targets, LabelKind::regression);
    CHECK_THROWS(fit_kernel_ridge(d_sample, NtkConfig{0.0, 1.0}, 1e-10));
    const KernelModel m = fit_kernel_ridge(data, NtkConfig{0.0, 1.0}, 1e-10);
    for (std::size_t i = 0; i < data.n(); ++i) CHECK(predict_kernel(m, data.x(i)) == doctest::Approx(data.label(i)).epsilon(1e-5));
    const std::vector<double> wrong(3, 1.0);
    CHECK_THROWS_AS(predict_kernel(m, wrong), DimensionError);
}

TEST_CASE("kernel logistic fit separates the training set and descends") {
    const Dataset data = sample_distribution_d(40, 8, Seed{6});
    KernelLogisticOptions o;
    o.steps = 3000;
    const KernelModel m = fit_kernel_logistic(data, NtkConfig{0.0, 1.0}, o);
    REQUIRE(m.loss_trace.size() >= 2);
    CHECK(m.loss_trace.back() < m.loss_trace.front());
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < data.n(); ++i)
        if (!(data.label(i) * predict_kernel(m, data.x(i)) > 0)) ++wrong;
    CHECK(wrong == 0);
    KernelLogisticOptions huge = o;
    huge.lr = 1e308;
    CHECK_THROWS_AS(fit_kernel_logistic(data, NtkConfig{0.0, 1.0}, huge), DivergenceError);
}

}  // TEST_SUITE
