#include "marginlab/ntk/kernel.hpp"

#include "marginlab/core/errors.hpp"
#include "marginlab/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace marginlab {

void NtkConfig::validate() const {
    if (!(tau1 >= 0.0) || !(tau2 >= 0.0) || !(tau1 + tau2 > 0.0))
        throw std::invalid_argument("NtkConfig: need tau1, tau2 >= 0 and tau1 + tau2 > 0");
}

namespace {

struct PairGeometry {
    double inner;
    double norm_product;
    double cosine;  // clamped to [-1, 1]
};

PairGeometry geometry(std::span<const double> x, std::span<const double> xp) {
    if (x.size() != xp.size())
        throw DimensionError("kernel arguments have dimensions " + std::to_string(x.size()) + " and " +
                             std::to_string(xp.size()));
    const auto& k = simd::kernels();
    const double nx = std::sqrt(k.sum_sq(x.data(), x.size()));
    const double nxp = std::sqrt(k.sum_sq(xp.data(), xp.size()));
    if (!(nx > 0.0) || !(nxp > 0.0)) throw DegenerateInputError("kernel argument has zero norm");
    const double inner = k.dot(x.data(), xp.data(), x.size());
    const double np = nx * nxp;
    return {inner, np, std::clamp(inner / np, -1.0, 1.0)};
}

double k1_of(const PairGeometry& g) { return g.inner * (1.0 - std::acos(g.cosine) / std::numbers::pi); }

double k2_of(const PairGeometry& g) {
    return g.norm_product / std::numbers::pi * std::sqrt(std::max(0.0, 1.0 - g.cosine * g.cosine));
}

}  // namespace

double k1(std::span<const double> x, std::span<const double> x_prime) { return k1_of(geometry(x, x_prime)); }

double k2(std::span<const double> x, std::span<const double> x_prime) { return k2_of(geometry(x, x_prime)); }

double ntk(std::span<const double> x, std::span<const double> x_prime, const NtkConfig& config) {
    const PairGeometry g = geometry(x, x_prime);
    const double a = k1_of(g);
    const double b = k2_of(g);
    return config.tau1 * a + config.tau2 * (a + b);
}

Eigen::MatrixXd gram(const Dataset& data, const NtkConfig& config) {
    config.validate();
    const std::size_t n = data.n();
    Eigen::MatrixXd g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double v = 0.0;
            try {
                v = ntk(data.x(i), data.x(j), config);
            } catch (const DegenerateInputError&) {
                throw DegenerateInputError("example " + std::to_string(std::max(i, j)) + " has zero norm");
            }
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return g;
}

double power_iteration_lambda_max(const Eigen::MatrixXd& g, int iterations) {
    if (g.rows() == 0) return 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(g.rows()).normalized();
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXd w = g * v;
        const double norm = w.norm();
        if (!(norm > 0.0)) return 0.0;
        lambda = v.dot(w);
        v = w / norm;
    }
    return std::max(lambda, (g * v).norm());
}

double predict_kernel(const KernelModel& model, std::span<const double> x) {
    if (x.size() != model.support.d())
        throw DimensionError("predict_kernel: input dimension " + std::to_string(x.size()) + ", support has " +
                             std::to_string(model.support.d()));
    double s = 0.0;
    for (std::size_t i = 0; i < model.beta.size(); ++i) {
        if (model.beta[i] == 0.0) continue;
        s += model.beta[i] * ntk(model.support.x(i), x, model.config);
    }
    return s;
}

}  // namespace marginlab
