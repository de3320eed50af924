#include "marginlab/core/errors.hpp"
#include "marginlab/ntk/kernel.hpp"

#include <cmath>
#include <string>

namespace marginlab {

namespace {

// log(1 + exp(-m)) without overflow.
double logistic_loss(double m) { return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)); }

// d/dm log(1 + exp(-m)) = -1 / (1 + exp(m))
double logistic_slope(double m) {
    if (m > 0.0) {
        const double e = std::exp(-m);
        return -e / (1.0 + e);
    }
    return -1.0 / (1.0 + std::exp(m));
}

}  // namespace

KernelModel fit_kernel_logistic(const Dataset& data, const NtkConfig& config, const KernelLogisticOptions& options) {
    if (data.kind() != LabelKind::binary) throw std::invalid_argument("fit_kernel_logistic: binary labels required");
    if (!(options.reg >= 0.0)) throw std::invalid_argument("fit_kernel_logistic: reg must be >= 0");
    const Eigen::MatrixXd g = gram(data, config);
    const auto n = static_cast<Eigen::Index>(data.n());
    const double nd = static_cast<double>(data.n());

    // Steps follow the RKHS gradient of the objective: with f = G beta the
    // update beta -= lr * (r / n + 2 reg beta) is gradient descent on f in the
    // kernel geometry, whose curvature is bounded by lambda_max(G / n) / 4.
    double lr = options.lr;
    if (!(lr > 0.0)) {
        const double lmax = power_iteration_lambda_max(g) / nd;
        lr = lmax > 0.0 ? 1.0 / lmax : 1.0;
    }

    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = data.label(static_cast<std::size_t>(i));

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r(n);
    KernelModel model{data, {}, config, {}};
    model.loss_trace.reserve(options.steps + 1);

    auto objective = [&]() {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += logistic_loss(y(i) * f(i));
        return s / nd + options.reg * beta.dot(f);
    };

    for (std::size_t step = 0; step <= options.steps; ++step) {
        const double loss = objective();
        if (!std::isfinite(loss)) throw DivergenceError(step, "kernel logistic loss is not finite (lr " + std::to_string(lr) + ")");
        model.loss_trace.push_back(loss);
        if (step == options.steps) break;
        for (Eigen::Index i = 0; i < n; ++i) r(i) = y(i) * logistic_slope(y(i) * f(i)) / nd;
        beta -= lr * (r + 2.0 * options.reg * beta);
        f.noalias() = g * beta;
    }
    if (!beta.allFinite()) throw DivergenceError(options.steps, "kernel coefficients are not finite");
    model.beta.assign(beta.data(), beta.data() + n);
    return model;
}

KernelModel fit_kernel_ridge(const Dataset& data, const NtkConfig& config, double ridge) {
    if (data.kind() != LabelKind::regression) throw std::invalid_argument("fit_kernel_ridge: regression labels required");
    if (!(ridge > 0.0)) throw std::invalid_argument("fit_kernel_ridge: ridge must be > 0");
    Eigen::MatrixXd a = gram(data, config);
    const auto n = a.rows();
    a.diagonal().array() += ridge * static_cast<double>(n);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = data.label(static_cast<std::size_t>(i));

    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw SingularityError("fit_kernel_ridge: Cholesky factorization failed");
    const Eigen::VectorXd beta = llt.solve(y);
    if (!beta.allFinite()) throw SingularityError("fit_kernel_ridge: solve produced non-finite coefficients");

    KernelModel model{data, {}, config, {}};
    model.beta.assign(beta.data(), beta.data() + n);
    return model;
}

}  // namespace marginlab
