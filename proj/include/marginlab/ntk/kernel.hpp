#pragma once

#include "marginlab/core/dataset.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace marginlab {

// Mixture weights of the two-layer relu tangent kernel
//   K = tau1 * K1 + tau2 * (K1 + K2).
// Layer scalings and the relu constant are absorbed into tau1, tau2.
struct NtkConfig {
    double tau1 = 1.0;
    double tau2 = 1.0;

    void validate() const;  // tau1, tau2 >= 0 and tau1 + tau2 > 0
};

// K1(x', x) = <x, x'> (1 - arccos(cos angle) / pi)
double k1(std::span<const double> x, std::span<const double> x_prime);
// K2(x', x) = |x| |x'| sqrt(1 - cos^2) / pi
double k2(std::span<const double> x, std::span<const double> x_prime);
double ntk(std::span<const double> x, std::span<const double> x_prime, const NtkConfig& config);

// Dense n x n Gram matrix, filled once per unordered pair so it is exactly symmetric.
Eigen::MatrixXd gram(const Dataset& data, const NtkConfig& config);

struct KernelModel {
    Dataset support;
    std::vector<double> beta;
    NtkConfig config;
    std::vector<double> loss_trace;  // empty for closed-form fits
};

struct KernelLogisticOptions {
    double reg = 0.0;
    std::size_t steps = 2000;
    double lr = 0.0;  // <= 0 selects 1 / lambda_max(G)
};

// Full-batch gradient descent on
//   (1/n) sum_i log(1 + exp(-y_i (G beta)_i)) + reg * beta^T G beta
// starting from beta = 0. Throws DivergenceError on a non-finite loss.
KernelModel fit_kernel_logistic(const Dataset& data, const NtkConfig& config, const KernelLogisticOptions& options);

// beta = (G + ridge * n * I)^{-1} y. Throws SingularityError when the solve fails.
KernelModel fit_kernel_ridge(const Dataset& data, const NtkConfig& config, double ridge);

double predict_kernel(const KernelModel& model, std::span<const double> x);

// Largest eigenvalue of a symmetric PSD matrix by power iteration from the all-ones vector.
double power_iteration_lambda_max(const Eigen::MatrixXd& g, int iterations = 20);

}  // namespace marginlab
