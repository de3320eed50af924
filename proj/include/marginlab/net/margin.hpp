#pragma once

#include "marginlab/core/dataset.hpp"
#include "marginlab/net/params.hpp"

#include <cstddef>

namespace marginlab {

struct MarginReport {
    double lambda = 0.0;
    double train_loss = 0.0;
    double frob_norm = 0.0;
    double normalized_margin = 0.0;    // unnormalized_margin / frob_norm^q
    double unnormalized_margin = 0.0;  // min_i y_i f(x_i), or min_i f_{y_i} - max_{j != y_i} f_j
    bool zero_train_error = false;     // unnormalized_margin > 0
};

// Fills the margin fields; lambda and train_loss are left for the caller.
// Throws DegenerateInputError for zero-norm parameters.
MarginReport normalized_margin(const NetParams& params, const Dataset& data);

// Fraction of examples whose predicted label differs from the true one
// (ties count as errors).
double classification_error(const NetParams& params, const Dataset& data);
// (1/n) sum min((y - f)^2, 1) and (1/n) sum (y - f)^2 on regression data.
double truncated_squared_error(const NetParams& params, const Dataset& data);
double mean_squared_error(const NetParams& params, const Dataset& data);

// lambda = exp(-(2^{r/a} - 1)^{-a/r}) (gamma*)^{r/a} / (n^c (l - 1)^c)
double lambda_schedule(double gamma_star, double n, double l, double r, double a, double c = 5.0);

struct BoundInputs {
    double C;      // max_i ||x_i||_2
    double gamma;  // normalized margin
    double q;      // depth
    double n;
    double delta;
};

// C / (gamma q^{(q-1)/2} sqrt(n)) + sqrt(log(max(log2(4C/gamma), 2)) / n) + sqrt(log(1/delta) / n),
// i.e. the bound with its universal constant set to 1.
double generalization_bound(const BoundInputs& b);

// Fraction of (hidden unit, example) pairs whose indicator 1(u_j^T x_i >= 0)
// differs between two two-layer networks of equal width.
double activation_drift(const NetParams& a, const NetParams& b, const Dataset& data);

}  // namespace marginlab
