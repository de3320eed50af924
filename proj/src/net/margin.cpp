#include "marginlab/net/margin.hpp"

#include "marginlab/core/errors.hpp"
#include "marginlab/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace marginlab {

namespace {

// Label-aligned score of one example.
double aligned_score(const NetParams& params, const Dataset& data, std::size_t i) {
    const std::vector<double> f = forward_all(params, data.x(i));
    if (data.kind() == LabelKind::multiclass) {
        const auto y = static_cast<std::size_t>(data.label(i));
        double other = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < f.size(); ++k)
            if (k != y) other = std::max(other, f[k]);
        return f[y] - other;
    }
    return data.label(i) * f[0];
}

void require_classification(const NetParams& params, const Dataset& data) {
    if (data.kind() == LabelKind::regression) throw std::invalid_argument("margins need classification labels");
    const std::size_t expected = data.kind() == LabelKind::binary ? 1 : data.num_classes();
    if (params.outputs() != expected)
        throw DimensionError("network has " + std::to_string(params.outputs()) + " outputs, labels need " +
                             std::to_string(expected));
}

}  // namespace

MarginReport normalized_margin(const NetParams& params, const Dataset& data) {
    require_classification(params, data);
    const double norm = params.frobenius_norm();
    if (!(norm > 0.0)) throw DegenerateInputError("normalized margin of zero-norm parameters");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < data.n(); ++i) m = std::min(m, aligned_score(params, data, i));
    MarginReport rep;
    rep.frob_norm = norm;
    rep.unnormalized_margin = m;
    rep.normalized_margin = m / std::pow(norm, static_cast<double>(params.depth()));
    rep.zero_train_error = m > 0.0;
    return rep;
}

double classification_error(const NetParams& params, const Dataset& data) {
    require_classification(params, data);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < data.n(); ++i)
        if (!(aligned_score(params, data, i) > 0.0)) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(data.n());
}

double truncated_squared_error(const NetParams& params, const Dataset& data) {
    double s = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double e = forward(params, data.x(i)) - data.label(i);
        s += std::min(e * e, 1.0);
    }
    return s / static_cast<double>(data.n());
}

double mean_squared_error(const NetParams& params, const Dataset& data) {
    double s = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double e = forward(params, data.x(i)) - data.label(i);
        s += e * e;
    }
    return s / static_cast<double>(data.n());
}

double lambda_schedule(double gamma_star, double n, double l, double r, double a, double c) {
    if (!(gamma_star > 0.0) || !(n > 0.0) || !(r > 0.0) || !(a > 0.0) || !(c > 0.0))
        throw std::invalid_argument("lambda_schedule: arguments must be positive");
    if (!(l >= 2.0)) throw std::invalid_argument("lambda_schedule: need l >= 2");
    const double head = std::exp(-std::pow(std::pow(2.0, r / a) - 1.0, -a / r));
    return head * std::pow(gamma_star, r / a) / (std::pow(n, c) * std::pow(l - 1.0, c));
}

double generalization_bound(const BoundInputs& b) {
    if (!(b.C > 0.0) || !(b.gamma > 0.0) || !(b.q > 0.0) || !(b.n > 0.0))
        throw std::invalid_argument("generalization_bound: C, gamma, q, n must be positive");
    if (!(b.delta > 0.0 && b.delta < 1.0)) throw std::invalid_argument("generalization_bound: delta must be in (0, 1)");
    const double first = b.C / (b.gamma * std::pow(b.q, (b.q - 1.0) / 2.0) * std::sqrt(b.n));
    const double inner = std::max(std::log2(4.0 * b.C / b.gamma), 2.0);
    return first + std::sqrt(std::log(inner) / b.n) + std::sqrt(std::log(1.0 / b.delta) / b.n);
}

double activation_drift(const NetParams& a, const NetParams& b, const Dataset& data) {
    if (!a.is_two_layer() || !b.is_two_layer()) throw std::invalid_argument("activation_drift: two-layer nets required");
    if (!a.same_shape(b)) throw DimensionError("activation_drift: widths differ");
    if (a.input_dim() != data.d()) throw DimensionError("activation_drift: data dimension mismatch");
    const auto& k = simd::kernels();
    const std::size_t m = a.shape(0).rows;
    const std::size_t d = a.input_dim();
    std::size_t flips = 0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double* x = data.x(i).data();
        for (std::size_t j = 0; j < m; ++j) {
            const bool on_a = k.dot(a.hidden_unit_in(j).data(), x, d) >= 0.0;
            const bool on_b = k.dot(b.hidden_unit_in(j).data(), x, d) >= 0.0;
            if (on_a != on_b) ++flips;
        }
    }
    return static_cast<double>(flips) / static_cast<double>(m * data.n());
}

}  // namespace marginlab
