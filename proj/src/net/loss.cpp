#include "marginlab/core/errors.hpp"
#include "marginlab/net/train.hpp"
#include "marginlab/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace marginlab {

std::string_view loss_kind_name(LossKind kind) noexcept {
    switch (kind) {
        case LossKind::logistic: return "logistic";
        case LossKind::cross_entropy: return "cross_entropy";
        case LossKind::squared: return "squared";
        case LossKind::truncated_squared: return "truncated_squared";
    }
    return "?";
}

LossKind parse_loss_kind(std::string_view name) {
    for (LossKind k : {LossKind::logistic, LossKind::cross_entropy, LossKind::squared, LossKind::truncated_squared})
        if (loss_kind_name(k) == name) return k;
    throw std::invalid_argument("unknown loss kind '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
    if (!(lambda >= 0.0)) throw std::invalid_argument("TrainConfig: lambda must be >= 0");
    if (!(r > 0.0)) throw std::invalid_argument("TrainConfig: r must be > 0");
    if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be > 0");
}

namespace {

void check_compatible(const NetParams& params, const Dataset& data, LossKind loss) {
    if (params.input_dim() != data.d())
        throw DimensionError("network input dimension " + std::to_string(params.input_dim()) + " but data has d = " +
                             std::to_string(data.d()));
    switch (loss) {
        case LossKind::logistic:
            if (data.kind() != LabelKind::binary || params.outputs() != 1)
                throw std::invalid_argument("logistic loss needs binary labels and one output");
            break;
        case LossKind::cross_entropy:
            if (data.kind() != LabelKind::multiclass || params.outputs() != data.num_classes())
                throw std::invalid_argument("cross-entropy needs multiclass labels and one output per class");
            break;
        case LossKind::squared:
        case LossKind::truncated_squared:
            if (data.kind() == LabelKind::multiclass || params.outputs() != 1)
                throw std::invalid_argument("squared losses need real or binary targets and one output");
            break;
    }
}

double log1p_exp(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

// Loss of one example; writes dloss/dscore into g.
double example_loss(LossKind kind, const double* f, std::size_t outputs, double y, double* g) {
    switch (kind) {
        case LossKind::logistic: {
            const double m = y * f[0];
            g[0] = m > 0.0 ? -y * std::exp(-m) / (1.0 + std::exp(-m)) : -y / (1.0 + std::exp(m));
            return log1p_exp(-m);
        }
        case LossKind::cross_entropy: {
            const auto label = static_cast<std::size_t>(y);
            const double mx = *std::max_element(f, f + outputs);
            double z = 0.0;
            for (std::size_t k = 0; k < outputs; ++k) z += std::exp(f[k] - mx);
            for (std::size_t k = 0; k < outputs; ++k) g[k] = std::exp(f[k] - mx) / z;
            g[label] -= 1.0;
            return mx + std::log(z) - f[label];
        }
        case LossKind::squared: {
            const double e = f[0] - y;
            g[0] = 2.0 * e;
            return e * e;
        }
        case LossKind::truncated_squared: {
            const double e = f[0] - y;
            if (e * e >= 1.0) {
                g[0] = 0.0;
                return 1.0;
            }
            g[0] = 2.0 * e;
            return e * e;
        }
    }
    return 0.0;
}

struct Workspace {
    // acts[0] = x, acts[j] = relu(pre[j-1]); pre[j] = W_j acts[j]
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> pre;
    std::vector<double> delta;
    std::vector<double> delta_prev;
    std::vector<double> gout;

    explicit Workspace(const NetParams& p) : acts(p.depth()), pre(p.depth()) {
        for (std::size_t j = 0; j < p.depth(); ++j) {
            acts[j].resize(p.shape(j).cols);
            pre[j].resize(p.shape(j).rows);
        }
        gout.resize(p.outputs());
    }

    void forward(const NetParams& p, std::span<const double> x) {
        const auto& k = simd::kernels();
        std::copy(x.begin(), x.end(), acts[0].begin());
        for (std::size_t j = 0; j < p.depth(); ++j) {
            const auto& s = p.shape(j);
            k.gemv(p.layer(j).data(), s.rows, s.cols, acts[j].data(), pre[j].data());
            if (j + 1 < p.depth()) k.relu(pre[j].data(), acts[j + 1].data(), s.rows);
        }
    }
};

double regularizer(const NetParams& params, const TrainConfig& config) {
    if (config.lambda == 0.0) return 0.0;
    return config.lambda * std::pow(params.frobenius_sq(), config.r / 2.0);
}

double evaluate(const NetParams& params, const Dataset& data, const TrainConfig& config, NetParams* grad,
                double* data_loss_out) {
    check_compatible(params, data, config.loss);
    const auto& k = simd::kernels();
    Workspace ws(params);
    const std::size_t q = params.depth();
    const double inv_n = 1.0 / static_cast<double>(data.n());
    double data_loss = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        ws.forward(params, data.x(i));
        const std::vector<double>& f = ws.pre[q - 1];
        data_loss += example_loss(config.loss, f.data(), f.size(), data.label(i), ws.gout.data());
        if (!grad) continue;
        ws.delta.assign(ws.gout.begin(), ws.gout.end());
        for (std::size_t j = q; j-- > 0;) {
            const auto& s = params.shape(j);
            k.ger(inv_n, ws.delta.data(), s.rows, ws.acts[j].data(), s.cols, grad->layer(j).data());
            if (j == 0) break;
            ws.delta_prev.assign(s.cols, 0.0);
            const double* w = params.layer(j).data();
            for (std::size_t r = 0; r < s.rows; ++r)
                if (ws.delta[r] != 0.0) k.axpy(ws.delta[r], w + r * s.cols, ws.delta_prev.data(), s.cols);
            k.relu_mask(ws.pre[j - 1].data(), ws.delta_prev.data(), s.cols);
            ws.delta.swap(ws.delta_prev);
        }
    }
    data_loss *= inv_n;
    if (!std::isfinite(data_loss)) throw NumericError("data loss is not finite (output layer " + std::to_string(q) + ")");
    const double reg = regularizer(params, config);
    if (grad && config.lambda != 0.0) {
        const double sq = params.frobenius_sq();
        if (sq > 0.0) {
            const double coef = config.lambda * config.r * std::pow(sq, config.r / 2.0 - 1.0);
            k.axpy(coef, params.values().data(), grad->values().data(), params.size());
        }
    }
    if (grad) {
        for (std::size_t j = 0; j < q; ++j)
            for (double v : grad->layer(j))
                if (!std::isfinite(v)) throw NumericError("gradient of layer " + std::to_string(j + 1) + " is not finite");
    }
    if (data_loss_out) *data_loss_out = data_loss;
    return data_loss + reg;
}

}  // namespace

LossGrad loss_and_grad(const NetParams& params, const Dataset& data, const TrainConfig& config) {
    LossGrad out{0.0, 0.0, NetParams(params.input_dim(), params.hidden_sizes(), params.outputs())};
    out.loss = evaluate(params, data, config, &out.grad, &out.data_loss);
    return out;
}

double objective(const NetParams& params, const Dataset& data, const TrainConfig& config) {
    return evaluate(params, data, config, nullptr, nullptr);
}

NetParams as_two_class(const NetParams& binary) {
    if (binary.outputs() != 1) throw std::invalid_argument("as_two_class: network must have one output");
    NetParams out(binary.input_dim(), binary.hidden_sizes(), 2);
    for (std::size_t j = 0; j + 1 < binary.depth(); ++j) {
        auto src = binary.layer(j);
        std::copy(src.begin(), src.end(), out.layer(j).begin());
    }
    const std::size_t last = binary.depth() - 1;
    for (std::size_t c = 0; c < binary.shape(last).cols; ++c) {
        out.at(last, 0, c) = -0.5 * binary.at(last, 0, c);
        out.at(last, 1, c) = 0.5 * binary.at(last, 0, c);
    }
    return out;
}

Dataset as_two_class(const Dataset& binary) {
    if (binary.kind() != LabelKind::binary) throw std::invalid_argument("as_two_class: binary labels required");
    std::vector<double> labels(binary.n());
    for (std::size_t i = 0; i < binary.n(); ++i) labels[i] = binary.label(i) > 0.0 ? 1.0 : 0.0;
    return Dataset::from_rows(binary.d(), binary.features(), std::move(labels), LabelKind::multiclass, 2);
}

}  // namespace marginlab
