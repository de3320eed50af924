#include "marginlab/net/params.hpp"

#include "marginlab/core/errors.hpp"
#include "marginlab/simd/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace marginlab {

NetParams::NetParams(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t outputs) {
    if (hidden.empty()) throw std::invalid_argument("network needs at least one hidden layer (q >= 2)");
    if (input_dim == 0 || outputs == 0) throw std::invalid_argument("network dimensions must be positive");
    std::size_t in = input_dim;
    std::size_t offset = 0;
    hidden.push_back(outputs);
    for (std::size_t rows : hidden) {
        if (rows == 0) throw std::invalid_argument("layer sizes must be positive");
        shapes_.push_back({rows, in, offset});
        offset += rows * in;
        in = rows;
    }
    values_.assign(offset, 0.0);
}

NetParams NetParams::two_layer(const std::vector<std::vector<double>>& u, const std::vector<double>& w) {
    if (u.empty() || u.size() != w.size()) throw std::invalid_argument("two_layer: need matching non-empty u, w");
    NetParams p(u.front().size(), {u.size()}, 1);
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (u[j].size() != p.input_dim()) throw DimensionError("two_layer: ragged hidden units");
        for (std::size_t c = 0; c < u[j].size(); ++c) p.at(0, j, c) = u[j][c];
        p.at(1, 0, j) = w[j];
    }
    return p;
}

std::vector<std::size_t> NetParams::hidden_sizes() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j + 1 < shapes_.size(); ++j) out.push_back(shapes_[j].rows);
    return out;
}

std::span<double> NetParams::layer(std::size_t j) {
    const auto& s = shapes_.at(j);
    return {values_.data() + s.offset, s.rows * s.cols};
}

std::span<const double> NetParams::layer(std::size_t j) const {
    const auto& s = shapes_.at(j);
    return {values_.data() + s.offset, s.rows * s.cols};
}

double& NetParams::at(std::size_t j, std::size_t r, std::size_t c) {
    const auto& s = shapes_.at(j);
    return values_[s.offset + r * s.cols + c];
}

double NetParams::at(std::size_t j, std::size_t r, std::size_t c) const {
    const auto& s = shapes_.at(j);
    return values_[s.offset + r * s.cols + c];
}

double NetParams::frobenius_sq() const noexcept {
    return simd::kernels().sum_sq(values_.data(), values_.size());
}

double NetParams::frobenius_norm() const noexcept { return std::sqrt(frobenius_sq()); }

NetParams NetParams::scaled(double c) const {
    NetParams out = *this;
    out.scale(c);
    return out;
}

void NetParams::scale(double c) { simd::kernels().scale(c, values_.data(), values_.size()); }

bool NetParams::same_shape(const NetParams& other) const noexcept {
    if (shapes_.size() != other.shapes_.size()) return false;
    for (std::size_t j = 0; j < shapes_.size(); ++j)
        if (shapes_[j].rows != other.shapes_[j].rows || shapes_[j].cols != other.shapes_[j].cols) return false;
    return true;
}

bool NetParams::all_finite() const noexcept {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::span<const double> NetParams::hidden_unit_in(std::size_t j) const {
    const auto& s = shapes_.front();
    return {values_.data() + s.offset + j * s.cols, s.cols};
}

double NetParams::hidden_unit_out(std::size_t j) const { return at(1, 0, j); }

NetParams init_params(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::size_t outputs,
                      InitScheme scheme, Seed seed, double scale) {
    NetParams p(input_dim, hidden, outputs);
    for (std::size_t j = 0; j < p.depth(); ++j) {
        const auto& s = p.shape(j);
        const double sd = scale * (scheme == InitScheme::fan_in ? 1.0 / std::sqrt(static_cast<double>(s.cols)) : 1.0);
        CounterRng rng(seed, j);
        for (double& v : p.layer(j)) v = sd * rng.normal();
    }
    return p;
}

std::vector<double> forward_all(const NetParams& params, std::span<const double> x) {
    if (x.size() != params.input_dim())
        throw DimensionError("input has dimension " + std::to_string(x.size()) + ", network expects " +
                             std::to_string(params.input_dim()));
    const auto& k = simd::kernels();
    std::vector<double> a(x.begin(), x.end());
    std::vector<double> z;
    for (std::size_t j = 0; j < params.depth(); ++j) {
        const auto& s = params.shape(j);
        z.assign(s.rows, 0.0);
        k.gemv(params.layer(j).data(), s.rows, s.cols, a.data(), z.data());
        if (j + 1 < params.depth()) k.relu(z.data(), z.data(), z.size());
        a.swap(z);
    }
    return a;
}

double forward(const NetParams& params, std::span<const double> x) {
    if (params.outputs() != 1) throw DimensionError("forward(): network has multiple outputs");
    return forward_all(params, x).front();
}

}  // namespace marginlab
