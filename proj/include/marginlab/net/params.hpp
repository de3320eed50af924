#pragma once

#include "marginlab/core/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace marginlab {

struct LayerShape {
    std::size_t rows;  // outputs of the layer
    std::size_t cols;  // inputs of the layer
    std::size_t offset;
};

// Weights of a bias-free relu network
//   f(x) = W_q relu(W_{q-1} relu(... relu(W_1 x)))
// stored contiguously, layer by layer, each layer row-major (rows = outputs).
// The network is q-positive-homogeneous in its parameters.
class NetParams {
public:
    // Zero-initialized network; hidden = (m_1, ..., m_{q-1}), q >= 2.
    NetParams(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t outputs = 1);

    // Two-layer convenience constructor from hidden units (u_j, w_j).
    static NetParams two_layer(const std::vector<std::vector<double>>& u, const std::vector<double>& w);

    std::size_t depth() const noexcept { return shapes_.size(); }
    std::size_t input_dim() const noexcept { return shapes_.front().cols; }
    std::size_t outputs() const noexcept { return shapes_.back().rows; }
    std::vector<std::size_t> hidden_sizes() const;
    std::size_t size() const noexcept { return values_.size(); }

    const LayerShape& shape(std::size_t layer) const { return shapes_.at(layer); }
    std::span<double> layer(std::size_t j);
    std::span<const double> layer(std::size_t j) const;
    double& at(std::size_t j, std::size_t r, std::size_t c);
    double at(std::size_t j, std::size_t r, std::size_t c) const;

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double frobenius_sq() const noexcept;
    double frobenius_norm() const noexcept;
    NetParams scaled(double c) const;
    void scale(double c);
    bool same_shape(const NetParams& other) const noexcept;
    bool all_finite() const noexcept;

    bool is_two_layer() const noexcept { return depth() == 2 && outputs() == 1; }
    // Two-layer accessors: u_j = row j of W_1, w_j = W_2[0, j].
    std::span<const double> hidden_unit_in(std::size_t j) const;
    double hidden_unit_out(std::size_t j) const;

private:
    std::vector<LayerShape> shapes_;
    std::vector<double> values_;
};

enum class InitScheme {
    fan_in,          // N(0, 1/fan_in) per entry
    standard_normal  // N(0, 1) per entry
};

// Fills a network of the given architecture; `scale` multiplies every entry.
NetParams init_params(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::size_t outputs,
                      InitScheme scheme, Seed seed, double scale = 1.0);

// Scores of one input (length = outputs). Throws DimensionError.
std::vector<double> forward_all(const NetParams& params, std::span<const double> x);
// Scalar score of a single-output network.
double forward(const NetParams& params, std::span<const double> x);

}  // namespace marginlab
