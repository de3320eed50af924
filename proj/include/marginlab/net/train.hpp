#pragma once

#include "marginlab/core/dataset.hpp"
#include "marginlab/core/rng.hpp"
#include "marginlab/net/params.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace marginlab {

enum class LossKind {
    logistic,          // binary labels, single output: log(1 + exp(-y f))
    cross_entropy,     // multiclass labels, one output per class: softmax cross-entropy
    squared,           // real targets: (y - f)^2
    truncated_squared  // real targets: min((y - f)^2, 1), zero gradient where truncated
};

std::string_view loss_kind_name(LossKind kind) noexcept;
LossKind parse_loss_kind(std::string_view name);

struct TrainConfig {
    double lambda = 0.0;  // weight of ||Theta||_F^r
    double r = 2.0;
    double lr = 0.1;
    std::size_t steps = 1000;
    LossKind loss = LossKind::logistic;

    void validate() const;
};

struct LossGrad {
    double loss = 0.0;       // data term + lambda ||Theta||_F^r
    double data_loss = 0.0;  // (1/n) sum_i loss_i
    NetParams grad;
};

// Exact gradient under the convention relu'(0) = 0. Throws NumericError
// naming the layer when a value is not finite, std::invalid_argument when
// the label kind does not fit the loss.
LossGrad loss_and_grad(const NetParams& params, const Dataset& data, const TrainConfig& config);
// Objective value only.
double objective(const NetParams& params, const Dataset& data, const TrainConfig& config);

struct TrainResult {
    NetParams params;
    std::vector<double> loss_trace;  // objective before each step and after the last one
    std::size_t upticks = 0;         // steps whose objective exceeded the previous one
};

// Full-batch gradient descent with fixed learning rate. Throws
// DivergenceError with the step index on a non-finite objective.
TrainResult train(const NetParams& init, const Dataset& data, const TrainConfig& config);

// Binary-to-two-class embedding: outputs (-f/2, f/2), labels -1 -> class 0, +1 -> class 1.
// Under it the logistic loss equals the two-class cross-entropy.
NetParams as_two_class(const NetParams& binary);
Dataset as_two_class(const Dataset& binary);

}  // namespace marginlab
