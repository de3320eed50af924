#pragma once

#include "marginlab/core/dataset.hpp"
#include "marginlab/net/margin.hpp"
#include "marginlab/net/params.hpp"
#include "marginlab/net/train.hpp"

#include <optional>
#include <vector>

namespace marginlab {

struct MarginSweepOptions {
    TrainConfig train;  // lambda is overwritten per sweep entry
    // Multiply ||Theta|| by (lambda_prev / lambda_next)^{1/(r+1)} before each warm start.
    bool rescale_warm_start = true;
};

struct MarginSweepResult {
    std::vector<MarginReport> reports;  // one per lambda, same order
    NetParams final_params;
    std::size_t flagged = 0;  // reports without zero training error
};

// Trains one network per lambda (strictly decreasing, positive), each warm
// started from the previous solution.
MarginSweepResult margin_sweep(const Dataset& data, const NetParams& init, const std::vector<double>& lambdas,
                               const MarginSweepOptions& options);

struct RegressionSweepRow {
    double lambda;
    double train_mse;
    double frob_sq;
    double test_truncated;  // NaN without test data
};

struct RegressionSweepResult {
    std::vector<RegressionSweepRow> rows;
    NetParams final_params;
    bool interpolated = false;  // train MSE at the smallest lambda <= mse_tolerance
};

// Squared-loss training over a decreasing lambda grid with warm starts.
RegressionSweepResult min_norm_regression_sweep(const Dataset& data, const NetParams& init,
                                                const std::vector<double>& lambdas, const TrainConfig& base,
                                                const std::optional<Dataset>& test = std::nullopt,
                                                double mse_tolerance = 1e-4);

}  // namespace marginlab
