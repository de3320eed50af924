#include "marginlab/net/experiments.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace marginlab {

namespace {

void require_decreasing(const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw std::invalid_argument("lambda list is empty");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0)) throw std::invalid_argument("lambdas must be positive");
        if (i > 0 && !(lambdas[i] < lambdas[i - 1])) throw std::invalid_argument("lambdas must be strictly decreasing");
    }
}

}  // namespace

MarginSweepResult margin_sweep(const Dataset& data, const NetParams& init, const std::vector<double>& lambdas,
                               const MarginSweepOptions& options) {
    require_decreasing(lambdas);
    MarginSweepResult out{{}, init, 0};
    TrainConfig cfg = options.train;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (k > 0 && options.rescale_warm_start)
            out.final_params.scale(std::pow(lambdas[k - 1] / lambdas[k], 1.0 / (cfg.r + 1.0)));
        cfg.lambda = lambdas[k];
        TrainResult tr = train(out.final_params, data, cfg);
        out.final_params = std::move(tr.params);
        MarginReport rep = normalized_margin(out.final_params, data);
        rep.lambda = lambdas[k];
        rep.train_loss = tr.loss_trace.back();
        if (!rep.zero_train_error) ++out.flagged;
        out.reports.push_back(rep);
    }
    return out;
}

RegressionSweepResult min_norm_regression_sweep(const Dataset& data, const NetParams& init,
                                                const std::vector<double>& lambdas, const TrainConfig& base,
                                                const std::optional<Dataset>& test, double mse_tolerance) {
    require_decreasing(lambdas);
    if (data.kind() != LabelKind::regression) throw std::invalid_argument("regression sweep needs real targets");
    RegressionSweepResult out{{}, init, false};
    TrainConfig cfg = base;
    cfg.loss = LossKind::squared;
    for (double lambda : lambdas) {
        cfg.lambda = lambda;
        out.final_params = train(out.final_params, data, cfg).params;
        out.rows.push_back({lambda, mean_squared_error(out.final_params, data), out.final_params.frobenius_sq(),
                            test ? truncated_squared_error(out.final_params, *test)
                                 : std::numeric_limits<double>::quiet_NaN()});
    }
    out.interpolated = out.rows.back().train_mse <= mse_tolerance;
    return out;
}

}  // namespace marginlab
