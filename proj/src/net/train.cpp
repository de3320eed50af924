#include "marginlab/core/errors.hpp"
#include "marginlab/net/train.hpp"
#include "marginlab/simd/kernels.hpp"

#include <cmath>

namespace marginlab {

TrainResult train(const NetParams& init, const Dataset& data, const TrainConfig& config) {
    config.validate();
    TrainResult result{init, {}, 0};
    result.loss_trace.reserve(config.steps + 1);
    const auto& k = simd::kernels();
    for (std::size_t step = 0;; ++step) {
        LossGrad lg = [&] {
            try {
                return loss_and_grad(result.params, data, config);
            } catch (const NumericError& e) {
                throw DivergenceError(step, e.what());
            }
        }();
        if (!std::isfinite(lg.loss)) throw DivergenceError(step, "objective is not finite");
        if (!result.loss_trace.empty() && lg.loss > result.loss_trace.back()) ++result.upticks;
        result.loss_trace.push_back(lg.loss);
        if (step == config.steps) break;
        k.axpy(-config.lr, lg.grad.values().data(), result.params.values().data(), result.params.size());
    }
    return result;
}

}  // namespace marginlab
