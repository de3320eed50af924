#include "marginlab/core/samplers.hpp"

#include "marginlab/core/errors.hpp"

#include <cmath>
#include <string>

namespace marginlab {

Dataset sample_distribution_d(std::size_t n, std::size_t d, Seed seed) {
    if (d < 3) throw DimensionError("distribution D needs d >= 3, got d = " + std::to_string(d));
    if (n == 0) throw std::invalid_argument("sample_distribution_d: n must be positive");
    std::vector<double> features(n * d, 0.0);
    std::vector<double> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(seed, i);
        double* x = features.data() + i * d;
        switch (rng.below(4)) {
            case 0: labels[i] = 1.0; x[0] = 1.0; break;
            case 1: labels[i] = 1.0; x[0] = -1.0; break;
            case 2: labels[i] = -1.0; x[1] = 1.0; break;
            default: labels[i] = -1.0; x[1] = -1.0; break;
        }
        for (std::size_t k = 2; k < d; ++k) x[k] = rng.sign();
    }
    return Dataset::from_rows(d, std::move(features), std::move(labels), LabelKind::binary);
}

NetParams make_teacher(std::size_t d, std::size_t width, Seed seed) {
    return init_params(d, {width}, 1, InitScheme::standard_normal, seed);
}

namespace {

void draw_gaussian(CounterRng& rng, std::vector<double>& x) {
    for (double& v : x) v = rng.normal();
}

}  // namespace

Dataset sample_teacher_net(std::size_t n, const NetParams& teacher, const TeacherSampleOptions& options,
                           Seed seed) {
    if (n == 0) throw std::invalid_argument("sample_teacher_net: n must be positive");
    if (teacher.depth() != 2 || teacher.outputs() != 1)
        throw std::invalid_argument("sample_teacher_net: teacher must be a two-layer single-output net");
    if (options.margin_floor < 0.0) throw std::invalid_argument("margin_floor must be >= 0");
    const std::size_t d = teacher.input_dim();
    const bool classify = options.target == TeacherTarget::classification;
    const double floor = classify ? options.margin_floor : 0.0;
    std::vector<double> x(d);

    std::size_t max_draws = 20 * n + 1000;  // score == 0 is rejected even without a floor
    if (floor > 0.0) {
        const Seed probe_seed = derive_seed(seed, 0x70726f6265ULL);
        std::size_t accepted = 0;
        for (std::size_t k = 0; k < options.probe_batch; ++k) {
            CounterRng rng(probe_seed, k);
            draw_gaussian(rng, x);
            if (std::abs(forward(teacher, x)) >= floor) ++accepted;
        }
        const double rate = static_cast<double>(accepted) / static_cast<double>(options.probe_batch);
        if (rate < options.min_acceptance)
            throw InfeasibleMarginError("teacher margin floor " + std::to_string(floor) +
                                        " accepted " + std::to_string(accepted) + " of " +
                                        std::to_string(options.probe_batch) + " probe draws");
        max_draws = static_cast<std::size_t>(std::ceil(20.0 * static_cast<double>(n) / rate)) + 1000;
    }

    std::vector<double> features;
    std::vector<double> labels;
    features.reserve(n * d);
    labels.reserve(n);
    for (std::size_t k = 0; labels.size() < n; ++k) {
        if (k >= max_draws)
            throw InfeasibleMarginError("rejection sampling exhausted " + std::to_string(max_draws) + " draws");
        CounterRng rng(seed, k);
        draw_gaussian(rng, x);
        const double score = forward(teacher, x);
        if (classify) {
            if (std::abs(score) < floor || score == 0.0) continue;
            labels.push_back(score > 0.0 ? 1.0 : -1.0);
        } else {
            labels.push_back(score);
        }
        features.insert(features.end(), x.begin(), x.end());
    }
    return Dataset::from_rows(d, std::move(features), std::move(labels),
                              classify ? LabelKind::binary : LabelKind::regression);
}

Dataset sample_interval_1d(std::size_t n, double threshold) {
    if (n == 0) throw std::invalid_argument("sample_interval_1d: n must be positive");
    std::vector<double> features(n);
    std::vector<double> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        features[i] = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        labels[i] = std::abs(features[i]) > threshold ? 1.0 : -1.0;
    }
    return Dataset::from_rows(1, std::move(features), std::move(labels), LabelKind::binary);
}

Dataset lift_with_bias(const Dataset& data) {
    const std::size_t d = data.d();
    std::vector<double> features;
    features.reserve(data.n() * (d + 1));
    for (std::size_t i = 0; i < data.n(); ++i) {
        const auto xi = data.x(i);
        features.insert(features.end(), xi.begin(), xi.end());
        features.push_back(1.0);
    }
    return Dataset::from_rows(d + 1, std::move(features), data.labels(), data.kind(), data.num_classes());
}

}  // namespace marginlab
