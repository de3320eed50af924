#pragma once

#include "marginlab/core/dataset.hpp"
#include "marginlab/core/rng.hpp"
#include "marginlab/net/params.hpp"

#include <cstddef>

namespace marginlab {

// The four-case distribution with informative coordinates 1 and 2:
//   y=+1: x1 = +-1, x2 = 0      y=-1: x1 = 0, x2 = +-1
// each case with probability 1/4, coordinates 3..d uniform +-1.
// Throws DimensionError when d < 3.
Dataset sample_distribution_d(std::size_t n, std::size_t d, Seed seed);

enum class TeacherTarget { classification, regression };

struct TeacherSampleOptions {
    TeacherTarget target = TeacherTarget::classification;
    double margin_floor = 0.0;          // |teacher(x)| >= margin_floor, classification only
    std::size_t probe_batch = 10'000;   // draws used to estimate the acceptance rate
    double min_acceptance = 1e-4;
};

// Inputs ~ N(0, I_d); labels sign(teacher(x)) or teacher(x). Rejection sampling
// keeps only inputs with |teacher(x)| >= margin_floor.
// Throws InfeasibleMarginError when the probe batch acceptance is below min_acceptance.
Dataset sample_teacher_net(std::size_t n, const NetParams& teacher, const TeacherSampleOptions& options,
                           Seed seed);

// Two-layer teacher with i.i.d. N(0,1) entries.
NetParams make_teacher(std::size_t d, std::size_t width, Seed seed);

// One-dimensional classification data on an even grid of (-1, 1):
// x_i = -1 + (2i + 1)/n, y = +1 when |x| > threshold, else -1.
Dataset sample_interval_1d(std::size_t n, double threshold = 0.5);

// (x_1..x_d) -> (x_1..x_d, 1): the bias trick used by bias-free networks.
Dataset lift_with_bias(const Dataset& data);

}  // namespace marginlab
