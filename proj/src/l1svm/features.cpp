#include "marginlab/core/errors.hpp"
#include "marginlab/l1svm/l1svm.hpp"
#include "marginlab/simd/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace marginlab {

FeatureGrid::FeatureGrid(GridKind kind, std::size_t dim, std::vector<double> dirs)
    : kind_(kind), dim_(dim), count_(dim == 0 ? 0 : dirs.size() / dim), dirs_(std::move(dirs)) {
    if (count_ == 0) throw std::invalid_argument("feature grid is empty");
    const auto& k = simd::kernels();
    for (std::size_t i = 0; i < count_; ++i) {
        double* u = dirs_.data() + i * dim_;
        const double norm = std::sqrt(k.sum_sq(u, dim_));
        if (!(norm > 0.0)) throw DegenerateInputError("grid direction " + std::to_string(i) + " is zero");
        for (std::size_t c = 0; c < dim_; ++c) u[c] /= norm;
    }
}

FeatureGrid FeatureGrid::from_directions(const std::vector<std::vector<double>>& directions) {
    if (directions.empty()) throw std::invalid_argument("feature grid is empty");
    const std::size_t dim = directions.front().size();
    std::vector<double> flat;
    for (const auto& u : directions) {
        if (u.size() != dim) throw DimensionError("grid directions have different dimensions");
        flat.insert(flat.end(), u.begin(), u.end());
    }
    return FeatureGrid(GridKind::explicit_list, dim, std::move(flat));
}

FeatureGrid FeatureGrid::interval_1d(std::size_t resolution) {
    std::vector<double> flat;
    flat.reserve(2 * resolution);
    for (std::size_t k = 0; k < resolution; ++k) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(resolution);
        flat.push_back(std::cos(t));
        flat.push_back(std::sin(t));
    }
    return FeatureGrid(GridKind::interval_1d, 2, std::move(flat));
}

FeatureGrid FeatureGrid::sphere(std::size_t d, std::size_t count, Seed seed) {
    if (d < 2) throw DimensionError("sphere grid needs d >= 2");
    std::vector<double> flat;
    flat.reserve(d * count);
    if (d == 2) {
        FeatureGrid circle = interval_1d(count);
        return FeatureGrid(GridKind::sphere, 2, std::move(circle.dirs_));
    }
    if (d == 3) {
        const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t k = 0; k < count; ++k) {
            const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(count);
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden_angle * static_cast<double>(k);
            flat.push_back(rho * std::cos(phi));
            flat.push_back(rho * std::sin(phi));
            flat.push_back(z);
        }
    } else {
        for (std::size_t k = 0; k < count; ++k) {
            CounterRng rng(seed, k);
            for (std::size_t c = 0; c < d; ++c) flat.push_back(rng.normal());
        }
    }
    return FeatureGrid(GridKind::sphere, d, std::move(flat));
}

FeatureGrid FeatureGrid::merged(const FeatureGrid& other) const {
    if (other.dim_ != dim_) throw DimensionError("cannot merge grids of different dimension");
    std::vector<double> flat = dirs_;
    flat.insert(flat.end(), other.dirs_.begin(), other.dirs_.end());
    return FeatureGrid(kind_ == other.kind_ ? kind_ : GridKind::explicit_list, dim_, std::move(flat));
}

std::vector<double> grid_input(const FeatureGrid& grid, std::span<const double> x) {
    if (grid.kind() == GridKind::interval_1d && x.size() == 1) return {x[0], 1.0};
    if (x.size() != grid.dim())
        throw DimensionError("input dimension " + std::to_string(x.size()) + " does not match grid dimension " +
                             std::to_string(grid.dim()));
    return {x.begin(), x.end()};
}

std::vector<double> lifted_features(const FeatureGrid& grid, std::span<const double> x) {
    const std::vector<double> xt = grid_input(grid, x);
    const auto& k = simd::kernels();
    std::vector<double> phi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) phi[i] = k.dot(grid.direction(i).data(), xt.data(), xt.size());
    k.relu(phi.data(), phi.data(), phi.size());
    return phi;
}

double SparseLiftedFn::one_norm() const noexcept {
    double s = 0.0;
    for (const auto& a : atoms) s += std::abs(a.coefficient);
    return s;
}

double SparseLiftedFn::evaluate(std::span<const double> x) const {
    const auto& k = simd::kernels();
    double s = 0.0;
    for (const auto& a : atoms) {
        if (a.direction.size() != x.size()) throw DimensionError("atom dimension does not match input");
        const double t = k.dot(a.direction.data(), x.data(), x.size());
        if (t > 0.0) s += a.coefficient * t;
    }
    return s;
}

}  // namespace marginlab
