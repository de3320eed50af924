#pragma once

#include "marginlab/core/dataset.hpp"
#include "marginlab/core/rng.hpp"
#include "marginlab/net/params.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace marginlab {

enum class GridKind {
    explicit_list,
    interval_1d,  // directions (w, b) on the unit circle, acting on lifted inputs (x, 1)
    sphere        // quasi-uniform points on S^{d-1}
};

// Finite set of unit directions indexing the relu features [u^T x]_+.
class FeatureGrid {
public:
    // Directions are normalized; throws DegenerateInputError on a zero vector.
    static FeatureGrid from_directions(const std::vector<std::vector<double>>& directions);
    // `resolution` evenly spaced angles 2 pi k / resolution on the circle.
    static FeatureGrid interval_1d(std::size_t resolution);
    // d = 2: evenly spaced circle; d = 3: spherical Fibonacci lattice;
    // d >= 4: normalized Gaussian draws (the lattice has no canonical
    // higher-dimensional form), deterministic in `seed`.
    static FeatureGrid sphere(std::size_t d, std::size_t count, Seed seed = Seed{0});

    GridKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return count_; }
    std::size_t dim() const noexcept { return dim_; }
    std::span<const double> direction(std::size_t k) const noexcept { return {dirs_.data() + k * dim_, dim_}; }

    FeatureGrid merged(const FeatureGrid& other) const;

private:
    FeatureGrid(GridKind kind, std::size_t dim, std::vector<double> dirs);
    GridKind kind_;
    std::size_t dim_;
    std::size_t count_;
    std::vector<double> dirs_;
};

// Input as the grid sees it: 1-D grids lift a scalar x to (x, 1); inputs
// already of the grid dimension pass through.
std::vector<double> grid_input(const FeatureGrid& grid, std::span<const double> x);

// phi(x)[k] = [u_k^T x~]_+ over grid directions, x~ = grid_input(grid, x).
std::vector<double> lifted_features(const FeatureGrid& grid, std::span<const double> x);

struct Atom {
    std::vector<double> direction;  // unit norm
    double coefficient;
};

// Finitely supported signed measure on the unit sphere.
struct SparseLiftedFn {
    std::vector<Atom> atoms;

    double one_norm() const noexcept;
    // <alpha, phi_relu(x)> = sum_k alpha_k [u_k^T x]_+
    double evaluate(std::span<const double> x) const;
};

struct L1MarginResult {
    double gamma = 0.0;  // optimal LP value, >= 0
    SparseLiftedFn alpha;
    bool separable = false;  // gamma > 0; otherwise alpha is empty
    std::size_t iterations = 0;
};

// max gamma  s.t.  y_i sum_k alpha_k phi_k(x_i) >= gamma,  ||alpha||_1 <= 1,
// by a dense primal simplex on the split alpha = alpha+ - alpha-. The origin
// is feasible so no phase one is needed. The result is a basic solution, so
// |supp(alpha)| <= n. Dantzig pricing falls back to Bland's rule after a run
// of degenerate pivots; throws NumericError past the iteration cap.
L1MarginResult solve_l1_margin(const Dataset& data, const FeatureGrid& grid, std::size_t max_iterations = 200'000);

// Hidden unit j = (w_j, u_j) = (sign(a) sqrt(|a|/2), sqrt(|a|/2) u) for atom
// (u, a); unused units are zero. Then ||Theta||_F^2 = ||alpha||_1 and
// forward = <alpha, phi>/2. Throws std::invalid_argument when width < atom count.
NetParams sparse_to_net(const SparseLiftedFn& alpha, std::size_t width, std::size_t input_dim);
// Input dimension taken from the atoms; alpha must be non-empty.
NetParams sparse_to_net(const SparseLiftedFn& alpha, std::size_t width);

// Atom (u_j / |u_j|, 2 w_j |u_j|) per hidden unit with u_j != 0 and w_j != 0.
SparseLiftedFn net_to_sparse(const NetParams& params);

}  // namespace marginlab
