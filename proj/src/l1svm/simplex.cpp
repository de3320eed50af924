#include "marginlab/core/errors.hpp"
#include "marginlab/l1svm/l1svm.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace marginlab {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-12;
constexpr std::size_t kDegenerateRunBeforeBland = 64;

// Dense tableau for  max c^T v  s.t.  M v <= b, v >= 0, b >= 0, with one
// slack per row so the all-slack basis is feasible.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t structural)
        : rows_(rows), cols_(structural + rows), width_(cols_ + 1), t_(rows * width_, 0.0), cost_(cols_ + 1, 0.0),
          basis_(rows) {
        for (std::size_t r = 0; r < rows_; ++r) {
            at(r, structural + r) = 1.0;
            basis_[r] = structural + r;
        }
    }

    double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
    double& rhs(std::size_t r) { return t_[r * width_ + cols_]; }
    // Reduced costs stored as -c so that a negative entry can enter.
    void set_objective(std::size_t c, double value) { cost_[c] = -value; }
    double objective() const { return cost_[cols_]; }

    std::size_t solve(std::size_t max_iterations) {
        std::size_t degenerate_run = 0;
        bool bland = false;
        for (std::size_t it = 0; it < max_iterations; ++it) {
            const std::size_t e = entering(bland);
            if (e == npos) return it;
            const std::size_t leave = leaving(e);
            if (leave == npos) throw NumericError("l1 margin LP reported unbounded; the feasible set is compact");
            if (rhs(leave) <= kPivotTol * std::abs(at(leave, e))) {
                if (++degenerate_run > kDegenerateRunBeforeBland) bland = true;
            } else {
                degenerate_run = 0;
            }
            pivot(leave, e);
        }
        throw NumericError("simplex iteration cap " + std::to_string(max_iterations) + " reached");
    }

    // Value of every column in the current basic solution.
    std::vector<double> solution() {
        std::vector<double> v(cols_, 0.0);
        for (std::size_t r = 0; r < rows_; ++r) v[basis_[r]] = rhs(r);
        return v;
    }

private:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::size_t entering(bool bland) const {
        std::size_t best = npos;
        double best_cost = -kCostTol;
        for (std::size_t c = 0; c < cols_; ++c) {
            if (cost_[c] < best_cost) {
                best = c;
                if (bland) return c;
                best_cost = cost_[c];
            }
        }
        return best;
    }

    // Minimum ratio; ties go to the smallest basic variable index.
    std::size_t leaving(std::size_t e) {
        std::size_t best = npos;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rows_; ++r) {
            const double a = at(r, e);
            if (a <= kPivotTol) continue;
            const double ratio = rhs(r) / a;
            if (ratio < best_ratio - 1e-15 || (ratio <= best_ratio + 1e-15 && best != npos && basis_[r] < basis_[best])) {
                best_ratio = std::min(best_ratio, ratio);
                best = r;
            }
        }
        return best;
    }

    void pivot(std::size_t pr, std::size_t pc) {
        double* prow = &t_[pr * width_];
        const double inv = 1.0 / prow[pc];
        for (std::size_t c = 0; c < width_; ++c) prow[c] *= inv;
        prow[pc] = 1.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr) continue;
            double* row = &t_[r * width_];
            const double f = row[pc];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < width_; ++c) row[c] -= f * prow[c];
            row[pc] = 0.0;
            if (row[cols_] < 0.0 && row[cols_] > -1e-13) row[cols_] = 0.0;
        }
        const double f = cost_[pc];
        if (f != 0.0) {
            for (std::size_t c = 0; c < width_; ++c) cost_[c] -= f * prow[c];
            cost_[pc] = 0.0;
        }
        basis_[pr] = pc;
    }

    std::size_t rows_;
    std::size_t cols_;
    std::size_t width_;
    std::vector<double> t_;
    std::vector<double> cost_;  // reduced costs, last entry = objective value
    std::vector<std::size_t> basis_;
};

}  // namespace

L1MarginResult solve_l1_margin(const Dataset& data, const FeatureGrid& grid, std::size_t max_iterations) {
    if (data.kind() != LabelKind::binary) throw std::invalid_argument("solve_l1_margin: binary labels required");
    const std::size_t n = data.n();
    const std::size_t k = grid.size();
    // Columns: alpha+ (k), alpha- (k), gamma (1); rows: n margin rows, 1 norm row.
    const std::size_t gamma_col = 2 * k;
    Tableau tab(n + 1, 2 * k + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> phi = lifted_features(grid, data.x(i));
        const double y = data.label(i);
        for (std::size_t j = 0; j < k; ++j) {
            tab.at(i, j) = -y * phi[j];
            tab.at(i, k + j) = y * phi[j];
        }
        tab.at(i, gamma_col) = 1.0;
    }
    for (std::size_t j = 0; j < 2 * k; ++j) tab.at(n, j) = 1.0;
    tab.rhs(n) = 1.0;
    tab.set_objective(gamma_col, 1.0);

    L1MarginResult out;
    out.iterations = tab.solve(max_iterations);
    const std::vector<double> v = tab.solution();
    out.gamma = std::max(0.0, v[gamma_col]);
    out.separable = out.gamma > 1e-12;
    if (!out.separable) {
        out.gamma = 0.0;
        return out;
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double a = v[j] - v[k + j];
        if (a == 0.0) continue;
        const auto u = grid.direction(j);
        out.alpha.atoms.push_back({{u.begin(), u.end()}, a});
    }
    return out;
}

}  // namespace marginlab
