#pragma once

// Numeric probes of the kernel lower-bound machinery on distribution D.
// A D-point is x = (x_1, x_2, z) with z in {-1, +1}^{d-2} the "headless" tail.

#include "marginlab/core/dataset.hpp"
#include "marginlab/core/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace marginlab {

// h1(t) = t (1 - arccos(t) / pi),  h2(t) = sqrt(1 - t^2) / pi
double h1(double t);
double h2(double t);

// K~1(z', z) = K1((0, 1, z'), (1, 0, z)) = (d - 1) h1(z^T z' / (d - 1)); K~2 likewise with K2, h2.
// Closed forms; throw DimensionError unless both tails have d - 2 entries equal to +-1.
double ktilde1(std::span<const double> z, std::span<const double> z_prime, std::size_t d);
double ktilde2(std::span<const double> z, std::span<const double> z_prime, std::size_t d);
// The same quantities from the lifted definition through the ntk-kernel K1, K2.
double ktilde1_lifted(std::span<const double> z, std::span<const double> z_prime);
double ktilde2_lifted(std::span<const double> z, std::span<const double> z_prime);

// f~(z; beta) = sum_i beta_i [ tau1 K~1(z_i, z) + tau2 (K~1(z_i, z) + K~2(z_i, z)) ]
// over tails z_i; `tails` is row-major with d - 2 columns.
double f_tilde(std::span<const double> z, std::span<const double> tails, std::span<const double> beta, double tau1,
               double tau2, std::size_t d);

// Row-major tails x_{i,-2} of a D-sample.
std::vector<double> tails_of(const Dataset& data);

struct ResidualStats {
    std::size_t count = 0;
    double k1_mean = 0.0;
    double k1_max = 0.0;
    double k2_mean = 0.0;
    double k2_max = 0.0;
};

// Over `trials` uniform tails z:
//   |K1(x, (1,0,z)) + K1(x, (-1,0,z)) - 2 K~1(x_{-2}, z)|  and the K2 analogue.
// Requires d >= 8 and x of length d. K~ terms use the lifted definition, so
// the K1 residual is exactly zero when x_1 = 0.
ResidualStats cancellation_residuals(std::span<const double> x, std::size_t d, std::size_t trials, Seed seed);

// Degree-4 polynomial g(t) = sum_k coeff[k] t^k with
//   g(t) = tau1 (d-1)(t/2 + t^2/pi + t^4/(6 pi)) + tau2 (d-1)(1/pi + t/2 + t^2/(2 pi) + t^4/(24 pi)).
struct PolyG {
    std::size_t d;
    double tau1;
    double tau2;
    double coeff[5];

    PolyG(std::size_t d, double tau1, double tau2);
    double operator()(double t) const noexcept;
    // Coefficient of t^k in g(t / (d - 1)).
    double scaled_coefficient(int k) const noexcept;
};

// |g(t) - (d-1)[(tau1 + tau2) h1(t) + tau2 h2(t)]|; DomainError for |t| > 0.75.
double poly_g_residual(double t, double tau1, double tau2, std::size_t d);

// E_z[(sum_i beta_i (z^T z_i)^q)(sum_i beta_i (z^T z_i)^p)] over all z in {-1,+1}^d.
// Each z is paired with -z, so mixed parity gives exactly 0. `points` is
// row-major with d columns. ScaleError for d > 14, DomainError for p or q > 6.
double cube_exp_bruteforce(std::size_t d, std::span<const double> points, std::span<const double> beta, int p, int q);

struct RatioSample {
    std::vector<double> ratios;  // |f^+- - 2 f~| / ((tau1 + tau2)/d * sum |beta_i|), both signs per draw
    double quantile(double q) const;
};

// Draws `trials` tails z and records, for f(x) = sum_i beta_i ntk(x_i, x),
//   f+(z) = f((1,0,z)) + f((-1,0,z)),  f-(z) = f((0,1,z)) + f((0,-1,z)),
// the normalized gaps to 2 f~(z). The high quantile estimates the constant c.
RatioSample f_tilde_gap_probe(const Dataset& support, std::span<const double> beta, double tau1, double tau2,
                              std::size_t trials, Seed seed);

struct ProbabilityEstimate {
    double p = 0.0;
    double lower = 0.0;  // Wilson 95% interval
    double upper = 0.0;
    std::size_t hits = 0;
    std::size_t trials = 0;
    double threshold = 0.0;
};

ProbabilityEstimate wilson_interval(std::size_t hits, std::size_t trials, double z = 1.959963984540054);

// Pr_z(|f~(z; beta)| >= multiplier * c (tau1 + tau2)/d * sum |beta_i|) by Monte Carlo.
ProbabilityEstimate f_tilde_mass_probe(const Dataset& support, std::span<const double> beta, double tau1, double tau2,
                                       double c, std::size_t trials, Seed seed, double multiplier = 1.5);

}  // namespace marginlab
