#pragma once

// Discrete-time perturbed Wasserstein gradient flow for two-layer relu
// networks in the mean-field parametrization. A distribution rho over
// theta = (w, u) in R^{d+1} is represented by weighted particles; the network
// is f(x) = sum_j omega_j w_j [u_j^T x]_+.
//
//   L[rho]       = sum_i log(1 + exp(-y_i a_i)) + lambda sum_j omega_j |theta_j|^2,
//   a_i          = sum_j omega_j w_j [u_j^T x_i]_+,
//   L'[rho](th)  = sum_i R'_i w [u^T x_i]_+ + lambda |th|^2,  R'_i = -y_i / (1 + exp(y_i a_i)),
//   v[rho](th)   = -grad_th L'[rho](th).

#include "marginlab/core/dataset.hpp"
#include "marginlab/core/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace marginlab {

struct Particle {
    std::vector<double> theta;  // (w, u_1, ..., u_d)
    double weight;
};

class ParticleEnsemble {
public:
    explicit ParticleEnsemble(std::size_t theta_dim);
    ParticleEnsemble(std::size_t theta_dim, const std::vector<Particle>& particles);

    // count particles uniform on the radius-`radius` sphere in R^{d+1}, equal weights summing to 1.
    static ParticleEnsemble uniform_sphere(std::size_t d, std::size_t count, Seed seed, double radius = 1.0);

    std::size_t size() const noexcept { return weights_.size(); }
    std::size_t theta_dim() const noexcept { return dim_; }
    std::size_t input_dim() const noexcept { return dim_ - 1; }

    std::span<const double> theta(std::size_t j) const noexcept { return {thetas_.data() + j * dim_, dim_}; }
    std::span<double> theta(std::size_t j) noexcept { return {thetas_.data() + j * dim_, dim_}; }
    double weight(std::size_t j) const noexcept { return weights_[j]; }
    double& weight(std::size_t j) noexcept { return weights_[j]; }
    std::size_t birth_step(std::size_t j) const noexcept { return births_[j]; }
    Particle particle(std::size_t j) const;

    void add(std::span<const double> theta, double weight, std::size_t birth_step = 0);
    // Keeps the particles whose flag is true, in order.
    void retain(const std::vector<bool>& keep);

    double total_mass() const noexcept;
    // W^2 = sum_j omega_j |theta_j|^2
    double second_moment() const noexcept;
    void scale_thetas(double c);

private:
    std::size_t dim_;
    std::vector<double> thetas_;
    std::vector<double> weights_;
    std::vector<std::size_t> births_;
};

struct WgfConfig {
    double sigma = 1e-4;
    double eta = 1e-2;
    double lambda = 1e-3;
    std::size_t inject_count = 8;
    double prune_threshold = 0.0;   // weights strictly below are removed
    std::size_t max_particles = 100'000;
    // Particles younger than this many steps are never evicted by the cap.
    std::size_t eviction_min_age = 200;
    std::size_t steps = 1000;

    void validate() const;  // eta > 0, sigma >= 0, eta * sigma < 1, lambda >= 0, inject_count >= 1
};

// a_i = sum_j omega_j Phi_i(theta_j)
std::vector<double> aggregate(const ParticleEnsemble& ens, const Dataset& data);
// R'(a) for the unaveraged logistic R.
std::vector<double> r_prime(const std::vector<double>& aggregate, const Dataset& data);

double distributional_loss(const ParticleEnsemble& ens, const Dataset& data, double lambda);

// L'[rho](theta) and -grad L'[rho](theta) for a fixed R' vector.
double l_prime_frozen(std::span<const double> rp, const Dataset& data, std::span<const double> theta, double lambda);
std::vector<double> velocity_frozen(std::span<const double> rp, const Dataset& data, std::span<const double> theta,
                                    double lambda);

double l_prime(const ParticleEnsemble& ens, const Dataset& data, std::span<const double> theta, double lambda);
std::vector<double> velocity(const ParticleEnsemble& ens, const Dataset& data, std::span<const double> theta,
                             double lambda);

struct StepStats {
    std::size_t injected = 0;
    std::size_t pruned = 0;
    std::size_t evicted = 0;
    double renormalization = 0.0;  // |1 - mass before the final rescale|
};

// One update: transport theta_j += eta v[rho_t](theta_j); decay omega_j *= (1 - eta sigma);
// inject inject_count particles uniform on S^d with weight eta sigma / inject_count;
// prune weights below prune_threshold and, above max_particles, evict the
// smallest omega |theta|^2 among particles at least eviction_min_age old;
// rescale weights to total mass 1. Injection draws come from (seed, step_index).
// Throws NumericError naming the particle index when a value is not finite.
StepStats step(ParticleEnsemble& ens, const Dataset& data, const WgfConfig& config, Seed seed,
               std::size_t step_index);

// The same update with R' frozen at `rp` instead of recomputed from rho.
StepStats frozen_step(ParticleEnsemble& ens, std::span<const double> rp, const Dataset& data, const WgfConfig& config,
                      Seed seed, std::size_t step_index);

struct WgfTraceRow {
    std::size_t step;
    double loss;
    double second_moment;
    std::size_t particles;
    double min_loss;
    double mass;
};

struct WgfRun {
    ParticleEnsemble final;
    std::vector<WgfTraceRow> trace;  // one row per step including t = 0
};

WgfRun run(const ParticleEnsemble& init, const Dataset& data, const WgfConfig& config, Seed seed);

// Constants of the diagnostics, for unit-norm theta:
//   M_R = sqrt(n) bounds |R'|_2, B_Phi = sqrt(sum_i |x_i|^2) / 2 bounds |Phi(theta)|_2,
//   B_V = b_V = lambda bound V above and below, B_L = M_R B_Phi + B_V bounds |L'|.
struct RegularityConstants {
    double m_r;
    double b_phi;
    double upper_v;
    double lower_v;
    double b_l;
};

RegularityConstants regularity_constants(const Dataset& data, double lambda);

// (L_0 + t eta sigma B_L) / (b_V - t eta sigma B_L); +infinity once the denominator is <= 0.
double second_moment_bound(double initial_loss, std::size_t t, const WgfConfig& config, const RegularityConstants& c);

}  // namespace marginlab
