#include "marginlab/wgf/flow.hpp"

#include "marginlab/core/errors.hpp"
#include "marginlab/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace marginlab {

ParticleEnsemble::ParticleEnsemble(std::size_t theta_dim) : dim_(theta_dim) {
    if (theta_dim < 2) throw DimensionError("particles need theta dimension >= 2");
}

ParticleEnsemble::ParticleEnsemble(std::size_t theta_dim, const std::vector<Particle>& particles)
    : ParticleEnsemble(theta_dim) {
    for (const auto& p : particles) add(p.theta, p.weight);
}

ParticleEnsemble ParticleEnsemble::uniform_sphere(std::size_t d, std::size_t count, Seed seed, double radius) {
    ParticleEnsemble ens(d + 1);
    std::vector<double> theta(d + 1);
    const auto& k = simd::kernels();
    for (std::size_t j = 0; j < count; ++j) {
        CounterRng rng(seed, j);
        double norm = 0.0;
        while (!(norm > 0.0)) {
            for (double& v : theta) v = rng.normal();
            norm = std::sqrt(k.sum_sq(theta.data(), theta.size()));
        }
        k.scale(radius / norm, theta.data(), theta.size());
        ens.add(theta, 1.0 / static_cast<double>(count));
    }
    return ens;
}

Particle ParticleEnsemble::particle(std::size_t j) const {
    const auto t = theta(j);
    return {{t.begin(), t.end()}, weights_[j]};
}

void ParticleEnsemble::add(std::span<const double> theta, double weight, std::size_t birth_step) {
    if (theta.size() != dim_) throw DimensionError("particle dimension " + std::to_string(theta.size()) +
                                                   ", ensemble expects " + std::to_string(dim_));
    if (!(weight >= 0.0)) throw std::invalid_argument("particle weight must be >= 0");
    thetas_.insert(thetas_.end(), theta.begin(), theta.end());
    weights_.push_back(weight);
    births_.push_back(birth_step);
}

void ParticleEnsemble::retain(const std::vector<bool>& keep) {
    std::size_t out = 0;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
        if (!keep[j]) continue;
        if (out != j) {
            std::copy_n(thetas_.begin() + static_cast<std::ptrdiff_t>(j * dim_), dim_,
                        thetas_.begin() + static_cast<std::ptrdiff_t>(out * dim_));
            weights_[out] = weights_[j];
            births_[out] = births_[j];
        }
        ++out;
    }
    thetas_.resize(out * dim_);
    weights_.resize(out);
    births_.resize(out);
}

double ParticleEnsemble::total_mass() const noexcept {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double ParticleEnsemble::second_moment() const noexcept {
    const auto& k = simd::kernels();
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += weights_[j] * k.sum_sq(thetas_.data() + j * dim_, dim_);
    return s;
}

void ParticleEnsemble::scale_thetas(double c) { simd::kernels().scale(c, thetas_.data(), thetas_.size()); }

void WgfConfig::validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("WgfConfig: eta must be > 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("WgfConfig: sigma must be >= 0");
    if (!(eta * sigma < 1.0)) throw std::invalid_argument("WgfConfig: need eta * sigma < 1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("WgfConfig: lambda must be >= 0");
    if (inject_count == 0) throw std::invalid_argument("WgfConfig: inject_count must be >= 1");
    if (!(prune_threshold >= 0.0)) throw std::invalid_argument("WgfConfig: prune_threshold must be >= 0");
    if (max_particles == 0) throw std::invalid_argument("WgfConfig: max_particles must be >= 1");
}

namespace {

void check_data(const Dataset& data, std::size_t theta_dim) {
    if (data.kind() != LabelKind::binary) throw std::invalid_argument("wgf: binary labels required");
    if (data.d() + 1 != theta_dim)
        throw DimensionError("theta dimension " + std::to_string(theta_dim) + " does not match data d = " +
                             std::to_string(data.d()));
}

// pre_i = u^T x_i
void preactivations(const Dataset& data, const double* u, double* pre) {
    simd::kernels().gemv(data.features().data(), data.n(), data.d(), u, pre);
}

double log1p_exp(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

// Writes grad L'(theta) into g; returns L'(theta).
double l_prime_and_grad(std::span<const double> rp, const Dataset& data, const double* theta, double lambda,
                        std::vector<double>& pre, double* g) {
    const auto& k = simd::kernels();
    const std::size_t d = data.d();
    const double w = theta[0];
    const double* u = theta + 1;
    pre.resize(data.n());
    preactivations(data, u, pre.data());
    double phi_term = 0.0;
    if (g) std::fill(g, g + d + 1, 0.0);
    for (std::size_t i = 0; i < data.n(); ++i) {
        if (!(pre[i] > 0.0)) continue;
        phi_term += rp[i] * pre[i];
        if (g) k.axpy(rp[i] * w, data.x(i).data(), g + 1, d);
    }
    const double sq = k.sum_sq(theta, d + 1);
    if (g) {
        g[0] = phi_term;
        k.axpy(2.0 * lambda, theta, g, d + 1);
    }
    return w * phi_term + lambda * sq;
}

StepStats step_with(ParticleEnsemble& ens, std::span<const double> rp, const Dataset& data, const WgfConfig& config,
                    Seed seed, std::size_t step_index) {
    config.validate();
    check_data(data, ens.theta_dim());
    const auto& k = simd::kernels();
    const std::size_t dim = ens.theta_dim();
    StepStats stats;

    // Transport along the velocity frozen at rho_t.
    std::vector<double> pre;
    std::vector<double> g(dim);
    for (std::size_t j = 0; j < ens.size(); ++j) {
        auto th = ens.theta(j);
        l_prime_and_grad(rp, data, th.data(), config.lambda, pre, g.data());
        k.axpy(-config.eta, g.data(), th.data(), dim);
        for (double v : th)
            if (!std::isfinite(v)) throw NumericError("particle " + std::to_string(j) + " left the finite range");
    }

    if (config.sigma > 0.0) {
        const double keep = 1.0 - config.eta * config.sigma;
        for (std::size_t j = 0; j < ens.size(); ++j) ens.weight(j) *= keep;
        const double w_new = config.eta * config.sigma / static_cast<double>(config.inject_count);
        const Seed step_seed = derive_seed(seed, step_index);
        std::vector<double> theta(dim);
        for (std::size_t c = 0; c < config.inject_count; ++c) {
            CounterRng rng(step_seed, c);
            double norm = 0.0;
            while (!(norm > 0.0)) {
                for (double& v : theta) v = rng.normal();
                norm = std::sqrt(k.sum_sq(theta.data(), dim));
            }
            k.scale(1.0 / norm, theta.data(), dim);
            ens.add(theta, w_new, step_index + 1);
        }
        stats.injected = config.inject_count;
    }

    std::vector<bool> keep(ens.size(), true);
    std::size_t alive = ens.size();
    if (config.prune_threshold > 0.0) {
        for (std::size_t j = 0; j < ens.size(); ++j)
            if (ens.weight(j) < config.prune_threshold) {
                keep[j] = false;
                --alive;
                ++stats.pruned;
            }
    }
    if (alive > config.max_particles) {
        std::vector<std::size_t> order;
        for (std::size_t j = 0; j < ens.size(); ++j)
            if (keep[j]) order.push_back(j);
        auto effective = [&](std::size_t j) { return ens.weight(j) * k.sum_sq(ens.theta(j).data(), dim); };
        auto old_enough = [&](std::size_t j) { return step_index + 1 >= ens.birth_step(j) + config.eviction_min_age; };
        // Old particles first, then by effective mass; index breaks ties.
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const bool oa = old_enough(a), ob = old_enough(b);
            if (oa != ob) return oa;
            const double ea = effective(a), eb = effective(b);
            if (ea != eb) return ea < eb;
            return a < b;
        });
        for (std::size_t r = 0; alive > config.max_particles; ++r) {
            keep[order[r]] = false;
            --alive;
            ++stats.evicted;
        }
    }
    if (stats.pruned + stats.evicted > 0) ens.retain(keep);

    const double mass = ens.total_mass();
    stats.renormalization = std::abs(1.0 - mass);
    if (mass > 0.0 && mass != 1.0)
        for (std::size_t j = 0; j < ens.size(); ++j) ens.weight(j) /= mass;
    return stats;
}

}  // namespace

std::vector<double> aggregate(const ParticleEnsemble& ens, const Dataset& data) {
    check_data(data, ens.theta_dim());
    const auto& k = simd::kernels();
    std::vector<double> a(data.n(), 0.0);
    std::vector<double> pre(data.n());
    for (std::size_t j = 0; j < ens.size(); ++j) {
        const auto th = ens.theta(j);
        const double c = ens.weight(j) * th[0];
        if (c == 0.0) continue;
        preactivations(data, th.data() + 1, pre.data());
        k.relu(pre.data(), pre.data(), pre.size());
        k.axpy(c, pre.data(), a.data(), a.size());
    }
    return a;
}

std::vector<double> r_prime(const std::vector<double>& agg, const Dataset& data) {
    std::vector<double> rp(agg.size());
    for (std::size_t i = 0; i < agg.size(); ++i) {
        const double y = data.label(i);
        const double m = y * agg[i];
        rp[i] = m > 0.0 ? -y * std::exp(-m) / (1.0 + std::exp(-m)) : -y / (1.0 + std::exp(m));
    }
    return rp;
}

namespace {

double loss_from(const ParticleEnsemble& ens, const Dataset& data, const std::vector<double>& agg, double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) s += log1p_exp(-data.label(i) * agg[i]);
    return s + lambda * ens.second_moment();
}

}  // namespace

double distributional_loss(const ParticleEnsemble& ens, const Dataset& data, double lambda) {
    return loss_from(ens, data, aggregate(ens, data), lambda);
}

double l_prime_frozen(std::span<const double> rp, const Dataset& data, std::span<const double> theta, double lambda) {
    check_data(data, theta.size());
    std::vector<double> pre;
    return l_prime_and_grad(rp, data, theta.data(), lambda, pre, nullptr);
}

std::vector<double> velocity_frozen(std::span<const double> rp, const Dataset& data, std::span<const double> theta,
                                    double lambda) {
    check_data(data, theta.size());
    std::vector<double> pre;
    std::vector<double> g(theta.size());
    l_prime_and_grad(rp, data, theta.data(), lambda, pre, g.data());
    for (double& v : g) v = -v;
    return g;
}

double l_prime(const ParticleEnsemble& ens, const Dataset& data, std::span<const double> theta, double lambda) {
    return l_prime_frozen(r_prime(aggregate(ens, data), data), data, theta, lambda);
}

std::vector<double> velocity(const ParticleEnsemble& ens, const Dataset& data, std::span<const double> theta,
                             double lambda) {
    return velocity_frozen(r_prime(aggregate(ens, data), data), data, theta, lambda);
}

StepStats step(ParticleEnsemble& ens, const Dataset& data, const WgfConfig& config, Seed seed,
               std::size_t step_index) {
    const std::vector<double> rp = r_prime(aggregate(ens, data), data);
    return step_with(ens, rp, data, config, seed, step_index);
}

StepStats frozen_step(ParticleEnsemble& ens, std::span<const double> rp, const Dataset& data, const WgfConfig& config,
                      Seed seed, std::size_t step_index) {
    if (rp.size() != data.n()) throw DimensionError("frozen R' has the wrong length");
    return step_with(ens, rp, data, config, seed, step_index);
}

WgfRun run(const ParticleEnsemble& init, const Dataset& data, const WgfConfig& config, Seed seed) {
    config.validate();
    check_data(data, init.theta_dim());
    WgfRun out{init, {}};
    out.trace.reserve(config.steps + 1);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0;; ++t) {
        const std::vector<double> agg = aggregate(out.final, data);
        const double loss = loss_from(out.final, data, agg, config.lambda);
        if (!std::isfinite(loss)) throw NumericError("distributional loss is not finite at step " + std::to_string(t));
        best = std::min(best, loss);
        out.trace.push_back({t, loss, out.final.second_moment(), out.final.size(), best, out.final.total_mass()});
        if (t == config.steps) break;
        step_with(out.final, r_prime(agg, data), data, config, seed, t);
    }
    return out;
}

RegularityConstants regularity_constants(const Dataset& data, double lambda) {
    double sum_sq = 0.0;
    for (double v : data.features()) sum_sq += v * v;
    RegularityConstants c{};
    c.m_r = std::sqrt(static_cast<double>(data.n()));
    c.b_phi = 0.5 * std::sqrt(sum_sq);
    c.upper_v = lambda;
    c.lower_v = lambda;
    c.b_l = c.m_r * c.b_phi + c.upper_v;
    return c;
}

double second_moment_bound(double initial_loss, std::size_t t, const WgfConfig& config, const RegularityConstants& c) {
    const double drift = static_cast<double>(t) * config.eta * config.sigma * c.b_l;
    const double denom = c.lower_v - drift;
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    return (initial_loss + drift) / denom;
}

}  // namespace marginlab
