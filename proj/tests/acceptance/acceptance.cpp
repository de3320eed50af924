// Acceptance gate. Each criterion runs at its stated scale and tolerance and
// prints exactly one PASS/FAIL line with the measured numbers.
#include "marginlab/core/errors.hpp"
#include "marginlab/core/rng.hpp"
#include "marginlab/core/samplers.hpp"
#include "marginlab/harness/experiments.hpp"
#include "marginlab/l1svm/l1svm.hpp"
#include "marginlab/lowerbound/probes.hpp"
#include "marginlab/net/params.hpp"
#include "marginlab/net/train.hpp"
#include "marginlab/ntk/kernel.hpp"
#include "marginlab/wgf/flow.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

using namespace marginlab;

namespace {

// Accumulates named sub-checks; the criterion passes when all of them do.
class Verdict {
public:
    void check(bool ok, const std::string& what) {
        all_ &= ok;
        if (!detail_.empty()) detail_ += "; ";
        detail_ += (ok ? "" : "FAILED ") + what;
    }
    bool pass() const { return all_; }
    const std::string& detail() const { return detail_; }

private:
    bool all_ = true;
    std::string detail_;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::vector<double> column(const CsvTable& t, const std::string& name) {
    std::vector<double> out;
    const std::size_t c = t.column(name);
    for (std::size_t r = 0; r < t.rows(); ++r) out.push_back(t.number(r, c));
    return out;
}

// 1. Normalized margin of the lambda sweep against the 1000-direction LP.
Verdict margin_convergence() {
    ExperimentConfig config;
    config.apply_preset("gG3");
    const ExperimentOutput out = run_margin_convergence(config);
    const auto margins = column(out.table("margin_convergence.csv"), "margin");
    const auto ratios = column(out.table("margin_convergence.csv"), "ratio");
    Verdict v;
    const double final_ratio = ratios.back();
    v.check(final_ratio >= 0.9, "final margin / (gamma_l1/2) = " + fmt(final_ratio) + " >= 0.9");
    double worst_drop = 0.0;
    for (std::size_t k = 1; k < margins.size(); ++k) worst_drop = std::max(worst_drop, margins[k - 1] - margins[k]);
    v.check(worst_drop <= 1e-3, "largest margin drop " + fmt(worst_drop) + " <= 1e-3 over " +
                                    std::to_string(margins.size()) + " lambdas");
    return v;
}

// 2. Net vs kernel test error on D, d = 20, 20 seeds.
Verdict sample_gap() {
    ExperimentConfig config;
    config.set("data.d", "20");
    config.set("gap.ns", "50,100,200,400");
    config.set("run.seeds", "20");
    const ExperimentOutput out = run_gap(config);
    const CsvTable& t = out.table("gap.csv");
    std::vector<double> ns, net, ker;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const double n = t.number(r, t.column("n"));
        const double e = t.number(r, t.column("mean_test_err"));
        if (t.cell(r, t.column("method")) == "net") {
            ns.push_back(n);
            net.push_back(e);
        } else {
            ker.push_back(e);
        }
    }
    Verdict v;
    const std::size_t last = ns.size() - 1;
    v.check(ns[last] == 400 && net[last] <= 0.05, "net err at n=400 " + fmt(net[last]) + " <= 0.05");
    v.check(ker[last] >= net[last] + 0.05, "kernel err at n=400 " + fmt(ker[last]) + " >= net + 0.05");
    std::string gaps;
    bool nonneg = true;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        gaps += (k ? "," : "") + fmt(ker[k] - net[k]);
        if (ns[k] >= 100) nonneg &= ker[k] - net[k] >= 0.0;
    }
    v.check(nonneg, "kernel - net gaps [" + gaps + "] >= 0 for n >= 100");
    return v;
}

// 3. Margin and test error across widths 2^4..2^10 at the shrunk default.
Verdict width_monotonicity() {
    const ExperimentConfig config;
    const ExperimentOutput out = run_width_sweep(config);
    const CsvTable& t = out.table("width_sweep.csv");
    const auto margin = column(t, "margin");
    const auto err = column(t, "test_err");
    const auto err_se = column(t, "test_err_stderr");
    Verdict v;
    double best = margin[0], worst_rel = 0.0;
    bool finite = std::isfinite(best);
    for (std::size_t k = 1; k < margin.size(); ++k) {
        finite &= std::isfinite(margin[k]);
        worst_rel = std::max(worst_rel, (best - margin[k]) / best);
        best = std::max(best, margin[k]);
    }
    v.check(finite && worst_rel <= 0.05, "largest margin dip below the running max " + fmt(100 * worst_rel) +
                                             "% <= 5% (margins " + fmt(margin.front()) + ".." + fmt(margin.back()) +
                                             ")");
    double worst_z = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < err.size(); ++k) {
        const double pooled = std::sqrt(err_se[k] * err_se[k] + err_se[k - 1] * err_se[k - 1]);
        const double rise = err[k] - err[k - 1];
        worst_z = std::max(worst_z, pooled > 0 ? rise / pooled : (rise > 0 ? INFINITY : 0.0));
    }
    v.check(worst_z <= 2.0, "largest test-error rise " + fmt(worst_z) + " pooled stderr <= 2 (errors " +
                                fmt(err.front()) + ".." + fmt(err.back()) + ")");
    return v;
}

// 4. Closed-form kernel against a Monte Carlo of the tangent-feature
// expectation, and Gram positive semidefiniteness.
Verdict kernel_correctness() {
    Verdict v;
    const NtkConfig cfg{0.5, 1.0};
    CounterRng rng(Seed{404}, 0);
    double worst = 0.0;
    const std::size_t samples = 1'000'000;
    for (int pair = 0; pair < 10; ++pair) {
        const std::size_t d = 3 + 2 * static_cast<std::size_t>(pair);
        std::vector<double> x(d), xp(d);
        for (double& e : x) e = rng.normal();
        for (double& e : xp) e = rng.normal();
        if (pair % 3 == 0)  // strongly correlated pair
            for (std::size_t k = 0; k < d; ++k) xp[k] = 0.9 * x[k] + 0.1 * xp[k];
        double dot = 0.0;
        for (std::size_t k = 0; k < d; ++k) dot += x[k] * xp[k];
        // tau1 term: 2 E[1(u.x >= 0) 1(u.x' >= 0)] x.x';  tau2 term: 2 E[relu(u.x) relu(u.x')].
        CounterRng mc(Seed{static_cast<std::uint64_t>(pair)}, 7);
        long double sum = 0.0L, sum_sq = 0.0L;
        for (std::size_t s = 0; s < samples; ++s) {
            double a = 0.0, b = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double g = mc.normal();
                a += g * x[k];
                b += g * xp[k];
            }
            const double both = (a >= 0.0 && b >= 0.0) ? 1.0 : 0.0;
            const double val = 2.0 * (cfg.tau1 * both * dot + cfg.tau2 * std::max(a, 0.0) * std::max(b, 0.0));
            sum += val;
            sum_sq += static_cast<long double>(val) * val;
        }
        const double mean = static_cast<double>(sum / samples);
        const double var = static_cast<double>(sum_sq / samples) - mean * mean;
        const double se = std::sqrt(var / static_cast<double>(samples));
        worst = std::max(worst, std::abs(ntk(x, xp, cfg) - mean) / se);
    }
    v.check(worst <= 3.0, "largest |closed form - MC| " + fmt(worst) + " SE <= 3 over 10 pairs, 1e6 samples");

    double worst_eig = std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < 50; ++s) {
        Dataset data = sample_distribution_d(40 + s, 20, Seed{1000 + s});
        if (s % 5 == 0)  // exact duplicates make G singular
            for (std::size_t i = 0; i < 5; ++i) data = data.with_appended(data.example(i));
        const Eigen::MatrixXd g = gram(data, NtkConfig{static_cast<double>(s % 3) * 0.5, 1.0});
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
        worst_eig = std::min(worst_eig, es.eigenvalues().minCoeff() / g.trace());
    }
    v.check(worst_eig >= -1e-8, "min eigenvalue / trace " + fmt(worst_eig) + " >= -1e-8 over 50 Gram matrices");
    return v;
}

// 5. Cube expectation, cancellation residual rate, polynomial g, a2.
Verdict lower_bound_suite() {
    Verdict v;
    CounterRng rng(Seed{505}, 0);
    std::size_t mixed_nonzero = 0, negative = 0;
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t d = 1 + rng.below(10);
        const std::size_t n = 1 + rng.below(6);
        const int p = static_cast<int>(rng.below(5)), q = static_cast<int>(rng.below(5));
        std::vector<double> pts(n * d), beta(n);
        for (double& e : pts) e = rng.sign();
        for (double& b : beta) b = rng.normal();
        const double val = cube_exp_bruteforce(d, pts, beta, p, q);
        if ((p + q) % 2 == 1) mixed_nonzero += val != 0.0;
        else negative += val < 0.0;
    }
    v.check(mixed_nonzero == 0 && negative == 0, "cube expectation: " + std::to_string(mixed_nonzero) +
                                                      " nonzero mixed-parity and " + std::to_string(negative) +
                                                      " negative same-parity of 200");

    ExperimentConfig config;
    config.set("lb.probe", "residuals");
    const CsvTable res = run_lowerbound(config).tables.front().second;
    double s1 = NAN, s2 = NAN;
    for (std::size_t r = 0; r < res.rows(); ++r) {
        if (res.cell(r, 0) == "k1_slope") s1 = res.number(r, 1);
        if (res.cell(r, 0) == "k2_slope") s2 = res.number(r, 1);
    }
    v.check(s1 >= -1.3 && s1 <= -0.7 && s2 >= -1.3 && s2 <= -0.7,
            "residual slopes over d=64..512: K1 " + fmt(s1) + ", K2 " + fmt(s2) + " in [-1.3, -0.7]");

    double worst_ratio = 0.0, worst_a2 = 0.0;
    for (std::size_t d : {8u, 20u, 64u, 512u}) {
        for (const auto& [t1, t2] : {std::pair{0.0, 1.0}, std::pair{1.0, 0.0}, std::pair{0.3, 0.7}, std::pair{2.0, 0.5}}) {
            for (int i = -750; i <= 750; ++i) {
                const double t = i * 1e-3;
                if (i == 0) continue;
                const double bound = static_cast<double>(d - 1) * (t1 + t2) * std::pow(std::abs(t), 5);
                worst_ratio = std::max(worst_ratio, poly_g_residual(t, t1, t2, d) / bound);
            }
            const double a2 = PolyG(d, t1, t2).scaled_coefficient(2);
            const double expect = (t1 + t2 / 2.0) / (std::numbers::pi * static_cast<double>(d - 1));
            worst_a2 = std::max(worst_a2, std::abs(a2 - expect));
        }
    }
    v.check(worst_ratio <= 1.0, "polynomial g residual / ((d-1)(tau1+tau2)|t|^5) max " + fmt(worst_ratio) + " <= 1");
    v.check(worst_a2 <= 1e-14, "a2 identity error " + fmt(worst_a2) + " <= 1e-14");
    return v;
}

// 6. Particle flow diagnostics and the finite-network comparison on D (d=5, n=32).
Verdict wgf_suite() {
    const std::size_t d = 5, n = 32, particles = 512;
    WgfConfig cfg;
    cfg.lambda = 1e-3;
    cfg.eta = 1e-2;
    cfg.sigma = 1e-4;
    cfg.max_particles = 2048;
    cfg.eviction_min_age = 200;
    cfg.steps = 100'000;
    const Dataset data = sample_distribution_d(n, d, Seed{606});
    const ParticleEnsemble init = ParticleEnsemble::uniform_sphere(d, particles, Seed{607});
    const WgfRun flow = run(init, data, cfg, Seed{608});
    const RegularityConstants rc = regularity_constants(data, cfg.lambda);

    Verdict v;
    double worst_mass = 0.0, w_max = 0.0;
    std::size_t bound_checked = 0, bound_violations = 0;
    for (const auto& r : flow.trace) {
        worst_mass = std::max(worst_mass, std::abs(r.mass - 1.0));
        w_max = std::max(w_max, r.second_moment);
        const double b = second_moment_bound(flow.trace.front().loss, r.step, cfg, rc);
        if (std::isfinite(b)) {
            ++bound_checked;
            bound_violations += r.second_moment > b;
        }
    }
    v.check(worst_mass <= 1e-6, "mass error " + fmt(worst_mass) + " <= 1e-6 at all " +
                                    std::to_string(flow.trace.size()) + " steps");
    v.check(bound_checked > 0 && bound_violations == 0,
            "second moment under its bound at " + std::to_string(bound_checked - bound_violations) + "/" +
                std::to_string(bound_checked) + " steps with a positive denominator");

    const double rate = cfg.eta * cfg.sigma * rc.b_l * (w_max + 1.0);
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < flow.trace.size(); ++t)
        for (std::size_t k = 1; k <= 100 && t + k < flow.trace.size(); ++k)
            worst_excess = std::max(worst_excess, flow.trace[t + k].loss - flow.trace[t].loss - rate * k);
    v.check(worst_excess <= 1e-3, "windowed loss increase minus allowance " + fmt(worst_excess) + " <= 1e-3 (k <= 100)");

    // Finite net with theta'_j = sqrt(omega_j) theta_j: same function, objective
    // divided by n under lambda / n, and step eta n gives the matching update.
    NetParams p(d, {particles}, 1);
    for (std::size_t j = 0; j < particles; ++j) {
        const auto th = init.theta(j);
        const double s = std::sqrt(init.weight(j));
        p.at(1, 0, j) = s * th[0];
        for (std::size_t k = 0; k < d; ++k) p.at(0, j, k) = s * th[1 + k];
    }
    const double nd = static_cast<double>(n);
    const TrainResult net = train(p, data, TrainConfig{cfg.lambda / nd, 2.0, cfg.eta * nd, cfg.steps, LossKind::logistic});
    double best = std::numeric_limits<double>::infinity();
    for (double l : net.loss_trace) best = std::min(best, nd * l);
    const double flow_min = flow.trace.back().min_loss;
    v.check(flow_min <= 1.5 * best, "flow min loss " + fmt(flow_min) + " <= 1.5 x width-512 net " + fmt(best) +
                                        " (ratio " + fmt(flow_min / best) + ")");
    return v;
}

// 7. Structural identities of the net and the l1-SVM.
Verdict structural() {
    Verdict v;
    double worst_hom = 0.0;
    for (std::size_t q : {2u, 3u, 4u}) {
        const NetParams p = init_params(6, std::vector<std::size_t>(q - 1, 8), 2, InitScheme::fan_in, Seed{q});
        const std::vector<double> x{0.3, -1.2, 0.8, 2.0, -0.1, 0.5};
        const auto base = forward_all(p, x);
        for (double c : {0.5, 2.0, 7.0}) {
            const auto s = forward_all(p.scaled(c), x);
            for (std::size_t o = 0; o < base.size(); ++o)
                worst_hom = std::max(worst_hom, std::abs(s[o] - std::pow(c, double(q)) * base[o]) /
                                                     std::max(1e-300, std::abs(std::pow(c, double(q)) * base[o])));
        }
    }
    v.check(worst_hom <= 1e-9, "q-homogeneity rel err " + fmt(worst_hom) + " <= 1e-9");

    double worst_grad = 0.0;
    std::size_t checked = 0, total = 0;
    CounterRng rng(Seed{707}, 0);
    for (LossKind loss : {LossKind::logistic, LossKind::cross_entropy, LossKind::squared, LossKind::truncated_squared}) {
        const bool multi = loss == LossKind::cross_entropy;
        const bool reg = loss == LossKind::squared || loss == LossKind::truncated_squared;
        std::vector<double> xs(10 * 4), ys(10);
        for (double& e : xs) e = rng.normal();
        for (double& e : ys) e = multi ? static_cast<double>(rng.below(3)) : reg ? rng.normal() : rng.sign();
        const Dataset data = Dataset::from_rows(4, xs, ys, multi ? LabelKind::multiclass : reg ? LabelKind::regression
                                                                                              : LabelKind::binary,
                                                multi ? 3 : 0);
        const NetParams p = init_params(4, {5, 5}, multi ? 3 : 1, InitScheme::fan_in, Seed{9});
        const TrainConfig cfg{0.02, 2.0, 0.1, 1, loss};
        const LossGrad lg = loss_and_grad(p, data, cfg);
        for (std::size_t k = 0; k < p.size(); ++k, ++total) {
            auto fd = [&](double h) {
                NetParams a = p, b = p;
                a.values()[k] += h;
                b.values()[k] -= h;
                return (objective(a, data, cfg) - objective(b, data, cfg)) / (2.0 * h);
            };
            const double f1 = fd(1e-6), f2 = fd(5e-7);
            if (std::abs(f1 - f2) > 1e-6 * (1.0 + std::abs(f1))) continue;  // straddles a relu kink
            const double g = lg.grad.values()[k];
            worst_grad = std::max(worst_grad, std::abs(f1 - g) / std::max(1.0, std::abs(g)));
            ++checked;
        }
    }
    v.check(worst_grad <= 1e-5 && checked * 10 >= total * 9,
            "gradient vs finite difference " + fmt(worst_grad) + " <= 1e-5 on " + std::to_string(checked) + "/" +
                std::to_string(total) + " coordinates");

    const Dataset line = sample_interval_1d(20);
    const L1MarginResult lp = solve_l1_margin(line, FeatureGrid::interval_1d(1000));
    const FeatureGrid grid = FeatureGrid::interval_1d(1000);
    double worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < line.n(); ++i)
        worst_slack = std::min(worst_slack, line.label(i) * lp.alpha.evaluate(grid_input(grid, line.x(i))) - lp.gamma);
    v.check(lp.separable && lp.alpha.one_norm() <= 1.0 + 1e-9 && worst_slack >= -1e-9 &&
                lp.alpha.atoms.size() <= line.n(),
            "LP feasible (min slack " + fmt(worst_slack) + ", |alpha|_1 " + fmt(lp.alpha.one_norm()) + ") with " +
                std::to_string(lp.alpha.atoms.size()) + " <= n atoms");

    const NetParams net = sparse_to_net(lp.alpha, line.n() + 1);
    const SparseLiftedFn back = net_to_sparse(net);
    double worst_rt = back.atoms.size() == lp.alpha.atoms.size() ? 0.0 : INFINITY;
    for (std::size_t k = 0; std::isfinite(worst_rt) && k < back.atoms.size(); ++k) {
        worst_rt = std::max(worst_rt, std::abs(back.atoms[k].coefficient - lp.alpha.atoms[k].coefficient));
        for (std::size_t c = 0; c < 2; ++c)
            worst_rt = std::max(worst_rt, std::abs(back.atoms[k].direction[c] - lp.alpha.atoms[k].direction[c]));
    }
    for (int i = 0; i <= 20; ++i) {
        const std::vector<double> xt{-1.0 + 0.1 * i, 1.0};
        worst_rt = std::max(worst_rt, std::abs(forward(net, xt) - lp.alpha.evaluate(xt) / 2.0));
    }
    v.check(worst_rt <= 1e-10, "sparse <-> net round trip " + fmt(worst_rt) + " <= 1e-10");

    std::vector<double> xs(30 * 5), ys(30);
    for (double& e : xs) e = rng.normal();
    for (double& e : ys) e = rng.sign();
    const Dataset bin = Dataset::from_rows(5, xs, ys, LabelKind::binary);
    const NetParams p = init_params(5, {7}, 1, InitScheme::fan_in, Seed{11});
    const double lb = loss_and_grad(p, bin, TrainConfig{0.0, 2.0, 0.1, 1, LossKind::logistic}).data_loss;
    const double lc =
        loss_and_grad(as_two_class(p), as_two_class(bin), TrainConfig{0.0, 2.0, 0.1, 1, LossKind::cross_entropy})
            .data_loss;
    v.check(std::abs(lb - lc) <= 1e-12, "binary vs two-class loss " + fmt(std::abs(lb - lc)) + " <= 1e-12");
    return v;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "margin_convergence", margin_convergence}, {2, "gap", sample_gap},
        {3, "width_sweep", width_monotonicity},        {4, "kernel_oracles", kernel_correctness},
        {5, "lower_bound", lower_bound_suite},         {6, "wgf", wgf_suite},
        {7, "structural", structural},
    };
    CLI::App app{"acceptance criteria"};
    std::vector<std::string> selected;
    app.add_option("--criterion", selected, "criterion number or name (repeatable; default all)");
    CLI11_PARSE(app, argc, argv);

    int failures = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end() &&
            std::find(selected.begin(), selected.end(), std::to_string(c.id)) == selected.end())
            continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        bool pass = false;
        std::string detail;
        try {
            const Verdict v = c.run();
            pass = v.pass();
            detail = v.detail();
        } catch (const std::exception& e) {
            detail = std::string("threw: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d %s: %s [%.1f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, detail.c_str(), secs);
        std::fflush(stdout);
        failures += !pass;
    }
    if (ran == 0) {
        std::fprintf(stderr, "no criterion matched\n");
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
