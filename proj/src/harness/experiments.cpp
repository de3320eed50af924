#include "marginlab/harness/experiments.hpp"

#include "marginlab/core/csv_io.hpp"
#include "marginlab/core/samplers.hpp"
#include "marginlab/l1svm/l1svm.hpp"
#include "marginlab/lowerbound/probes.hpp"
#include "marginlab/net/experiments.hpp"
#include "marginlab/net/margin.hpp"
#include "marginlab/net/train.hpp"
#include "marginlab/ntk/kernel.hpp"
#include "marginlab/wgf/flow.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

namespace marginlab {

const CsvTable& ExperimentOutput::table(const std::string& file) const {
    for (const auto& [name, t] : tables)
        if (name == file) return t;
    throw std::out_of_range("no table " + file);
}

namespace {

// Rethrows anything but a StageError or ConfigError as one tagged with `name`.
template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct MeanErr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Sample standard error; 0 for fewer than two values.
MeanErr mean_stderr(const std::vector<double>& v) {
    MeanErr r;
    if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    for (double x : v) r.mean += x;
    r.mean /= static_cast<double>(v.size());
    if (v.size() < 2) return r;
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    return r;
}

InitScheme parse_init(const std::string& s) {
    if (s == "fan_in") return InitScheme::fan_in;
    if (s == "standard_normal") return InitScheme::standard_normal;
    throw ConfigError("net.init must be fan_in or standard_normal, got '" + s + "'");
}

NtkConfig ntk_config(const ExperimentConfig& c) {
    NtkConfig k{c.get_double("ntk.tau1"), c.get_double("ntk.tau2")};
    try {
        k.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return k;
}

KernelLogisticOptions kernel_options(const ExperimentConfig& c) {
    return {c.get_double("ntk.reg"), c.get_size("ntk.steps"), c.get_double("ntk.lr")};
}

double kernel_error(const KernelModel& model, const Dataset& test) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.n(); ++i)
        if (!(test.label(i) * predict_kernel(model, test.x(i)) > 0.0)) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(test.n());
}

double kernel_truncated_error(const KernelModel& model, const Dataset& test) {
    double s = 0.0;
    for (std::size_t i = 0; i < test.n(); ++i) {
        const double r = test.label(i) - predict_kernel(model, test.x(i));
        s += std::min(r * r, 1.0);
    }
    return s / static_cast<double>(test.n());
}

// Teacher whose output has unit variance on N(0, I_d) inputs: each relu unit
// has second moment |u|^2 / 2 ~ d / 2.
NetParams unit_variance_teacher(std::size_t d, std::size_t width, Seed seed) {
    NetParams t = make_teacher(d, width, seed);
    const double s = 1.0 / std::sqrt(static_cast<double>(width) * static_cast<double>(d) / 2.0);
    for (double& w : t.layer(1)) w *= s;
    return t;
}

std::size_t positive_size(const ExperimentConfig& c, const std::string& key) {
    const std::size_t v = c.get_size(key);
    if (v == 0) throw ConfigError(key + " must be positive");
    return v;
}

// Classification data for the gap experiment: D or a teacher net.
struct ClassificationPair {
    Dataset train, test;
};

ClassificationPair gap_classification_data(const ExperimentConfig& c, std::size_t n, Seed s) {
    const std::size_t d = c.get_size("data.d");
    const std::size_t test_n = positive_size(c, "data.test_n");
    const std::string& dist = c.get("data.dist");
    if (dist == "D")
        return {sample_distribution_d(n, d, derive_seed(s, 1)), sample_distribution_d(test_n, d, derive_seed(s, 2))};
    if (dist == "teacher") {
        const NetParams teacher = make_teacher(d, c.get_size("data.teacher_width"), derive_seed(s, 3));
        TeacherSampleOptions o;
        o.margin_floor = c.get_double("data.margin_floor");
        return {sample_teacher_net(n, teacher, o, derive_seed(s, 1)),
                sample_teacher_net(test_n, teacher, o, derive_seed(s, 2))};
    }
    throw ConfigError("data.dist must be D or teacher, got '" + dist + "'");
}

}  // namespace

ExperimentOutput run_gap(const ExperimentConfig& c) {
    const std::vector<std::size_t> ns = c.get_sizes("gap.ns");
    if (ns.empty()) throw ConfigError("gap.ns is empty");
    const std::size_t seeds = positive_size(c, "run.seeds");
    const Seed base{c.get_u64("run.seed")};
    const std::string& mode = c.get("gap.mode");
    const bool regression = mode == "regression";
    if (!regression && mode != "classification")
        throw ConfigError("gap.mode must be classification or regression, got '" + mode + "'");
    const NtkConfig kcfg = ntk_config(c);
    const std::size_t d = c.get_size("data.d");
    const InitScheme scheme = parse_init(c.get("net.init"));
    const double init_scale = c.get_double("net.init_scale");

    CsvTable per_seed({"n", "method", "seed", "test_err"});
    std::map<std::pair<std::size_t, std::string>, std::vector<double>> errs;
    for (std::size_t s = 0; s < seeds; ++s) {
        const Seed sseed = derive_seed(base, s);
        for (std::size_t n : ns) {
            const std::string where = " (n=" + std::to_string(n) + ", seed " + std::to_string(s) + ")";
            const Seed nseed = derive_seed(sseed, 1000 + n);
            double net_err = 0.0, kernel_err = 0.0;
            if (!regression) {
                const auto data = stage("data" + where, [&] { return gap_classification_data(c, n, nseed); });
                net_err = stage("net-train" + where, [&] {
                    const NetParams init =
                        init_params(d, {c.get_size("net.width")}, 1, scheme, derive_seed(nseed, 4), init_scale);
                    TrainConfig tc{c.get_double("net.lambda"), c.get_double("net.r"), c.get_double("net.lr"),
                                   c.get_size("net.steps"), LossKind::logistic};
                    return classification_error(train(init, data.train, tc).params, data.test);
                });
                kernel_err = stage("kernel-fit" + where, [&] {
                    return kernel_error(fit_kernel_logistic(data.train, kcfg, kernel_options(c)), data.test);
                });
            } else {
                const auto [tr, te] = stage("data" + where, [&] {
                    const NetParams teacher =
                        unit_variance_teacher(d, c.get_size("gap.regression_teacher_width"), derive_seed(nseed, 3));
                    TeacherSampleOptions o;
                    o.target = TeacherTarget::regression;
                    return std::pair{sample_teacher_net(n, teacher, o, derive_seed(nseed, 1)),
                                     sample_teacher_net(positive_size(c, "data.test_n"), teacher, o,
                                                        derive_seed(nseed, 2))};
                });
                net_err = stage("net-train" + where, [&] {
                    const NetParams init = init_params(d, {n}, 1, scheme, derive_seed(nseed, 4),
                                                       c.get_double("gap.regression_init_scale"));
                    // Width n: the tangent features sum over n units, so the stable step shrinks like 1/n.
                    TrainConfig tc{c.get_double("gap.regression_lambda"), c.get_double("net.r"),
                                   c.get_double("gap.regression_lr") / static_cast<double>(n),
                                   c.get_size("gap.regression_steps"),
                                   LossKind::squared};
                    return truncated_squared_error(train(init, tr, tc).params, te);
                });
                kernel_err = stage("kernel-fit" + where, [&] {
                    return kernel_truncated_error(fit_kernel_ridge(tr, kcfg, c.get_double("ntk.ridge")), te);
                });
            }
            per_seed.row() << n << "net" << s << net_err;
            per_seed.row() << n << "kernel" << s << kernel_err;
            errs[{n, "net"}].push_back(net_err);
            errs[{n, "kernel"}].push_back(kernel_err);
        }
    }

    CsvTable agg({"n", "method", "mean_test_err", "stderr", "seeds"});
    std::string summary;
    for (std::size_t n : ns) {
        const MeanErr net = mean_stderr(errs[{n, "net"}]);
        const MeanErr ker = mean_stderr(errs[{n, "kernel"}]);
        agg.row() << n << "net" << net.mean << net.stderr_ << seeds;
        agg.row() << n << "kernel" << ker.mean << ker.stderr_ << seeds;
        summary += "n=" + std::to_string(n) + " net " + num(net.mean) + " kernel " + num(ker.mean) + "\n";
    }
    ExperimentOutput out;
    out.tables.emplace_back("gap.csv", std::move(agg));
    out.tables.emplace_back("gap_seeds.csv", std::move(per_seed));
    PlotSpec spec;
    spec.title = regression ? "test truncated squared error vs n" : "test error vs n";
    spec.x = "n";
    spec.y = {"mean_test_err"};
    spec.group = "method";
    spec.err = "stderr";
    out.plots.push_back({"gap.svg", "gap.csv", spec});
    out.summary = summary;
    return out;
}

ExperimentOutput run_width_sweep(const ExperimentConfig& c) {
    const std::vector<std::size_t> widths = c.get_sizes("width.widths");
    if (widths.empty()) throw ConfigError("width.widths is empty");
    const std::size_t trials = positive_size(c, "width.trials");
    const std::size_t d = c.get_size("data.d");
    const std::size_t depth = c.get_size("net.depth");
    if (depth < 2) throw ConfigError("net.depth must be at least 2");
    const std::string& scaling = c.get("width.init_scaling");
    if (scaling != "fixed" && scaling != "inv_sqrt_width")
        throw ConfigError("width.init_scaling must be fixed or inv_sqrt_width, got '" + scaling + "'");
    const InitScheme scheme = parse_init(c.get("net.init"));
    const Seed base{c.get_u64("run.seed")};
    TrainConfig tc{c.get_double("net.lambda"), c.get_double("net.r"), c.get_double("width.lr"),
                   c.get_size("width.steps"), LossKind::logistic};

    struct TrialData {
        Dataset train, test;
    };
    std::vector<TrialData> data;
    for (std::size_t t = 0; t < trials; ++t) {
        data.push_back(stage("data (trial " + std::to_string(t) + ")", [&] {
            const Seed ts = derive_seed(base, t);
            const NetParams teacher = make_teacher(d, c.get_size("data.teacher_width"), derive_seed(ts, 1));
            TeacherSampleOptions o;
            o.margin_floor = c.get_double("data.margin_floor");
            return TrialData{sample_teacher_net(positive_size(c, "width.n"), teacher, o, derive_seed(ts, 2)),
                             sample_teacher_net(positive_size(c, "data.test_n"), teacher, o, derive_seed(ts, 3))};
        }));
    }

    CsvTable per_trial({"width", "trial", "fit", "margin", "test_err"});
    CsvTable agg({"width", "margin", "test_err", "fit_fraction", "margin_stderr", "test_err_stderr", "fitted"});
    std::string summary;
    for (std::size_t m : widths) {
        if (m == 0) throw ConfigError("width.widths entries must be positive");
        std::vector<double> margins, test_errs;
        for (std::size_t t = 0; t < trials; ++t) {
            const std::string where = " (width " + std::to_string(m) + ", trial " + std::to_string(t) + ")";
            const auto [fit, margin, test_err] = stage("net-train" + where, [&] {
                const double scale = c.get_double("net.init_scale") *
                                     (scaling == "inv_sqrt_width" ? 1.0 / std::sqrt(static_cast<double>(m)) : 1.0);
                const NetParams init = init_params(d, std::vector<std::size_t>(depth - 1, m), 1, scheme,
                                                   derive_seed(derive_seed(base, t), 100 + m), scale);
                const NetParams trained = train(init, data[t].train, tc).params;
                const MarginReport rep = normalized_margin(trained, data[t].train);
                return std::tuple{rep.zero_train_error, rep.normalized_margin,
                                  classification_error(trained, data[t].test)};
            });
            per_trial.row() << m << t << fit << margin << test_err;
            if (fit) {
                margins.push_back(margin);
                test_errs.push_back(test_err);
            }
        }
        const MeanErr mg = mean_stderr(margins);
        const MeanErr te = mean_stderr(test_errs);
        const double frac = static_cast<double>(margins.size()) / static_cast<double>(trials);
        agg.row() << m << mg.mean << te.mean << frac << mg.stderr_ << te.stderr_ << margins.size();
        summary += "width " + std::to_string(m) + " margin " + num(mg.mean) + " test_err " + num(te.mean) +
                   " fit " + num(frac) + "\n";
    }
    ExperimentOutput out;
    out.tables.emplace_back("width_sweep.csv", std::move(agg));
    out.tables.emplace_back("width_sweep_trials.csv", std::move(per_trial));
    PlotSpec ms;
    ms.title = "normalized margin vs width";
    ms.x = "width";
    ms.y = {"margin"};
    ms.err = "margin_stderr";
    ms.log_x = true;
    out.plots.push_back({"width_margin.svg", "width_sweep.csv", ms});
    PlotSpec es = ms;
    es.title = "test error vs width";
    es.y = {"test_err"};
    es.err = "test_err_stderr";
    out.plots.push_back({"width_test_err.svg", "width_sweep.csv", es});
    out.summary = summary;
    return out;
}

ExperimentOutput run_margin_convergence(const ExperimentConfig& c) {
    const std::vector<double> lambdas = c.get_doubles("margin.lambdas");
    if (lambdas.empty()) throw ConfigError("margin.lambdas is empty");
    for (std::size_t k = 0; k < lambdas.size(); ++k)
        if (!(lambdas[k] > 0.0) || (k > 0 && !(lambdas[k] < lambdas[k - 1])))
            throw ConfigError("margin.lambdas must be positive and strictly decreasing");
    const Dataset line = sample_interval_1d(positive_size(c, "margin.n"), c.get_double("margin.threshold"));
    const FeatureGrid grid = FeatureGrid::interval_1d(positive_size(c, "margin.grid"));
    const L1MarginResult lp = stage("l1svm", [&] { return solve_l1_margin(line, grid); });
    if (!lp.separable) throw StageError("l1svm", "data not separable on the feature grid");
    const double target = lp.gamma / 2.0;

    const Dataset data = lift_with_bias(line);
    MarginSweepOptions opt;
    opt.train = TrainConfig{0.0, c.get_double("net.r"), c.get_double("margin.lr"), c.get_size("margin.steps"),
                            LossKind::logistic};
    opt.rescale_warm_start = c.get_size("margin.rescale") != 0;
    const NetParams init = init_params(2, {positive_size(c, "margin.width")}, 1, parse_init(c.get("net.init")),
                                       derive_seed(Seed{c.get_u64("run.seed")}, 1), c.get_double("net.init_scale"));
    const MarginSweepResult sweep = stage("margin-sweep", [&] { return margin_sweep(data, init, lambdas, opt); });

    CsvTable t({"lambda", "loss", "norm", "margin", "zero_err", "ratio"});
    for (const auto& r : sweep.reports)
        t.row() << r.lambda << r.train_loss << r.frob_norm << r.normalized_margin << r.zero_train_error
                << r.normalized_margin / target;

    const std::size_t points = std::max<std::size_t>(2, c.get_size("margin.plot_points"));
    const double norm_sq = sweep.final_params.frobenius_sq();
    const double alpha_norm = lp.alpha.one_norm();
    CsvTable fns({"x", "net", "svm"});
    double max_gap = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
        const double x = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(points - 1);
        const std::vector<double> lifted{x, 1.0};
        const double fn = forward(sweep.final_params, lifted) / norm_sq;
        const double fs = lp.alpha.evaluate(lifted) / (2.0 * alpha_norm);
        max_gap = std::max(max_gap, std::abs(fn - fs));
        fns.row() << x << fn << fs;
    }

    ExperimentOutput out;
    const double final_ratio = sweep.reports.back().normalized_margin / target;
    out.summary = "gamma_l1 " + num(lp.gamma) + " support " + std::to_string(lp.alpha.atoms.size()) +
                  "\nfinal margin " + num(sweep.reports.back().normalized_margin) + " ratio " + num(final_ratio) +
                  "\nmax normalized function gap " + num(max_gap) + "\n";
    out.tables.emplace_back("margin_convergence.csv", std::move(t));
    out.tables.emplace_back("margin_functions.csv", std::move(fns));
    PlotSpec ms;
    ms.title = "normalized margin / (gamma_l1 / 2) vs lambda";
    ms.x = "lambda";
    ms.y = {"ratio"};
    ms.log_x = true;
    out.plots.push_back({"margin_convergence.svg", "margin_convergence.csv", ms});
    PlotSpec fs;
    fs.title = "normalized net and l1-SVM functions";
    fs.x = "x";
    fs.y = {"net", "svm"};
    out.plots.push_back({"margin_functions.svg", "margin_functions.csv", fs});
    return out;
}

ExperimentOutput run_reg_ablation(const ExperimentConfig& c) {
    const std::size_t seeds = positive_size(c, "run.seeds");
    const std::size_t d = c.get_size("data.d");
    const std::size_t steps = c.get_size("ablation.steps");
    const std::size_t every = positive_size(c, "ablation.trace_every");
    const double lam = c.get_double("ablation.lambda");
    if (!(lam > 0.0)) throw ConfigError("ablation.lambda must be positive");
    const Seed base{c.get_u64("run.seed")};
    const std::vector<double> arms{lam, 0.0};

    struct Point {
        std::size_t step;
        double acc, margin, drift;
    };
    CsvTable t({"lambda", "seed", "step", "test_acc", "margin", "drift"});
    std::map<std::pair<double, std::size_t>, std::vector<Point>> by_step;  // (lambda, step)
    for (std::size_t s = 0; s < seeds; ++s) {
        const Seed ss = derive_seed(base, s);
        const auto [tr, te] = stage("data (seed " + std::to_string(s) + ")", [&] {
            const NetParams teacher = make_teacher(d, c.get_size("data.teacher_width"), derive_seed(ss, 1));
            TeacherSampleOptions o;
            o.margin_floor = c.get_double("data.margin_floor");
            return std::pair{sample_teacher_net(positive_size(c, "ablation.n"), teacher, o, derive_seed(ss, 2)),
                             sample_teacher_net(positive_size(c, "data.test_n"), teacher, o, derive_seed(ss, 3))};
        });
        const NetParams init = init_params(d, {positive_size(c, "ablation.width")}, 1, InitScheme::standard_normal,
                                           derive_seed(ss, 4));
        for (double lambda : arms) {
            const std::string where = " (lambda " + num(lambda) + ", seed " + std::to_string(s) + ")";
            stage("net-train" + where, [&] {
                NetParams p = init;
                TrainConfig tc{lambda, c.get_double("net.r"), c.get_double("ablation.lr"), every, LossKind::logistic};
                auto record = [&](std::size_t step) {
                    const double margin = p.frobenius_sq() > 0.0 ? normalized_margin(p, tr).normalized_margin
                                                                 : std::numeric_limits<double>::quiet_NaN();
                    const Point pt{step, 1.0 - classification_error(p, te), margin, activation_drift(init, p, tr)};
                    t.row() << lambda << s << step << pt.acc << pt.margin << pt.drift;
                    by_step[{lambda, step}].push_back(pt);
                };
                record(0);
                for (std::size_t done = 0; done < steps;) {
                    tc.steps = std::min(every, steps - done);
                    p = train(p, tr, tc).params;
                    done += tc.steps;
                    record(done);
                }
                return 0;
            });
        }
    }

    std::string summary;
    if (seeds > 1) {
        for (double lambda : arms) {
            for (const auto& [key, pts] : by_step) {
                if (key.first != lambda) continue;
                double acc = 0.0, margin = 0.0, drift = 0.0;
                for (const auto& p : pts) {
                    acc += p.acc;
                    margin += p.margin;
                    drift += p.drift;
                }
                const double k = static_cast<double>(pts.size());
                t.row() << lambda << "mean" << key.second << acc / k << margin / k << drift / k;
            }
        }
    }
    // Final-step summary over seeds.
    for (double lambda : arms) {
        const auto& pts = by_step[{lambda, steps}];
        double acc = 0.0, margin = 0.0, drift = 0.0;
        for (const auto& p : pts) {
            acc += p.acc;
            margin += p.margin;
            drift += p.drift;
        }
        const double k = static_cast<double>(pts.size());
        summary += "lambda " + num(lambda) + " test_acc " + num(acc / k) + " margin " + num(margin / k) + " drift " +
                   num(drift / k) + "\n";
    }

    ExperimentOutput out;
    out.tables.emplace_back("reg_ablation.csv", std::move(t));
    const std::string shown = seeds > 1 ? "mean" : "0";
    const std::pair<const char*, const char*> plots[] = {
        {"test_acc", "test accuracy"}, {"margin", "normalized margin"}, {"drift", "changed activation fraction"}};
    for (const auto& [col, title] : plots) {
        PlotSpec p;
        p.title = std::string(title) + " vs step";
        p.x = "step";
        p.y = {col};
        p.group = "lambda";
        p.filter_column = "seed";
        p.filter_value = shown;
        out.plots.push_back({"reg_ablation_" + std::string(col) + ".svg", "reg_ablation.csv", p});
    }
    out.summary = summary;
    return out;
}

ExperimentOutput run_wgf(const ExperimentConfig& c) {
    WgfConfig cfg;
    cfg.sigma = c.get_double("wgf.sigma");
    cfg.eta = c.get_double("wgf.eta");
    cfg.lambda = c.get_double("wgf.lambda");
    cfg.inject_count = c.get_size("wgf.inject");
    cfg.prune_threshold = c.get_double("wgf.prune");
    cfg.max_particles = c.get_size("wgf.max_particles");
    cfg.eviction_min_age = c.get_size("wgf.min_age");
    cfg.steps = c.get_size("wgf.steps");
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const std::size_t every = positive_size(c, "wgf.trace_every");
    const std::size_t d = c.get_size("wgf.d");
    const std::size_t count = positive_size(c, "wgf.particles");
    const Seed base{c.get_u64("run.seed")};
    const Dataset data = stage("data", [&] { return sample_distribution_d(positive_size(c, "wgf.n"), d, derive_seed(base, 1)); });
    const ParticleEnsemble init = ParticleEnsemble::uniform_sphere(d, count, derive_seed(base, 2));
    const WgfRun flow = stage("wgf", [&] { return run(init, data, cfg, derive_seed(base, 3)); });
    const RegularityConstants rc = regularity_constants(data, cfg.lambda);

    CsvTable trace({"step", "loss", "second_moment", "n_particles", "min_loss", "mass", "w2_bound"});
    for (const auto& r : flow.trace) {
        if (r.step % every != 0 && r.step != cfg.steps) continue;
        trace.row() << r.step << r.loss << r.second_moment << r.particles << r.min_loss << r.mass
                    << second_moment_bound(flow.trace.front().loss, r.step, cfg, rc);
    }
    ExperimentOutput out;
    out.summary = "wgf min loss " + num(flow.trace.back().min_loss) + " final particles " +
                  std::to_string(flow.trace.back().particles) + "\n";
    out.tables.emplace_back("wgf_trace.csv", std::move(trace));
    PlotSpec ps;
    ps.title = "distributional loss vs step";
    ps.x = "step";
    ps.y = {"loss", "min_loss"};
    out.plots.push_back({"wgf_loss.svg", "wgf_trace.csv", ps});
    PlotSpec ws;
    ws.title = "second moment vs step";
    ws.x = "step";
    ws.y = {"second_moment"};
    out.plots.push_back({"wgf_second_moment.svg", "wgf_trace.csv", ws});

    if (c.get_size("wgf.baseline") != 0) {
        // The finite net with theta'_j = sqrt(omega_j) theta_j has the same
        // function and n times smaller objective under lambda / n; lr eta n
        // then gives the same first-order step.
        const double n = static_cast<double>(data.n());
        NetParams p(d, {count}, 1);
        for (std::size_t j = 0; j < count; ++j) {
            const auto th = init.theta(j);
            const double s = std::sqrt(init.weight(j));
            p.at(1, 0, j) = s * th[0];
            for (std::size_t k = 0; k < d; ++k) p.at(0, j, k) = s * th[1 + k];
        }
        const TrainConfig tc{cfg.lambda / n, 2.0, cfg.eta * n, cfg.steps, LossKind::logistic};
        const TrainResult net = stage("baseline-train", [&] { return train(p, data, tc); });
        CsvTable bt({"step", "loss", "min_loss"});
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < net.loss_trace.size(); ++k) {
            best = std::min(best, n * net.loss_trace[k]);
            if (k % every == 0 || k == cfg.steps) bt.row() << k << n * net.loss_trace[k] << best;
        }
        out.summary += "baseline min loss " + num(best) + " ratio " + num(flow.trace.back().min_loss / best) + "\n";
        out.tables.emplace_back("wgf_baseline.csv", std::move(bt));
    }
    return out;
}

namespace {

std::vector<double> random_signs(CounterRng& rng, std::size_t count) {
    std::vector<double> v(count);
    for (double& x : v) x = rng.sign();
    return v;
}

struct ProbeRow {
    std::string statistic;
    double value;
    double low = std::numeric_limits<double>::quiet_NaN();
    double high = std::numeric_limits<double>::quiet_NaN();
    std::string config;
};

// Kernel logistic fit on a D-sample, the beta the gap and mass probes use.
KernelModel probe_fit(const ExperimentConfig& c, Seed base) {
    const Dataset support =
        sample_distribution_d(positive_size(c, "lb.probe_n"), c.get_size("lb.probe_d"), derive_seed(base, 1));
    return fit_kernel_logistic(support, ntk_config(c), kernel_options(c));
}

}  // namespace

ExperimentOutput run_lowerbound(const ExperimentConfig& c) {
    const std::string& probe = c.get("lb.probe");
    const Seed base{c.get_u64("run.seed")};
    const double tau1 = c.get_double("ntk.tau1"), tau2 = c.get_double("ntk.tau2");
    std::vector<ProbeRow> rows;
    std::string summary;

    if (probe == "cube-exp") {
        const std::size_t d = positive_size(c, "lb.d");
        const std::size_t n = positive_size(c, "lb.n");
        const int p = static_cast<int>(c.get_size("lb.p")), q = static_cast<int>(c.get_size("lb.q"));
        CounterRng rng(base, 1);
        const std::vector<double> points = random_signs(rng, n * d);
        std::vector<double> beta(n);
        for (double& b : beta) b = rng.normal();
        // + 0.0 folds a negative zero into 0.
        const double v = stage("cube-exp", [&] { return cube_exp_bruteforce(d, points, beta, p, q); }) + 0.0;
        const std::string cfg = "d=" + std::to_string(d) + " n=" + std::to_string(n) + " p=" + std::to_string(p) +
                                " q=" + std::to_string(q);
        rows.push_back({"cube_exp", v, v, v, cfg});
        summary = CsvTable::format_number(v) + "\n";
    } else if (probe == "residuals") {
        const std::vector<std::size_t> ds = c.get_sizes("lb.ds");
        if (ds.size() < 2) throw ConfigError("lb.ds needs at least two dimensions");
        const std::size_t trials = c.get_size("lb.trials");
        std::vector<double> lx, l1, l2;
        for (std::size_t d : ds) {
            CounterRng rng(derive_seed(base, d), 0);
            std::vector<double> x = random_signs(rng, d);
            x[0] = 1.0;
            x[1] = 0.0;
            const ResidualStats st =
                stage("residuals (d=" + std::to_string(d) + ")",
                      [&] { return cancellation_residuals(x, d, trials, derive_seed(base, 10'000 + d)); });
            const std::string cfg = "d=" + std::to_string(d) + " trials=" + std::to_string(trials);
            rows.push_back({"k1_mean", st.k1_mean, {}, {}, cfg});
            rows.push_back({"k1_max", st.k1_max, {}, {}, cfg});
            rows.push_back({"k2_mean", st.k2_mean, {}, {}, cfg});
            rows.push_back({"k2_max", st.k2_max, {}, {}, cfg});
            lx.push_back(std::log(static_cast<double>(d)));
            l1.push_back(std::log(st.k1_mean));
            l2.push_back(std::log(st.k2_mean));
        }
        auto slope = [&](const std::vector<double>& ly) {
            double mx = 0.0, my = 0.0;
            for (std::size_t k = 0; k < lx.size(); ++k) {
                mx += lx[k];
                my += ly[k];
            }
            mx /= static_cast<double>(lx.size());
            my /= static_cast<double>(lx.size());
            double sxy = 0.0, sxx = 0.0;
            for (std::size_t k = 0; k < lx.size(); ++k) {
                sxy += (lx[k] - mx) * (ly[k] - my);
                sxx += (lx[k] - mx) * (lx[k] - mx);
            }
            return sxy / sxx;
        };
        rows.push_back({"k1_slope", slope(l1), {}, {}, "log-log fit over lb.ds"});
        rows.push_back({"k2_slope", slope(l2), {}, {}, "log-log fit over lb.ds"});
        summary = "k1 slope " + num(rows[rows.size() - 2].value) + " k2 slope " + num(rows.back().value) + "\n";
    } else if (probe == "polyg") {
        const std::size_t d = c.get_size("lb.probe_d");
        const PolyG g(d, tau1, tau2);
        double max_res = 0.0, max_ratio = 0.0;
        for (int k = -750; k <= 750; ++k) {
            const double t = k / 1000.0;
            const double r = poly_g_residual(t, tau1, tau2, d);
            max_res = std::max(max_res, r);
            if (k != 0)
                max_ratio = std::max(max_ratio, r / (static_cast<double>(d - 1) * (tau1 + tau2) * std::pow(std::abs(t), 5)));
        }
        const double a2 = g.scaled_coefficient(2);
        const double a2_expected = (tau1 + tau2 / 2.0) / (M_PI * static_cast<double>(d - 1));
        const std::string cfg = "d=" + std::to_string(d) + " tau1=" + num(tau1) + " tau2=" + num(tau2);
        rows.push_back({"max_residual", max_res, {}, {}, cfg + " |t|<=0.75 step 1e-3"});
        rows.push_back({"max_residual_over_t5_bound", max_ratio, {}, {}, cfg});
        rows.push_back({"a2", a2, {}, {}, cfg});
        rows.push_back({"a2_expected", a2_expected, {}, {}, cfg});
        rows.push_back({"a2_identity_error", std::abs(a2 - a2_expected), {}, {}, cfg});
        rows.push_back({"coeff3", g.coeff[3], {}, {}, cfg});
        summary = "max residual " + num(max_res) + " ratio to (d-1)(tau1+tau2)|t|^5 " + num(max_ratio) +
                  "\na2 identity error " + num(std::abs(a2 - a2_expected)) + "\n";
    } else if (probe == "gap" || probe == "mass") {
        const KernelModel km = stage("kernel-fit", [&] { return probe_fit(c, base); });
        const std::size_t trials = positive_size(c, "lb.trials");
        const std::string cfg = "d=" + c.get("lb.probe_d") + " n=" + c.get("lb.probe_n") +
                                " trials=" + std::to_string(trials);
        double cst = c.get_double("lb.c");
        if (probe == "gap" || cst <= 0.0) {
            const RatioSample rs = stage("gap-probe", [&] {
                return f_tilde_gap_probe(km.support, km.beta, tau1, tau2, trials, derive_seed(base, 2));
            });
            cst = rs.quantile(0.99);
            if (probe == "gap") {
                rows.push_back({"ratio_q50", rs.quantile(0.5), {}, {}, cfg});
                rows.push_back({"ratio_q99", cst, {}, {}, cfg});
                rows.push_back({"ratio_max", rs.quantile(1.0), {}, {}, cfg});
                summary = "fitted c (99th percentile) " + num(cst) + "\n";
            }
        }
        if (probe == "mass") {
            const ProbabilityEstimate pe = stage("mass-probe", [&] {
                return f_tilde_mass_probe(km.support, km.beta, tau1, tau2, cst, trials, derive_seed(base, 3),
                                          c.get_double("lb.multiplier"));
            });
            rows.push_back({"c", cst, {}, {}, cfg});
            rows.push_back({"threshold", pe.threshold, {}, {}, cfg});
            rows.push_back({"probability", pe.p, pe.lower, pe.upper, cfg});
            summary = "Pr(|f~| >= threshold) " + num(pe.p) + " [" + num(pe.lower) + ", " + num(pe.upper) + "]\n";
        }
    } else {
        throw ConfigError("lb.probe must be cube-exp, residuals, polyg, gap or mass, got '" + probe + "'");
    }

    CsvTable t({"statistic", "value", "interval_low", "interval_high", "config"});
    for (const auto& r : rows) t.row() << r.statistic << r.value << r.low << r.high << r.config;
    ExperimentOutput out;
    out.tables.emplace_back("lowerbound_" + probe + ".csv", std::move(t));
    out.summary = summary;
    return out;
}

ExperimentOutput run_gram_dump(const ExperimentConfig& c) {
    const std::string& path = c.get("data.path");
    const Dataset data = stage("data", [&] {
        return path.empty() ? sample_distribution_d(positive_size(c, "data.n"), c.get_size("data.d"),
                                                    derive_seed(Seed{c.get_u64("run.seed")}, 1))
                            : load_csv(path, LabelKind::binary);
    });
    const Eigen::MatrixXd g = stage("gram", [&] { return gram(data, ntk_config(c)); });
    std::vector<std::string> header{"row"};
    for (Eigen::Index j = 0; j < g.cols(); ++j) header.push_back("c" + std::to_string(j));
    CsvTable t(header);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        std::vector<std::string> cells{std::to_string(i)};
        for (Eigen::Index j = 0; j < g.cols(); ++j) cells.push_back(CsvTable::format_number(g(i, j)));
        t.add_row(std::move(cells));
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    ExperimentOutput out;
    out.summary = "n " + std::to_string(data.n()) + " trace " + num(g.trace()) + " min eigenvalue " +
                  num(es.eigenvalues().minCoeff()) + "\n";
    out.tables.emplace_back("gram.csv", std::move(t));
    return out;
}

}  // namespace marginlab
