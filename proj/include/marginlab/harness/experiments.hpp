#pragma once
// Experiment pipelines behind the command-line subcommands. Each pipeline
// reads only the resolved configuration and returns its tables and plot
// specifications; writing files and manifests is left to the caller, so the
// same runs back the acceptance checks.
#include "marginlab/core/errors.hpp"
#include "marginlab/harness/config.hpp"
#include "marginlab/harness/csv_table.hpp"
#include "marginlab/harness/svg_plot.hpp"

#include <string>
#include <utility>
#include <vector>

namespace marginlab {

// A failure inside a pipeline, tagged with the stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct PlotOutput {
    std::string file;   // e.g. "gap.svg"
    std::string table;  // the CSV it is drawn from
    PlotSpec spec;
};

struct ExperimentOutput {
    std::vector<std::pair<std::string, CsvTable>> tables;  // file name, table
    std::vector<PlotOutput> plots;
    std::string summary;  // human-readable lines for stdout

    const CsvTable& table(const std::string& file) const;  // throws std::out_of_range
};

// Net vs kernel test error per training set size.
//   gap.csv        n, method, mean_test_err, stderr, seeds
//   gap_seeds.csv  n, method, seed, test_err
ExperimentOutput run_gap(const ExperimentConfig& config);

// Normalized margin and test error per hidden width on teacher data, averaged
// over the trials that reached zero training error.
//   width_sweep.csv         width, margin, test_err, fit_fraction, margin_stderr, test_err_stderr, fitted
//   width_sweep_trials.csv  width, trial, fit, margin, test_err
ExperimentOutput run_width_sweep(const ExperimentConfig& config);

// l1-SVM on the 1-D grid, then a warm-started lambda sweep of a two-layer net.
//   margin_convergence.csv  lambda, loss, norm, margin, zero_err, ratio
//   margin_functions.csv    x, net, svm   (net / ||Theta||^2 and <alpha, phi> / 2)
ExperimentOutput run_margin_convergence(const ExperimentConfig& config);

// Regularized vs unregularized training from one N(0,1) initialization.
//   reg_ablation.csv  lambda, seed, step, test_acc, margin, drift
// Rows with seed "mean" average over seeds and appear only when seeds > 1.
ExperimentOutput run_reg_ablation(const ExperimentConfig& config);

// Particle flow on D plus, optionally, the equivalent finite network.
//   wgf_trace.csv     step, loss, second_moment, n_particles, min_loss, mass, w2_bound
//   wgf_baseline.csv  step, loss, min_loss
ExperimentOutput run_wgf(const ExperimentConfig& config);

// One lower-bound probe selected by lb.probe.
//   lowerbound_<probe>.csv  statistic, value, interval_low, interval_high, config
ExperimentOutput run_lowerbound(const ExperimentConfig& config);

// Kernel Gram matrix of a sampled (or loaded) dataset.
//   gram.csv  row, c0, c1, ...
ExperimentOutput run_gram_dump(const ExperimentConfig& config);

}  // namespace marginlab
