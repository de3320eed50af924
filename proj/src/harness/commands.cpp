#include "marginlab/harness/commands.hpp"

#include "marginlab/harness/experiments.hpp"
#include "marginlab/harness/manifest.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace marginlab {

namespace {

struct FlagSpec {
    const char* flag;
    const char* key;
};

struct CommandSpec {
    const char* name;
    const char* help;
    std::function<ExperimentOutput(const ExperimentConfig&)> run;
    std::vector<FlagSpec> flags;
};

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> specs = {
        {"gap", "test error of a trained net and the tangent kernel as n grows", run_gap,
         {{"--ns", "gap.ns"},
          {"--mode", "gap.mode"},
          {"--dist", "data.dist"},
          {"--d", "data.d"},
          {"--test-n", "data.test_n"},
          {"--width", "net.width"},
          {"--lambda", "net.lambda"},
          {"--lr", "net.lr"},
          {"--steps", "net.steps"},
          {"--init", "net.init"},
          {"--tau1", "ntk.tau1"},
          {"--tau2", "ntk.tau2"},
          {"--kernel-reg", "ntk.reg"},
          {"--kernel-steps", "ntk.steps"},
          {"--ridge", "ntk.ridge"}}},
        {"width-sweep", "normalized margin and test error across hidden widths", run_width_sweep,
         {{"--widths", "width.widths"},
          {"--n", "width.n"},
          {"--d", "data.d"},
          {"--teacher-width", "data.teacher_width"},
          {"--margin-floor", "data.margin_floor"},
          {"--depth", "net.depth"},
          {"--lambda", "net.lambda"},
          {"--lr", "width.lr"},
          {"--steps", "width.steps"},
          {"--trials", "width.trials"},
          {"--init-scaling", "width.init_scaling"}}},
        {"margin-convergence", "net margin against the l1-SVM optimum on 1-D data", run_margin_convergence,
         {{"--n", "margin.n"},
          {"--grid", "margin.grid"},
          {"--width", "margin.width"},
          {"--lambdas", "margin.lambdas"},
          {"--lr", "margin.lr"},
          {"--steps", "margin.steps"},
          {"--rescale", "margin.rescale"},
          {"--points", "margin.plot_points"}}},
        {"reg-ablation", "regularized vs unregularized training from one initialization", run_reg_ablation,
         {{"--lambda", "ablation.lambda"},
          {"--n", "ablation.n"},
          {"--d", "data.d"},
          {"--teacher-width", "data.teacher_width"},
          {"--width", "ablation.width"},
          {"--lr", "ablation.lr"},
          {"--steps", "ablation.steps"},
          {"--trace-every", "ablation.trace_every"},
          {"--trials", "run.seeds"}}},
        {"wgf", "perturbed particle gradient flow with a finite-net baseline", run_wgf,
         {{"--sigma", "wgf.sigma"},
          {"--eta", "wgf.eta"},
          {"--lambda", "wgf.lambda"},
          {"--inject", "wgf.inject"},
          {"--prune", "wgf.prune"},
          {"--particles", "wgf.particles"},
          {"--max-particles", "wgf.max_particles"},
          {"--min-age", "wgf.min_age"},
          {"--steps", "wgf.steps"},
          {"--n", "wgf.n"},
          {"--d", "wgf.d"},
          {"--trace-every", "wgf.trace_every"},
          {"--baseline", "wgf.baseline"}}},
        {"lowerbound", "kernel lower-bound probes: cube-exp, residuals, polyg, gap, mass", run_lowerbound,
         {{"--d", "lb.d"},
          {"--n", "lb.n"},
          {"--p", "lb.p"},
          {"--q", "lb.q"},
          {"--trials", "lb.trials"},
          {"--ds", "lb.ds"},
          {"--probe-d", "lb.probe_d"},
          {"--probe-n", "lb.probe_n"},
          {"--c", "lb.c"},
          {"--multiplier", "lb.multiplier"},
          {"--tau1", "ntk.tau1"},
          {"--tau2", "ntk.tau2"}}},
        {"gram-dump", "tangent kernel Gram matrix of a dataset", run_gram_dump,
         {{"--n", "data.n"}, {"--d", "data.d"}, {"--data", "data.path"}, {"--tau1", "ntk.tau1"}, {"--tau2", "ntk.tau2"}}},
    };
    return specs;
}

std::string help_for_key(const std::string& key) {
    for (const auto& k : ExperimentConfig::registry()) {
        if (k.name != key) continue;
        const std::string def = k.default_value.empty() ? "''" : k.default_value;
        return k.help + " [" + key + ", default " + def + "]";
    }
    return key;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Margin, kernel and particle-flow experiments on synthetic data", "marginlab"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir;
    std::vector<std::string> sets;
    std::string seed, seeds;
    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--preset", preset, "named full-scale configuration: gG1, gG2, gG3, s6");
    app.add_option("--set", sets, "override any config key, KEY=VALUE (repeatable)");
    app.add_option("--seed", seed, "base seed [run.seed]");
    app.add_option("--seeds", seeds, "independent repetitions [run.seeds]");
    app.add_option("--out", out_dir, "output directory (default out/<command>)");
    app.fallthrough();

    // One value slot per (command, flag).
    std::map<std::pair<std::string, std::string>, std::string> flag_values;
    std::string probe;
    std::vector<std::pair<CLI::App*, const CommandSpec*>> subs;
    for (const auto& spec : commands()) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        sub->fallthrough();
        if (std::string(spec.name) == "lowerbound")
            sub->add_option("probe", probe, "cube-exp | residuals | polyg | gap | mass [lb.probe]");
        for (const auto& f : spec.flags)
            sub->add_option(f.flag, flag_values[{spec.name, f.flag}], help_for_key(f.key));
        subs.emplace_back(sub, &spec);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* shown = &app;
        for (const auto& [sub, spec] : subs)
            if (sub->parsed()) shown = sub;
        out << shown->help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "marginlab: " << e.what() << "\n\n";
        const CLI::App* shown = &app;
        for (const auto& [sub, spec] : subs)
            if (sub->parsed()) shown = sub;
        err << shown->help();
        return 2;
    }

    CLI::App* active = nullptr;
    const CommandSpec* spec = nullptr;
    for (const auto& [sub, s] : subs)
        if (sub->parsed()) {
            active = sub;
            spec = s;
        }

    ExperimentConfig config;
    try {
        if (!preset.empty()) config.apply_preset(preset);
        if (!config_path.empty()) config.load_file(config_path);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
            config.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!seed.empty()) config.set("run.seed", seed);
        if (!seeds.empty()) config.set("run.seeds", seeds);
        if (!probe.empty()) config.set("lb.probe", probe);
        for (const auto& f : spec->flags)
            if (active->count(f.flag) > 0) config.set(f.key, flag_values[{spec->name, f.flag}]);
    } catch (const ConfigError& e) {
        err << "marginlab: " << e.what() << "\n";
        return 2;
    }

    std::string command = spec->name;
    if (command == "lowerbound") command += " " + config.get("lb.probe");
    try {
        const ExperimentOutput result = spec->run(config);
        std::filesystem::path dir = out_dir;
        if (dir.empty()) {
            dir = std::filesystem::path("out") / spec->name;
            if (std::string(spec->name) == "lowerbound") dir /= config.get("lb.probe");
        }
        std::filesystem::create_directories(dir);
        RunManifest manifest;
        manifest.command = command;
        manifest.seed = config.get_u64("run.seed");
        manifest.config_snapshot = config.serialize();
        for (const auto& [file, table] : result.tables) write_output(manifest, dir, file, table.to_string());
        for (const auto& plot : result.plots)
            write_output(manifest, dir, plot.file, render_svg(result.table(plot.table), plot.spec));
        finalize_manifest(manifest, dir);
        out << result.summary;
        err << "marginlab: " << command << ": wrote " << dir.string() << " (run " << manifest.run_id() << ")\n";
    } catch (const ConfigError& e) {
        err << "marginlab: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "marginlab: " << command << " failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace marginlab
