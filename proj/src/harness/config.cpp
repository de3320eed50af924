#include "marginlab/harness/config.hpp"

#include "marginlab/core/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace marginlab {

const std::vector<ConfigKey>& ExperimentConfig::registry() {
    // Desk-scale defaults; presets restore the full appendix configurations.
    static const std::vector<ConfigKey> keys = {
        {"run.seed", "0", "base seed"},
        {"run.seeds", "1", "independent repetitions"},

        {"data.dist", "D", "D | teacher"},
        {"data.n", "200", "training examples"},
        {"data.d", "20", "input dimension"},
        {"data.test_n", "2000", "held-out examples"},
        {"data.teacher_width", "10", "hidden units of the teacher net"},
        {"data.margin_floor", "0.01", "minimum |teacher(x)| kept by rejection sampling"},
        {"data.path", "", "CSV dataset for gram-dump; empty samples D"},

        {"ntk.tau1", "0", "weight of K1"},
        {"ntk.tau2", "1", "weight of K1 + K2"},
        {"ntk.reg", "1e-6", "kernel logistic regularizer"},
        {"ntk.steps", "20000", "kernel logistic gradient steps"},
        {"ntk.lr", "0", "kernel logistic step size; 0 selects n / lambda_max(G)"},
        {"ntk.ridge", "1e-6", "kernel ridge coefficient"},

        {"net.depth", "2", "layers q"},
        {"net.width", "64", "hidden units per layer"},
        {"net.lambda", "1e-5", "regularization weight"},
        {"net.r", "2", "norm exponent"},
        {"net.lr", "0.5", "gradient descent step size"},
        {"net.steps", "2000", "gradient descent steps"},
        {"net.loss", "logistic", "logistic | cross_entropy | squared | truncated_squared"},
        {"net.init", "fan_in", "fan_in | standard_normal"},
        {"net.init_scale", "1", "multiplier on every initial weight"},

        {"gap.ns", "50,100,200,400", "training set sizes"},
        {"gap.mode", "classification", "classification | regression"},
        {"gap.regression_teacher_width", "6", "teacher hidden units in regression mode"},
        {"gap.regression_lambda", "1e-8", "net regularization in regression mode"},
        {"gap.regression_init_scale", "0.1", "init multiplier in regression mode; small init leaves the kernel regime"},
        {"gap.regression_steps", "10000", "net steps in regression mode"},
        {"gap.regression_lr", "8", "net step size times width in regression mode"},

        {"width.widths", "16,32,64,128,256,512,1024", "hidden layer sizes"},
        {"width.n", "100", "training examples"},
        {"width.lr", "0.4", "step size"},
        {"width.steps", "5000", "gradient descent steps"},
        {"width.trials", "4", "trials per width"},
        {"width.init_scaling", "inv_sqrt_width", "fixed | inv_sqrt_width (extra 1/sqrt(width) factor)"},

        {"margin.n", "20", "1-D training points"},
        {"margin.threshold", "0.5", "label +1 iff |x| > threshold"},
        {"margin.grid", "1000", "(w, b) directions in the LP"},
        {"margin.width", "21", "hidden units"},
        {"margin.lambdas",
         "0.0625,0.03125,0.015625,0.0078125,0.00390625,0.001953125,0.0009765625,0.00048828125,0.000244140625,"
         "0.0001220703125,6.103515625e-05",
         "decreasing regularization grid"},
        {"margin.lr", "0.1", "step size"},
        {"margin.steps", "20000", "steps per lambda"},
        {"margin.rescale", "1", "rescale the warm start between lambdas"},
        {"margin.plot_points", "201", "x grid of the function comparison"},

        {"ablation.lambda", "5e-4", "regularized arm"},
        {"ablation.n", "200", "training examples"},
        {"ablation.width", "100", "hidden units"},
        {"ablation.lr", "0.1", "step size"},
        {"ablation.steps", "20000", "gradient descent steps"},
        {"ablation.trace_every", "1000", "steps between trace rows"},

        {"wgf.n", "32", "training examples from D"},
        {"wgf.d", "5", "input dimension"},
        {"wgf.sigma", "1e-4", "noise rate"},
        {"wgf.eta", "1e-2", "step size"},
        {"wgf.lambda", "1e-3", "V coefficient"},
        {"wgf.inject", "8", "particles injected per step"},
        {"wgf.prune", "0", "weight floor"},
        {"wgf.particles", "512", "initial particles"},
        {"wgf.max_particles", "2048", "particle cap"},
        {"wgf.min_age", "200", "steps before a particle can be evicted"},
        {"wgf.steps", "20000", "update steps"},
        {"wgf.trace_every", "1", "steps between trace rows"},
        {"wgf.baseline", "1", "also train the equivalent finite network"},

        {"lb.probe", "cube-exp", "cube-exp | residuals | polyg | gap | mass"},
        {"lb.d", "8", "dimension"},
        {"lb.n", "10", "cube-exp points"},
        {"lb.ds", "64,128,256,512", "dimensions of the residual probe"},
        {"lb.probe_d", "20", "dimension of the polyg, gap and mass probes"},
        {"lb.probe_n", "100", "kernel support size of the gap and mass probes"},
        {"lb.trials", "100000", "Monte Carlo draws"},
        {"lb.multiplier", "1.5", "threshold multiplier of the mass probe"},
        {"lb.p", "1", "exponent p"},
        {"lb.q", "2", "exponent q"},
        {"lb.c", "0", "constant of the mass probe; 0 fits it first"},
    };
    return keys;
}

ExperimentConfig::ExperimentConfig() {
    for (const auto& k : registry()) values_[k.name] = k.default_value;
}

bool ExperimentConfig::known(std::string_view key) {
    const auto& r = registry();
    return std::any_of(r.begin(), r.end(), [&](const ConfigKey& k) { return k.name == key; });
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (!known(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void ExperimentConfig::load_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!known(key)) throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown config key '" + key + "'");
        values_[key] = trim(line.substr(eq + 1));
    }
}

void ExperimentConfig::load_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    load_text(ss.str(), path.string());
}

std::vector<std::string> ExperimentConfig::preset_names() { return {"gG1", "gG2", "gG3", "s6"}; }

void ExperimentConfig::apply_preset(std::string_view name) {
    if (name == "gG1") {
        // Width sweep at the appendix scale.
        load_text("data.d=20\ndata.teacher_width=10\ndata.margin_floor=0.01\nnet.lambda=1e-5\n"
                  "width.lr=0.1\nwidth.n=200\nwidth.steps=80000\nwidth.trials=20\nwidth.widths=16,32,64,128,256,512,1024\n",
                  "preset gG1");
    } else if (name == "gG2") {
        load_text("data.d=20\ngap.ns=50,100,200,400\nrun.seeds=20\nntk.tau1=0\nntk.tau2=1\n"
                  "gap.regression_teacher_width=6\ngap.regression_lambda=1e-8\ngap.regression_steps=20000\n",
                  "preset gG2");
    } else if (name == "gG3") {
        load_text("margin.n=20\nmargin.grid=1000\nmargin.steps=20000\n", "preset gG3");
    } else if (name == "s6") {
        load_text("data.d=20\ndata.teacher_width=10\nablation.n=200\nablation.steps=20000\nablation.lr=0.1\n"
                  "ablation.lambda=5e-4\nrun.seeds=20\n",
                  "preset s6");
    } else {
        throw ConfigError("unknown preset '" + std::string(name) + "'");
    }
}

const std::string& ExperimentConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const {
    const std::string& s = get(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError("config key '" + key + "' needs a number, got '" + s + "'");
    return v;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key) const {
    const std::string& s = get(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("config key '" + key + "' needs a non-negative integer, got '" + s + "'");
    return v;
}

std::size_t ExperimentConfig::get_size(const std::string& key) const { return static_cast<std::size_t>(get_u64(key)); }

std::vector<double> ExperimentConfig::get_doubles(const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(get(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size())
            throw ConfigError("config key '" + key + "' has non-numeric entry '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> ExperimentConfig::get_sizes(const std::string& key) const {
    std::vector<std::size_t> out;
    for (double v : get_doubles(key)) {
        if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError("config key '" + key + "' needs integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::string ExperimentConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

}  // namespace marginlab
