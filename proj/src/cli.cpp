#include "fracmv/cli/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracmv/core/error.hpp"
#include "fracmv/core/parallel.hpp"
#include "fracmv/core/rng.hpp"
#include "fracmv/dev/deviations.hpp"
#include "fracmv/fbm/fbm.hpp"
#include "fracmv/io/io.hpp"
#include "fracmv/measure/measure_path.hpp"
#include "fracmv/mkv/diagnostics.hpp"
#include "fracmv/mkv/solver.hpp"

namespace fracmv::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct KeySpec {
    std::string key;
    std::string flag;
    std::string default_value;  // empty string means "unset"
    std::string help;
};

std::vector<KeySpec> global_keys() {
    return {
        {"seed", "--seed", "0", "root seed of every random stream"},
        {"threads", "--threads", "1", "worker thread cap (FRACMV_THREADS overrides the config file)"},
        {"out_dir", "--out-dir", ".", "directory for outputs and the manifest"},
        {"strict", "--strict", "false", "treat non-convergence as a numeric failure"},
    };
}

std::vector<KeySpec> grid_keys(const std::string& n_default) {
    return {
        {"hurst", "--hurst", "0.75", "Hurst parameter H"},
        {"grid.n", "--grid-n", n_default, "number of time steps"},
        {"grid.t_end", "--t-end", "1.0", "time horizon T"},
    };
}

std::vector<KeySpec> model_keys() {
    return {
        {"model.family", "--model", "tanh", "model family: linear | tanh"},
        {"model.dim", "--dim", "1", "state dimension"},
        {"model.params.a", "--model-a", "1.0", "drift coefficient a in -a x"},
        {"model.params.c", "--model-c", "0.5", "mean-field coefficient c in c mean(mu)"},
        {"model.params.b0", "--model-b0", "0.0", "constant drift b0"},
        {"model.params.s0", "--model-s0", "0.5", "diffusion level s0"},
        {"model.params.s1", "--model-s1", "0.25", "tanh(x) diffusion coefficient (tanh family)"},
        {"model.params.s2", "--model-s2", "0.25", "tanh(mean) diffusion coefficient (tanh family)"},
        {"x0", "--x0", "0.0", "initial point (comma list or one value for every coordinate)"},
    };
}

std::vector<KeySpec> concat(std::vector<std::vector<KeySpec>> parts) {
    std::vector<KeySpec> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

class Settings {
public:
    explicit Settings(std::map<std::string, std::string> values) : values_(std::move(values)) {}

    const std::map<std::string, std::string>& values() const { return values_; }

    bool has(const std::string& key) const {
        auto it = values_.find(key);
        return it != values_.end() && !it->second.empty();
    }

    std::string str(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end() || it->second.empty()) throw DomainError("missing required setting '" + key + "'");
        return it->second;
    }

    double real(const std::string& key, double lo = -INFINITY, double hi = INFINITY) const {
        const double v = parse_real(key, str(key));
        require(v >= lo && v <= hi, "setting '" + key + "' = " + str(key) + " is outside [" + format_double(lo) + ", " +
                                        format_double(hi) + "]");
        return v;
    }

    std::size_t count(const std::string& key, std::size_t lo = 0) const {
        const std::string s = str(key);
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(s, &used);
        } catch (const std::exception&) {
            throw DomainError("setting '" + key + "' must be an integer, got '" + s + "'");
        }
        require(used == s.size(), "setting '" + key + "' must be an integer, got '" + s + "'");
        require(v >= static_cast<long long>(lo), "setting '" + key + "' must be at least " + std::to_string(lo));
        return static_cast<std::size_t>(v);
    }

    bool flag(const std::string& key) const {
        const std::string s = str(key);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw DomainError("setting '" + key + "' must be true or false, got '" + s + "'");
    }

    std::vector<double> reals(const std::string& key) const {
        std::vector<double> out;
        std::istringstream in(str(key));
        std::string cell;
        while (std::getline(in, cell, ',')) out.push_back(parse_real(key, trim(cell)));
        require(!out.empty(), "setting '" + key + "' must be a nonempty comma list");
        return out;
    }

    std::string choice(const std::string& key, const std::vector<std::string>& allowed) const {
        const std::string s = str(key);
        for (const auto& a : allowed)
            if (a == s) return s;
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        throw DomainError("setting '" + key + "' must be one of {" + list + "}, got '" + s + "'");
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

private:
    static double parse_real(const std::string& key, const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw DomainError("setting '" + key + "' must be a number, got '" + s + "'");
        }
        require(used == s.size() && std::isfinite(v), "setting '" + key + "' must be a finite number, got '" + s + "'");
        return v;
    }

    std::map<std::string, std::string> values_;
};

std::map<std::string, std::string> parse_config_file(const fs::path& file) {
    std::map<std::string, std::string> out;
    std::istringstream in(read_text_file(file));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = Settings::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos,
                "config " + file.string() + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = Settings::trim(line.substr(0, eq));
        require(!key.empty(), "config " + file.string() + ":" + std::to_string(line_no) + ": empty key");
        out[key] = Settings::trim(line.substr(eq + 1));
    }
    return out;
}

struct RunContext {
    std::string subcommand;
    fs::path out_dir;
    bool json_stdout = false;
    bool strict = false;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
    Json report;                 // printed with --json
    bool strict_failure = false;

    void emit(const std::string& name, const std::string& contents) {
        write_file_atomic(out_dir / name, contents);
        outputs.push_back(name);
    }
};

std::vector<double> point_of(const Settings& s, const std::string& key, std::size_t dim) {
    auto v = s.reals(key);
    if (v.size() == 1 && dim > 1) v.assign(dim, v[0]);
    require(v.size() == dim, "setting '" + key + "' must have " + std::to_string(dim) + " entries");
    return v;
}

ModelSpec model_of(const Settings& s, RunContext& ctx) {
    const std::string family = s.choice("model.family", {"linear", "tanh"});
    const std::size_t dim = s.count("model.dim", 1);
    if (family == "linear") {
        if (s.real("model.params.s1") != 0.25 || s.real("model.params.s2") != 0.25)
            ctx.warnings.push_back("model.params.s1 and model.params.s2 are ignored by the linear family");
        return linear_model(LinearModelParams{dim, s.real("model.params.a"), s.real("model.params.c"),
                                              s.real("model.params.b0"), s.real("model.params.s0")});
    }
    return tanh_model(TanhModelParams{dim, s.real("model.params.a"), s.real("model.params.c"), s.real("model.params.b0"),
                                      s.real("model.params.s0"), s.real("model.params.s1"), s.real("model.params.s2")});
}

TimeGrid grid_of(const Settings& s) { return TimeGrid(s.real("grid.t_end", 0.0), s.count("grid.n", 1)); }

FbmSamplerConfig sampler_of(const Settings& s) {
    FbmSamplerConfig cfg;
    cfg.hurst = s.real("hurst");
    cfg.seed = static_cast<std::uint64_t>(s.count("seed"));
    return cfg;
}

Json to_json(const ExponentSet& e) {
    return Json{{"hurst", e.hurst}, {"alpha", e.alpha}, {"beta", e.beta}, {"beta1", e.beta1}};
}

Json to_json(const FixpointReport& r) {
    Json windows = Json::array();
    for (const auto& w : r.windows) {
        Json jw{{"first", w.first},         {"last", w.last},           {"iterations", w.iterations},
                {"rejected_attempts", w.rejected_attempts}, {"distances", w.distances}, {"ratios", w.ratios},
                {"converged", w.converged}};
        if (w.delta) jw["delta"] = *w.delta;
        windows.push_back(jw);
    }
    return Json{{"iterations", r.iterations},
                {"distances", r.distances},
                {"ratios", r.ratios},
                {"window_lengths", r.window_lengths},
                {"windows", windows},
                {"final_residual", r.final_residual},
                {"converged", r.converged},
                {"metric", r.metric},
                {"exponents", to_json(r.exponents)},
                {"warnings", r.warnings}};
}

Json to_json(const DeviationEstimate& e) {
    Json pts = Json::array();
    for (const auto& p : e.points) {
        Json jp{{"eps", p.eps},     {"delta", p.delta}, {"zeta", p.zeta},   {"count", p.count}, {"n", p.n},
                {"p_hat", p.p_hat}, {"lower", p.lower}, {"upper", p.upper}, {"degenerate", p.degenerate}};
        jp["transformed"] = p.transformed ? Json(*p.transformed) : Json(nullptr);
        pts.push_back(jp);
    }
    Json out{{"mode", e.mode == DeviationMode::ldp ? "ldp" : "mdp"}, {"hurst", e.hurst}};
    out["zeta_exponent"] = e.zeta_exponent ? Json(*e.zeta_exponent) : Json(nullptr);
    out["points"] = pts;
    out["warnings"] = e.warnings;
    return out;
}

// ---------------------------------------------------------------- subcommands

void cmd_fbm(const Settings& s, RunContext& ctx) {
    const TimeGrid grid = grid_of(s);
    FbmSamplerConfig cfg = sampler_of(s);
    cfg.method = s.choice("method", {"circulant", "cholesky"}) == "circulant" ? FbmMethod::circulant : FbmMethod::cholesky;
    const auto sample = sample_fbm(grid, s.count("model.dim", 1), s.count("paths", 1), cfg);
    ctx.warnings.insert(ctx.warnings.end(), sample.warnings.begin(), sample.warnings.end());
    ctx.emit(s.str("out"), paths_to_csv(sample.paths));
    ctx.report = Json{{"paths", sample.paths.size()}, {"nodes", grid.n_nodes()}, {"hurst", cfg.hurst}};
}

void cmd_metric(const Settings& s, RunContext& ctx) {
    auto load = [](const std::string& file) {
        auto paths = paths_from_csv(read_text_file(file));
        const TimeGrid grid = paths.front().grid();
        const std::size_t dim = paths.front().dim();
        return EmpiricalMeasurePath(grid, dim, std::move(paths));
    };
    const auto mu = load(s.str("mu"));
    const auto nu = load(s.str("nu"));
    MetricOptions opt;
    opt.lex_tol = s.real("lex_tol", 0.0);
    opt.backend = s.choice("backend", {"assignment", "simplex"}) == "assignment" ? OtBackend::assignment : OtBackend::simplex;
    opt.thin_above = s.count("thin_above");
    const double beta = s.real("beta");
    const auto rep = holder_wasserstein(mu, nu, beta, opt);
    Json pairs = Json::array();
    for (const auto& p : rep.pairs) pairs.push_back(Json{{"s1", p.s1}, {"s2", p.s2}, {"w2", p.w2}, {"wc", p.wc}});
    ctx.report = Json{{"beta", beta},
                      {"w2_sup", rep.w2_sup},
                      {"wc_sup_ratio", rep.wc_sup_ratio},
                      {"combined", rep.combined},
                      {"mu_norm", measure_holder_norm(mu, beta, opt.thin_above)},
                      {"nu_norm", measure_holder_norm(nu, beta, opt.thin_above)},
                      {"pairs", pairs}};
    ctx.emit(s.str("out"), ctx.report.dump(2) + "\n");
}

void cmd_fixpoint(const Settings& s, RunContext& ctx) {
    const auto model = model_of(s, ctx);
    const TimeGrid grid = grid_of(s);
    FixpointOptions opt;
    opt.sampler = sampler_of(s);
    opt.n_particles = s.count("particles", 1);
    opt.max_iter = s.count("max_iter", 1);
    opt.tol = s.real("tol", 0.0);
    require(opt.tol > 0.0, "setting 'tol' must be positive");
    opt.window_policy = s.choice("window_policy", {"halving", "delta"}) == "halving" ? WindowPolicy::halving : WindowPolicy::delta;
    opt.exact_metric_limit = s.count("exact_limit");
    opt.thin_above = s.count("thin_above");
    if (s.has("eps0_prime")) opt.exponents = choose_exponents(opt.sampler.hurst, s.real("eps0_prime", 0.0));
    const InitialLaw x0{point_of(s, "x0", model.dim), s.real("x0_spread", 0.0)};
    const auto res = law_fixpoint(model, x0, grid, opt);
    ctx.warnings.insert(ctx.warnings.end(), res.report.warnings.begin(), res.report.warnings.end());
    ctx.emit(s.str("out"), paths_to_csv(res.law.trajectories()));
    ctx.report = to_json(res.report);
    ctx.emit(s.str("report"), ctx.report.dump(2) + "\n");
    if (!res.report.converged) ctx.strict_failure = true;
}

void cmd_particles(const Settings& s, RunContext& ctx) {
    const auto model = model_of(s, ctx);
    const TimeGrid grid = grid_of(s);
    const InitialLaw x0{point_of(s, "x0", model.dim), s.real("x0_spread", 0.0)};
    const auto law = particle_system(model, s.count("particles", 1), grid, sampler_of(s), x0);
    ctx.emit(s.str("out"), paths_to_csv(law.trajectories()));
    Json means = Json::array();
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) means.push_back(law.marginal_mean(k));
    ctx.report = Json{{"particles", law.size()}, {"nodes", grid.n_nodes()}, {"marginal_means", means}};
    ctx.emit(s.str("report"), ctx.report.dump(2) + "\n");
}

void cmd_deviation(const Settings& s, RunContext& ctx, DeviationMode mode) {
    const auto model = model_of(s, ctx);
    const TimeGrid grid = grid_of(s);
    DeviationOptions opt;
    opt.eps_list = s.reals("eps");
    opt.deltas = s.reals("delta");
    opt.n_samples = s.count("samples", 1);
    opt.mode = mode;
    opt.sampler = sampler_of(s);
    opt.max_iter = s.count("max_iter", 1);
    opt.tol = s.real("tol", 0.0);
    if (mode == DeviationMode::mdp && s.has("zeta_exponent")) opt.zeta_exponent = s.real("zeta_exponent");
    const auto est = mc_deviation_probability(model, point_of(s, "x0", model.dim), grid, opt);
    ctx.warnings.insert(ctx.warnings.end(), est.warnings.begin(), est.warnings.end());
    ctx.report = to_json(est);
    ctx.emit(s.str("out"), ctx.report.dump(2) + "\n");
}

void cmd_rate(const Settings& s, RunContext& ctx) {
    const auto model = model_of(s, ctx);
    const TimeGrid grid = grid_of(s);
    const double hurst = s.real("hurst");
    RateOptions opt;
    opt.initial_penalty = s.real("rate.initial_penalty", 0.0);
    opt.penalty_factor = s.real("rate.penalty_factor", 1.0);
    opt.stages = s.count("rate.stages", 1);
    opt.inner_tol = s.real("rate.inner_tol", 0.0);
    opt.residual_tol = s.real("rate.residual_tol", 0.0);
    const auto x0 = point_of(s, "x0", model.dim);
    const auto target = point_of(s, "target", model.dim);
    const auto r = rate_endpoint(model, x0, target, grid, hurst, opt);
    const auto skeleton = skeleton_ldp(model, x0, r.control);
    ctx.report = Json{{"value", r.value},
                      {"residual", r.residual},
                      {"converged", r.converged},
                      {"unreachable", r.unreachable},
                      {"inner_iterations", r.inner_iterations},
                      {"stage_residuals", r.stage_residuals},
                      {"target", target},
                      {"hurst", hurst}};
    ctx.emit(s.str("out"), ctx.report.dump(2) + "\n");
    ctx.emit(s.str("control_out"), stepped_to_csv(r.control.h()));
    ctx.emit(s.str("skeleton_out"), paths_to_csv({skeleton}));
    if (!r.converged) {
        ctx.warnings.push_back(r.unreachable ? "rate: target unreachable, the endpoint does not respond to the control"
                                             : "rate: optimizer did not reach the residual tolerance");
        ctx.strict_failure = true;
    }
}

void cmd_diagnose(const Settings& s, RunContext& ctx) {
    const auto model = model_of(s, ctx);
    const TimeGrid grid = grid_of(s);
    const double hurst = s.real("hurst");
    const auto exps = s.has("eps0_prime") ? choose_exponents(hurst, s.real("eps0_prime", 0.0)) : choose_exponents(hurst);
    const auto noise = sample_fbm(grid, model.dim, 1, sampler_of(s), "diagnose.noise");
    ctx.warnings.insert(ctx.warnings.end(), noise.warnings.begin(), noise.warnings.end());
    const double bh_beta1 = holder_seminorm(noise.paths[0], 0, grid.n_steps(), exps.beta1);
    const double bh_beta = holder_seminorm(noise.paths[0], 0, grid.n_steps(), exps.beta);
    const auto& k = model.constants;
    double x0_norm = 0.0;
    for (double v : point_of(s, "x0", model.dim)) x0_norm = std::max(x0_norm, std::abs(v));
    // Defaults: the leading noise term of the frozen solution's Hoelder norm.
    const double x_holder = s.has("diag.x_holder") ? s.real("diag.x_holder", 0.0) : k.sigma_sup * bh_beta;
    const double mu_norm = s.has("diag.mu_norm") ? s.real("diag.mu_norm", 0.0) : x0_norm + x_holder;
    const auto lambdas = lambda_constants(k, exps, LambdaInputs{x_holder, x_holder, mu_norm, mu_norm});
    const double horizon = grid.t_end();
    const double delta = contraction_step(lambdas, k.k_b, bh_beta1, exps, horizon);
    const double c = s.real("diag.C", 0.0);
    const double k_btilde = s.has("diag.k_btilde") ? s.real("diag.k_btilde", 0.0) : k.k_btilde;
    const double g = moment_bound_G(horizon, k_btilde, s.real("diag.k_sigmatilde", 0.0), bh_beta1, exps.beta,
                                    s.real("diag.gamma0", 0.0), c);
    ctx.report = Json{{"exponents", to_json(exps)},
                      {"noise_holder_beta", bh_beta},
                      {"noise_holder_beta1", bh_beta1},
                      {"x_holder", x_holder},
                      {"mu_norm", mu_norm},
                      {"lambdas", std::vector<double>(lambdas.begin(), lambdas.end())},
                      {"delta", delta},
                      {"delta_steps", std::floor(delta / grid.dt())},
                      {"moment_bound_G", g},
                      {"sup_bound", moment_sup_bound(horizon, x0_norm, g, exps.beta, c)},
                      {"constants",
                       Json{{"k_b", k.k_b}, {"b_zero", k.b_zero}, {"sigma_sup", k.sigma_sup}, {"grad_sigma", k.grad_sigma},
                            {"hess_sigma", k.hess_sigma}, {"dl_sigma", k.dl_sigma}, {"dl2_sigma", k.dl2_sigma}}}};
    ctx.emit(s.str("out"), ctx.report.dump(2) + "\n");
}

struct Subcommand {
    std::string name;
    std::string help;
    std::vector<KeySpec> keys;
    std::function<void(const Settings&, RunContext&)> body;
};

std::vector<Subcommand> subcommands() {
    const std::vector<KeySpec> solver_keys = {
        {"particles", "--particles", "512", "number of particles N"},
        {"x0_spread", "--x0-spread", "0.0", "standard deviation of a Gaussian initial law around x0"},
    };
    const std::vector<KeySpec> deviation_keys = {
        {"eps", "--eps", "0.5,0.4,0.3", "comma list of noise intensities eps in (0, 1]"},
        {"delta", "--delta", "0.1,0.2,0.3", "comma list of thresholds delta"},
        {"samples", "--samples", "1000", "Monte Carlo sample size"},
        {"tol", "--tol", "1e-3", "fixed-point tolerance"},
        {"max_iter", "--max-iter", "50", "fixed-point iteration cap"},
    };
    return {
        {"fbm", "sample fractional Brownian motion paths",
         concat({grid_keys("256"),
                 {{"model.dim", "--dim", "1", "dimension"},
                  {"paths", "--paths", "100", "number of paths"},
                  {"method", "--method", "circulant", "circulant | cholesky"},
                  {"out", "--out", "fbm_paths.csv", "paths CSV"}}}),
         cmd_fbm},
        {"metric", "Hoelder-Wasserstein distance between two path CSV files",
         {{"mu", "--mu", "", "first paths CSV"},
          {"nu", "--nu", "", "second paths CSV"},
          {"beta", "--beta", "0.7", "Hoelder exponent beta"},
          {"lex_tol", "--lex-tol", "1e-9", "optimal-face tolerance of the increment cost"},
          {"backend", "--backend", "assignment", "assignment | simplex"},
          {"thin_above", "--thin-above", "256", "dyadic pair thinning threshold"},
          {"out", "--out", "metric.json", "report JSON"}},
         cmd_metric},
        {"fixpoint", "law-freeze fixed-point iteration",
         concat({grid_keys("32"), model_keys(), solver_keys,
                 {{"tol", "--tol", "1e-3", "stopping tolerance in the Hoelder-Wasserstein metric"},
                  {"max_iter", "--max-iter", "50", "iteration cap per window"},
                  {"window_policy", "--window-policy", "halving", "halving | delta"},
                  {"exact_limit", "--exact-limit", "64", "largest N with exact optimal-transport distances"},
                  {"thin_above", "--thin-above", "64", "dyadic pair thinning threshold"},
                  {"eps0_prime", "--eps0-prime", "", "optional exponential moment exponent for exponent selection"},
                  {"out", "--out", "fixpoint_paths.csv", "paths CSV"},
                  {"report", "--report", "fixpoint_report.json", "report JSON"}}}),
         cmd_fixpoint},
        {"particles", "interacting particle system",
         concat({grid_keys("32"), model_keys(), solver_keys,
                 {{"out", "--out", "particles_paths.csv", "paths CSV"},
                  {"report", "--report", "particles_report.json", "summary JSON"}}}),
         cmd_particles},
        {"ldp", "Monte Carlo large-deviation probabilities",
         concat({grid_keys("64"), model_keys(), deviation_keys, {{"out", "--out", "ldp.json", "report JSON"}}}),
         [](const Settings& s, RunContext& c) { cmd_deviation(s, c, DeviationMode::ldp); }},
        {"mdp", "Monte Carlo moderate-deviation probabilities",
         concat({grid_keys("64"), model_keys(), deviation_keys,
                 {{"zeta_exponent", "--zeta-exponent", "", "zeta(eps) = eps^e, default e = -H/2"},
                  {"out", "--out", "mdp.json", "report JSON"}}}),
         [](const Settings& s, RunContext& c) { cmd_deviation(s, c, DeviationMode::mdp); }},
        {"rate", "endpoint rate function by penalty continuation",
         concat({grid_keys("64"), model_keys(),
                 {{"target", "--target", "1.0", "endpoint target y"},
                  {"rate.initial_penalty", "--initial-penalty", "10", "first penalty weight"},
                  {"rate.penalty_factor", "--penalty-factor", "10", "penalty growth per stage"},
                  {"rate.stages", "--stages", "6", "number of penalty stages"},
                  {"rate.inner_tol", "--inner-tol", "1e-8", "BFGS gradient tolerance"},
                  {"rate.residual_tol", "--residual-tol", "1e-4", "endpoint residual tolerance"},
                  {"out", "--out", "rate.json", "report JSON"},
                  {"control_out", "--control-out", "rate_control.csv", "argmin control CSV"},
                  {"skeleton_out", "--skeleton-out", "rate_skeleton.csv", "skeleton path CSV"}}}),
         cmd_rate},
        {"diagnose", "Lambda / Delta / G diagnostics on one sampled noise path",
         concat({grid_keys("64"), model_keys(),
                 {{"eps0_prime", "--eps0-prime", "", "optional exponential moment exponent"},
                  {"diag.x_holder", "--x-holder", "", "Hoelder seminorm of the solutions (default sigma_sup ||B||_beta)"},
                  {"diag.mu_norm", "--mu-norm", "", "measure norm (default |x0| + x_holder)"},
                  {"diag.C", "--moment-c", "1.0", "generic constant of the moment bound"},
                  {"diag.gamma0", "--gamma0", "0.5", "exponent gamma0 of the moment bound"},
                  {"diag.k_btilde", "--k-btilde", "", "drift growth constant (default from the model)"},
                  {"diag.k_sigmatilde", "--k-sigmatilde", "0.0", "diffusion growth constant"},
                  {"out", "--out", "diagnose.json", "report JSON"}}}),
         cmd_diagnose},
    };
}

Json manifest_json(const RunContext& ctx, const Settings& s, double wall) {
    Json config = Json::object();
    for (const auto& [k, v] : s.values()) config[k] = v;
    return Json{{"subcommand", ctx.subcommand},
                {"artifact_version", kArtifactVersion},
                {"rng_algorithm", std::string(RandomStream::algorithm_name)},
                {"config", config},
                {"outputs", ctx.outputs},
                {"wall_time_seconds", wall},
                {"warnings", ctx.warnings}};
}

}  // namespace

int run(const std::vector<std::string>& argv) {
    const auto start = std::chrono::steady_clock::now();
    const auto subs = subcommands();
    CLI::App app{"fracmv: McKean-Vlasov equations driven by fractional Brownian motion"};
    app.require_subcommand(1);
    std::string config_file;
    bool json_stdout = false;
    std::map<std::string, std::map<std::string, std::string>> flag_values;
    std::map<std::string, std::map<std::string, CLI::Option*>> flag_options;
    std::map<std::string, bool> strict_flag;
    for (const auto& sub : subs) {
        auto* cmd = app.add_subcommand(sub.name, sub.help);
        cmd->add_option("--config", config_file, "flat key = value config file");
        cmd->add_flag("--json", json_stdout, "print the report JSON on stdout");
        auto& values = flag_values[sub.name];
        auto& options = flag_options[sub.name];
        for (const auto& k : concat({global_keys(), sub.keys})) {
            if (k.key == "strict") {
                options[k.key] = cmd->add_flag("--strict", strict_flag[sub.name], k.help);
                continue;
            }
            const std::string help = k.default_value.empty() ? k.help : k.help + " [" + k.default_value + "]";
            options[k.key] = cmd->add_option(k.flag, values[k.key], help);
        }
    }

    std::vector<const char*> raw{"fracmv"};
    for (const auto& a : argv) raw.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, std::cerr, std::cerr);
        return code == 0 ? 0 : 1;
    }

    const Subcommand* chosen = nullptr;
    for (const auto& sub : subs)
        if (app.got_subcommand(sub.name)) chosen = &sub;

    RunContext ctx;
    ctx.subcommand = chosen->name;
    ctx.json_stdout = json_stdout;
    try {
        const auto keys = concat({global_keys(), chosen->keys});
        std::map<std::string, std::string> resolved;
        for (const auto& k : keys) resolved[k.key] = k.default_value;
        if (!config_file.empty()) {
            for (const auto& [key, value] : parse_config_file(config_file)) {
                require(resolved.count(key) > 0, "unknown config key '" + key + "' for subcommand " + chosen->name);
                resolved[key] = value;
            }
        }
        if (const char* env = std::getenv("FRACMV_THREADS"); env != nullptr && *env != '\0') resolved["threads"] = env;
        for (const auto& [key, opt] : flag_options[chosen->name]) {
            if (opt->count() == 0) continue;
            resolved[key] = key == "strict" ? (strict_flag[chosen->name] ? "true" : "false") : flag_values[chosen->name][key];
        }
        const Settings settings(resolved);
        set_max_threads(static_cast<unsigned>(settings.count("threads", 1)));
        ctx.out_dir = settings.str("out_dir");
        ctx.strict = settings.flag("strict");
        static_cast<void>(settings.count("seed"));

        chosen->body(settings, ctx);

        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const std::string primary = ctx.outputs.empty() ? chosen->name : ctx.outputs.front();
        write_file_atomic(ctx.out_dir / (primary + ".manifest.json"), manifest_json(ctx, settings, wall).dump(2) + "\n");
        if (ctx.json_stdout) std::cout << ctx.report.dump(2) << "\n";
        for (const auto& w : ctx.warnings) std::cerr << "warning: " << w << "\n";
        if (ctx.strict && ctx.strict_failure) {
            std::cerr << "error: " << chosen->name << " did not converge (--strict)\n";
            return 2;
        }
        return 0;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace fracmv::cli
