#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "lsw/asymptotics.hpp"
#include "lsw/config.hpp"
#include "lsw/error.hpp"
#include "lsw/mcharness.hpp"
#include "lsw/model_io.hpp"
#include "lsw/simulator.hpp"
#include "lsw/whittle.hpp"

namespace lsw::cli {

namespace {

const std::set<std::string>& run_keys()
{
    static const std::set<std::string> keys{"mc.reps", "mc.seed", "mc.T",      "plan.N",
                                            "plan.S",  "plan.taper", "grid.N", "grid.S"};
    return keys;
}

int default_threads()
{
    if (const char* env = std::getenv("LSW_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            return static_cast<int>(v);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct Options {
    std::string config;
    std::optional<int> t;
    std::optional<long long> seed;
    std::string out;
    std::optional<int> n;
    std::optional<int> s;
    std::optional<std::string> taper;
    bool auto_plan = false;
    std::optional<int> reps;
    int threads = 1;
    std::string example;
    std::optional<std::string> theta;
    std::string method;
    bool dump_config = false;
    std::string data;
    std::optional<std::string> grid_n;
    std::optional<std::string> grid_s;
};

/// Config file plus flag overrides, with unknown keys rejected.
KeyValueConfig effective_config(const Options& o)
{
    KeyValueConfig cfg;
    if (!o.config.empty())
        cfg = KeyValueConfig::load(o.config);
    auto known = model_keys();
    known.insert(run_keys().begin(), run_keys().end());
    const auto unknown = cfg.unknown_keys(known);
    if (!unknown.empty()) {
        std::string list;
        for (const auto& k : unknown)
            list += (list.empty() ? "" : ", ") + k;
        throw ConfigError("unknown key(s) in '" + o.config + "': " + list);
    }
    if (o.t)
        cfg.set("mc.T", std::to_string(*o.t));
    if (o.seed)
        cfg.set("mc.seed", std::to_string(*o.seed));
    if (o.n)
        cfg.set("plan.N", std::to_string(*o.n));
    if (o.s)
        cfg.set("plan.S", std::to_string(*o.s));
    if (o.taper)
        cfg.set("plan.taper", *o.taper);
    if (o.reps)
        cfg.set("mc.reps", std::to_string(*o.reps));
    if (o.grid_n)
        cfg.set("grid.N", *o.grid_n);
    if (o.grid_s)
        cfg.set("grid.S", *o.grid_s);
    return cfg;
}

/// Model from the config, with --theta replacing the coefficients.
ModelWithParams model_of(KeyValueConfig& cfg, const Options& o)
{
    ModelWithParams mp = parse_model(cfg);
    if (o.theta) {
        mp.theta = ParamVector(mp.model, parse_double_list(*o.theta, "--theta"));
        write_model(mp.model, mp.theta, cfg);
    }
    return mp;
}

Taper::Kind taper_kind(const KeyValueConfig& cfg)
{
    const std::string t = cfg.get_or("plan.taper", "cosine");
    if (t == "cosine")
        return Taper::Kind::cosine_bell;
    if (t == "uniform")
        return Taper::Kind::uniform;
    throw ConfigError("plan.taper: expected cosine or uniform, got '" + t + "'");
}

int require_int(const KeyValueConfig& cfg, const std::string& key, const char* flag)
{
    if (!cfg.has(key))
        throw ConfigError(std::string("missing ") + flag + " (or config key " + key + ")");
    return static_cast<int>(cfg.get_int(key));
}

std::uint64_t seed_of(const KeyValueConfig& cfg)
{
    const long long s = cfg.has("mc.seed") ? cfg.get_int("mc.seed") : 1;
    if (s < 0)
        throw ConfigError("mc.seed must be non-negative");
    return static_cast<std::uint64_t>(s);
}

/// Writes to --out when given, else to `out`.
template <class Writer>
void emit(const Options& o, std::ostream& out, Writer&& writer)
{
    if (o.out.empty()) {
        writer(out);
        return;
    }
    std::ofstream file(o.out);
    if (!file)
        throw ConfigError("cannot write '" + o.out + "'");
    writer(file);
}

bool dump(const Options& o, const KeyValueConfig& cfg, std::ostream& out)
{
    if (!o.dump_config)
        return false;
    emit(o, out, [&](std::ostream& os) { cfg.write(os); });
    return true;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream&)
{
    KeyValueConfig cfg = effective_config(o);
    const ModelWithParams mp = model_of(cfg, o);
    if (dump(o, cfg, out))
        return ok;
    const int T = require_int(cfg, "mc.T", "--t");
    if (T < 1)
        throw ConfigError("T must be positive");
    const auto y = simulate_path(mp.model, mp.theta, SimConfig{T, seed_of(cfg), 1});
    emit(o, out, [&](std::ostream& os) { write_series_csv(os, y); });
    return ok;
}

/// Closed-form Gamma when the model has one, else quadrature.
GammaMatrix fisher(const ModelSpec& model, const ParamVector& theta)
{
    for (ClosedForm id : {ClosedForm::sec4, ClosedForm::polynomial, ClosedForm::exponential, ClosedForm::harmonic,
                          ClosedForm::arma11})
        if (matches_closed_form(model, id))
            return gamma_closed(id, model, theta);
    return gamma_quadrature(model, theta);
}

int cmd_estimate(const Options& o, std::ostream& out, std::ostream& err)
{
    KeyValueConfig cfg = effective_config(o);
    const ModelWithParams mp = model_of(cfg, o);
    if (dump(o, cfg, out))
        return ok;
    if (o.data.empty())
        throw ConfigError("missing --data");
    const std::vector<double> y = read_series_csv(std::filesystem::path(o.data));
    const int T = static_cast<int>(y.size());
    const int N = require_int(cfg, "plan.N", "--n");
    const int S = require_int(cfg, "plan.S", "--s");
    BlockPlan plan;
    if (o.auto_plan) {
        std::vector<std::string> notes;
        plan = nearest_plan(T, N, S, &notes);
        for (const auto& n : notes)
            err << "note: " << n << '\n';
    } else {
        plan = make_plan(T, N, S);
    }
    const FitResult fit = estimate(y, mp.model, plan, taper_weights(taper_kind(cfg), plan.N));

    std::vector<double> se(fit.theta.size(), std::numeric_limits<double>::quiet_NaN());
    try {
        se = asymptotic_se(fisher(mp.model, fit.theta), T).sd;
    } catch (const std::exception& e) {
        err << "note: no theoretical SE at the estimate (" << e.what() << ")\n";
    }
    const auto names = mp.model.parameter_names();
    std::ostream& table = o.out.empty() ? err : out;
    table << "plan N=" << plan.N << " S=" << plan.S << " M=" << plan.M << (fit.converged ? "" : "  (not converged)")
          << '\n';
    for (std::size_t i = 0; i < names.size(); ++i)
        table << std::left << std::setw(10) << names[i] << std::right << std::setw(12) << std::fixed
              << std::setprecision(6) << fit.theta[i] << "  se " << std::setw(10) << se[i] << '\n';
    table.unsetf(std::ios::floatfield);
    if (o.out.empty())
        write_fit_report(out, mp.model, fit);
    else
        write_fit_report(std::filesystem::path(o.out), mp.model, fit);
    return ok;
}

int cmd_mc(const Options& o, std::ostream& out, std::ostream& err)
{
    KeyValueConfig cfg = effective_config(o);
    const ModelWithParams mp = model_of(cfg, o);
    if (dump(o, cfg, out))
        return ok;
    MCConfig mc;
    mc.model = mp.model;
    mc.theta = mp.theta;
    mc.T = require_int(cfg, "mc.T", "--t");
    mc.N = require_int(cfg, "plan.N", "--n");
    mc.S = require_int(cfg, "plan.S", "--s");
    mc.taper = taper_kind(cfg);
    mc.reps = cfg.has("mc.reps") ? static_cast<int>(cfg.get_int("mc.reps")) : 200;
    mc.seed = seed_of(cfg);
    mc.workers = o.threads;
    const MCTable table = run_mc(mc);
    for (const auto& n : table.notes)
        err << "note: " << n << '\n';
    emit(o, out, [&](std::ostream& os) { write_mc_csv(os, table); });
    return ok;
}

int cmd_grid(const Options& o, std::ostream& out, std::ostream&)
{
    KeyValueConfig cfg = effective_config(o);
    const ModelWithParams mp = model_of(cfg, o);
    if (dump(o, cfg, out))
        return ok;
    GridConfig g;
    g.model = mp.model;
    g.theta = mp.theta;
    g.T = require_int(cfg, "mc.T", "--t");
    if (!cfg.has("grid.N") || !cfg.has("grid.S"))
        throw ConfigError("missing --grid-n / --grid-s (or config keys grid.N, grid.S)");
    g.N = parse_range(cfg.get("grid.N"), "grid.N");
    g.S = parse_range(cfg.get("grid.S"), "grid.S");
    g.taper = taper_kind(cfg);
    g.reps = cfg.has("mc.reps") ? static_cast<int>(cfg.get_int("mc.reps")) : 100;
    g.seed = seed_of(cfg);
    g.workers = o.threads;
    const MSEGrid grid = mse_grid(g);
    emit(o, out, [&](std::ostream& os) { write_grid_csv(os, grid); });
    return ok;
}

ModelSpec example_model(ClosedForm id)
{
    switch (id) {
    case ClosedForm::polynomial: return polynomial_model(1, 1);
    case ClosedForm::exponential: return exponential_model();
    case ClosedForm::harmonic: return harmonic_model({3.141592653589793}, {3.141592653589793});
    case ClosedForm::arma11: return arma11_model();
    case ClosedForm::sec4: return sec4_model();
    }
    return {};
}

int cmd_gamma(const Options& o, std::ostream& out, std::ostream&)
{
    KeyValueConfig cfg = effective_config(o);
    ModelWithParams mp;
    std::optional<ClosedForm> id;
    if (!o.example.empty())
        id = parse_closed_form(o.example);
    if (!o.config.empty()) {
        mp = model_of(cfg, o);
    } else {
        if (!id)
            throw ConfigError("gamma needs --example or --config");
        if (!o.theta)
            throw ConfigError("gamma --example needs --theta");
        mp.model = example_model(*id);
        mp.theta = ParamVector(mp.model, parse_double_list(*o.theta, "--theta"));
        write_model(mp.model, mp.theta, cfg);
    }
    if (dump(o, cfg, out))
        return ok;
    const int T = require_int(cfg, "mc.T", "--t");

    const std::string method = o.method.empty() ? (id ? "closed" : "quadrature") : o.method;
    if ((method == "closed" || method == "both") && !id) {
        for (ClosedForm c : {ClosedForm::sec4, ClosedForm::polynomial, ClosedForm::exponential, ClosedForm::harmonic,
                             ClosedForm::arma11})
            if (matches_closed_form(mp.model, c)) {
                id = c;
                break;
            }
        if (!id)
            throw ConfigError("no closed form for this model; use --method quadrature");
    }
    QuadratureOptions qopt;
    if (id == ClosedForm::arma11)
        qopt.bounds.d_lo = -1e-12;

    std::vector<GammaMatrix> results;
    if (method == "closed" || method == "both")
        results.push_back(gamma_closed(*id, mp.model, mp.theta));
    if (method == "quadrature" || method == "both")
        results.push_back(gamma_quadrature(mp.model, mp.theta, qopt));

    emit(o, out, [&](std::ostream& os) {
        for (const GammaMatrix& g : results) {
            os << "# gamma " << (g.provenance == GammaMatrix::Provenance::closed_form ? "closed " + g.source
                                                                                        : std::string("quadrature"))
               << '\n';
            write_matrix_csv(os, g.matrix, g.names);
            os << "# se T=" << T << '\n';
            write_se_csv(os, asymptotic_se(g, T));
        }
        if (results.size() == 2) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3g", (results[0].matrix - results[1].matrix).cwiseAbs().maxCoeff());
            os << "# max |closed - quadrature| = " << buf << '\n';
        }
    });
    return ok;
}

void add_common(CLI::App* sub, Options& o)
{
    sub->add_option("--config", o.config, "Model and run configuration file (key=value)");
    sub->add_option("--out", o.out, "Output file (default: standard output)");
    sub->add_flag("--dump-config", o.dump_config, "Print the effective configuration and exit");
    sub->add_option("--theta", o.theta, "Comma separated parameter vector replacing the configured coefficients");
}

void add_plan(CLI::App* sub, Options& o)
{
    sub->add_option("--n", o.n, "Block length N (plan.N)");
    sub->add_option("--s", o.s, "Block shift S (plan.S)");
    sub->add_option("--taper", o.taper, "Data taper (plan.taper)")->check(CLI::IsMember({"cosine", "uniform"}));
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Time-varying ARFIMA simulation, Whittle estimation and Monte Carlo tools", "lsw"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lsw 0.1.0");
    Options o;
    o.threads = default_threads();

    auto* sim = app.add_subcommand("simulate", "Simulate one path and write `t,value` CSV");
    add_common(sim, o);
    sim->add_option("--t", o.t, "Series length T (mc.T)");
    sim->add_option("--seed", o.seed, "Random seed (mc.seed)");

    auto* est = app.add_subcommand("estimate", "Blockwise Whittle fit of a series CSV");
    add_common(est, o);
    add_plan(est, o);
    est->add_option("--data", o.data, "Series CSV to fit");
    est->add_flag("--auto-plan", o.auto_plan, "Replace an invalid (N, S) by the nearest valid plan");

    auto* mc = app.add_subcommand("mc", "Monte Carlo table: mean, empirical and theoretical SD");
    add_common(mc, o);
    add_plan(mc, o);
    mc->add_option("--t", o.t, "Series length T (mc.T)");
    mc->add_option("--seed", o.seed, "Base seed (mc.seed)");
    mc->add_option("--reps", o.reps, "Replications (mc.reps)");
    mc->add_option("--threads", o.threads, "Worker threads (default: LSW_THREADS or all cores)")
        ->check(CLI::PositiveNumber);

    auto* grid = app.add_subcommand("grid", "Empirical MSE over a grid of (N, S)");
    add_common(grid, o);
    grid->add_option("--taper", o.taper, "Data taper (plan.taper)")->check(CLI::IsMember({"cosine", "uniform"}));
    grid->add_option("--t", o.t, "Series length T (mc.T)");
    grid->add_option("--seed", o.seed, "Base seed (mc.seed)");
    grid->add_option("--reps", o.reps, "Replications per cell (mc.reps)");
    grid->add_option("--grid-n", o.grid_n, "Block lengths lo:hi[:step] (grid.N)");
    grid->add_option("--grid-s", o.grid_s, "Shifts lo:hi[:step] (grid.S)");
    grid->add_option("--threads", o.threads, "Worker threads (default: LSW_THREADS or all cores)")
        ->check(CLI::PositiveNumber);

    auto* gam = app.add_subcommand("gamma", "Fisher matrix and asymptotic standard errors");
    add_common(gam, o);
    gam->add_option("--example", o.example, "Closed-form family: ex2, ex3, harmonic, ex5, sec4");
    gam->add_option("--t", o.t, "Sample size T for the standard errors (mc.T)");
    gam->add_option("--method", o.method, "closed, quadrature or both")
        ->check(CLI::IsMember({"closed", "quadrature", "both"}));

    std::vector<const char*> argv{"lsw"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return config_error;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(o, out, err);
        if (est->parsed())
            return cmd_estimate(o, out, err);
        if (mc->parsed())
            return cmd_mc(o, out, err);
        if (grid->parsed())
            return cmd_grid(o, out, err);
        return cmd_gamma(o, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << '\n';
        return infeasible;
    } catch (const NotPositiveDefinite& e) {
        err << "error: " << e.what() << '\n';
        return infeasible;
    } catch (const PlanError& e) {
        err << "error: " << e.what() << '\n';
        return plan_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
}

} // namespace lsw::cli
