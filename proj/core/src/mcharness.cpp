#include "lsw/mcharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "lsw/asymptotics.hpp"
#include "lsw/error.hpp"
#include "lsw/simulator.hpp"

namespace lsw {

BlockPlan nearest_plan(int T, int N, int S, std::vector<std::string>* notes)
{
    BlockPlan plan = find_nearest_plan(T, N, S);
    if (notes && (plan.N != N || plan.S != S))
        notes->push_back("plan N=" + std::to_string(N) + " S=" + std::to_string(S) + " replaced by N="
                         + std::to_string(plan.N) + " S=" + std::to_string(plan.S) + " (M=" + std::to_string(plan.M)
                         + ")");
    return plan;
}

void parallel_for(int count, int workers, const std::function<void(int)>& body)
{
    if (count <= 0)
        return;
    workers = std::clamp(workers, 1, count);
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(run);
    }
    if (error)
        std::rethrow_exception(error);
}

namespace {

std::vector<double> theoretical_sd(const ModelSpec& model, const ParamVector& theta, int T)
{
    try {
        const GammaMatrix gamma = matches_closed_form(model, ClosedForm::sec4)
                                      ? gamma_closed(ClosedForm::sec4, model, theta)
                                      : gamma_quadrature(model, theta);
        return asymptotic_se(gamma, T).sd;
    } catch (const std::exception&) {
        return std::vector<double>(theta.size(), std::numeric_limits<double>::quiet_NaN());
    }
}

InnovationsState decompose(const ModelSpec& model, const ParamVector& theta, int T)
{
    const ConstraintReport report = validate_params(model, theta);
    if (!report.feasible)
        throw InfeasibleError("true parameters are infeasible\n" + report.describe());
    return innovations_decompose(CovKernel(model, theta, T));
}

} // namespace

MCTable run_mc(const MCConfig& config)
{
    if (config.reps < 1)
        throw ConfigError("replications must be at least 1");
    MCTable table;
    table.seed = config.seed;
    table.reps = config.reps;
    table.plan = nearest_plan(config.T, config.N, config.S, &table.notes);
    const InnovationsState state = decompose(config.model, config.theta, config.T);
    const Taper taper = taper_weights(config.taper, table.plan.N);

    const auto R = static_cast<std::size_t>(config.reps);
    table.estimates.assign(R, {});
    std::vector<char> ok(R, 0);
    parallel_for(config.reps, config.workers, [&](int i) {
        const SimConfig sim{config.T, config.seed, static_cast<std::uint64_t>(i) + 1};
        const std::vector<double> y = simulate_path(state, sim);
        const FitResult fit = estimate(y, config.model, table.plan, taper, config.fit);
        table.estimates[static_cast<std::size_t>(i)].assign(fit.theta.values().begin(), fit.theta.values().end());
        ok[static_cast<std::size_t>(i)] = fit.converged ? 1 : 0;
    });
    table.converged.assign(ok.begin(), ok.end());

    const std::vector<std::string> names = config.model.parameter_names();
    const std::vector<double> theo = theoretical_sd(config.model, config.theta, config.T);
    for (std::size_t p = 0; p < names.size(); ++p) {
        MCRow row;
        row.param = names[p];
        row.truth = config.theta[p];
        row.theo_sd = theo[p];
        row.n_total = config.reps;
        double sum = 0.0;
        for (std::size_t r = 0; r < R; ++r)
            if (ok[r]) {
                sum += table.estimates[r][p];
                ++row.n_converged;
            }
        const int n = row.n_converged;
        row.mean_est = n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
        double ss = 0.0;
        for (std::size_t r = 0; r < R; ++r)
            if (ok[r])
                ss += (table.estimates[r][p] - row.mean_est) * (table.estimates[r][p] - row.mean_est);
        row.emp_sd = n > 1 ? std::sqrt(ss / (n - 1)) : (n == 1 ? 0.0 : std::numeric_limits<double>::quiet_NaN());
        table.rows.push_back(row);
    }
    if (table.rows.front().n_converged < config.reps)
        table.notes.push_back(std::to_string(config.reps - table.rows.front().n_converged) + " of "
                              + std::to_string(config.reps) + " fits did not converge and were excluded");
    return table;
}

double mean_squared_error(const MCTable& table, const ParamVector& truth)
{
    double sum = 0.0;
    int n = 0;
    for (std::size_t r = 0; r < table.estimates.size(); ++r) {
        if (!table.converged[r])
            continue;
        for (std::size_t p = 0; p < truth.size(); ++p)
            sum += (table.estimates[r][p] - truth[p]) * (table.estimates[r][p] - truth[p]);
        ++n;
    }
    return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

MSEGrid mse_grid(const GridConfig& config)
{
    if (config.reps < 1)
        throw ConfigError("replications must be at least 1");
    std::vector<std::pair<int, int>> valid;
    for (int n : config.N.values())
        for (int s : config.S.values())
            if (plan_is_valid(config.T, n, s))
                valid.emplace_back(n, s);
    if (valid.empty())
        throw PlanError("no valid (N, S) cell in the grid for T = " + std::to_string(config.T));

    const InnovationsState state = decompose(config.model, config.theta, config.T);
    const auto R = static_cast<std::size_t>(config.reps);
    std::vector<std::vector<double>> paths(R);
    parallel_for(config.reps, config.workers, [&](int i) {
        paths[static_cast<std::size_t>(i)] =
            simulate_path(state, SimConfig{config.T, config.seed, static_cast<std::uint64_t>(i) + 1});
    });

    const std::size_t C = valid.size();
    std::vector<double> err(C * R, 0.0);
    std::vector<char> ok(C * R, 0);
    parallel_for(static_cast<int>(C * R), config.workers, [&](int job) {
        const auto c = static_cast<std::size_t>(job) / R;
        const auto r = static_cast<std::size_t>(job) % R;
        const BlockPlan plan = make_plan(config.T, valid[c].first, valid[c].second);
        const FitResult fit =
            estimate(paths[r], config.model, plan, taper_weights(config.taper, plan.N), config.fit);
        double e = 0.0;
        for (std::size_t p = 0; p < config.theta.size(); ++p)
            e += (fit.theta[p] - config.theta[p]) * (fit.theta[p] - config.theta[p]);
        err[static_cast<std::size_t>(job)] = e;
        ok[static_cast<std::size_t>(job)] = fit.converged ? 1 : 0;
    });

    MSEGrid grid;
    grid.seed = config.seed;
    grid.T = config.T;
    for (std::size_t c = 0; c < C; ++c) {
        GridCell cell;
        cell.N = valid[c].first;
        cell.S = valid[c].second;
        cell.M = (config.T - cell.N) / cell.S + 1;
        double sum = 0.0;
        for (std::size_t r = 0; r < R; ++r)
            if (ok[c * R + r]) {
                sum += err[c * R + r];
                ++cell.reps;
            }
        cell.mse = cell.reps > 0 ? sum / cell.reps : std::numeric_limits<double>::quiet_NaN();
        grid.cells.push_back(cell);
    }
    return grid;
}

namespace {

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    writer(out);
}

} // namespace

void write_mc_csv(std::ostream& out, const MCTable& table)
{
    out << "param,true,mean_est,emp_sd,theo_sd,n_converged,n_total\n";
    for (const MCRow& r : table.rows)
        out << r.param << ',' << num(r.truth) << ',' << num(r.mean_est) << ',' << num(r.emp_sd) << ','
            << num(r.theo_sd) << ',' << r.n_converged << ',' << r.n_total << '\n';
}

void write_mc_csv(const std::filesystem::path& path, const MCTable& table)
{
    write_file(path, [&](std::ostream& out) { write_mc_csv(out, table); });
}

void write_grid_csv(std::ostream& out, const MSEGrid& grid)
{
    out << "N,S,M,mse,reps\n";
    for (const GridCell& c : grid.cells)
        out << c.N << ',' << c.S << ',' << c.M << ',' << num(c.mse) << ',' << c.reps << '\n';
}

void write_grid_csv(const std::filesystem::path& path, const MSEGrid& grid)
{
    write_file(path, [&](std::ostream& out) { write_grid_csv(out, grid); });
}

} // namespace lsw
