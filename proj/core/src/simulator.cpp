#include "lsw/simulator.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "lsw/error.hpp"
#include "lsw/numerics.hpp"
#include "lsw/rng.hpp"

namespace lsw {
namespace {

/// Constant MA coefficient of a simulable model; throws for anything else.
double simulable_ma(const ModelSpec& model, const ParamVector& theta)
{
    if (model.ar)
        throw InfeasibleError("simulation supports no AR part (closed-form kernel covers ARFIMA(0, d, 1) only)");
    if (!model.ma)
        return 0.0;
    const CurveSpec& ma = *model.ma;
    const bool constant = ma.basis.kind() == BasisSpec::Kind::polynomial && ma.basis.size() == 1
                          && ma.basis.powers()[0] == 0;
    if (!constant)
        throw InfeasibleError("simulation requires a constant MA coefficient");
    return eval_curve(ma, curve_coeffs(model, theta, Component::ma), 0.0);
}

void check_memory(double d, int index)
{
    if (!(d > 0.0 && d < 0.5))
        throw InfeasibleError("d(u) = " + std::to_string(d) + " at t = " + std::to_string(index)
                              + " outside (0, 1/2)");
}

/// Closed-form kernel for lag k = s - t >= 0 given the curve values at s and t.
/// The log-gamma terms of d_s alone are passed in precomputed.
double kernel_value(int k, double d_s, double d_t, double sig_s, double sig_t, double ma, double lg_d_s,
                    double lg_1md_s)
{
    const double log_ratio = log_gamma(1.0 - d_s - d_t) + log_gamma(k + d_s) - lg_1md_s - lg_d_s
                             - log_gamma(k + 1.0 - d_t);
    double bracket = 1.0 + ma * ma;
    if (ma != 0.0) {
        bracket -= ma * (k - d_t) / (k - 1.0 + d_s);
        bracket -= ma * (k + d_s) / (k + 1.0 - d_t);
    }
    return sig_s * sig_t * std::exp(log_ratio) * bracket;
}

} // namespace

void throw_not_positive_definite(int index, double value)
{
    throw NotPositiveDefinite("covariance kernel is not positive definite: prediction variance v_"
                              + std::to_string(index) + " = " + std::to_string(value));
}

double covariance(const ModelSpec& model, const ParamVector& theta, int s, int t, int T)
{
    if (T < 1 || t < 1 || s > T)
        throw DimensionError("covariance: indices must satisfy 1 <= t <= s <= T");
    if (s < t)
        throw DimensionError("covariance: expected s >= t");
    const double ma = simulable_ma(model, theta);
    const LocalParams ps = local_params(model, theta, static_cast<double>(s) / T);
    const LocalParams pt = local_params(model, theta, static_cast<double>(t) / T);
    check_memory(ps.d, s);
    check_memory(pt.d, t);
    return kernel_value(s - t, ps.d, pt.d, ps.sigma, pt.sigma, ma, log_gamma(ps.d), log_gamma(1.0 - ps.d));
}

CovKernel::CovKernel(const ModelSpec& model, const ParamVector& theta, int T)
    : T_(T), ma_(simulable_ma(model, theta))
{
    if (T < 1)
        throw DimensionError("CovKernel: T must be positive");
    const auto n = static_cast<std::size_t>(T);
    d_.resize(n);
    sigma_.resize(n);
    log_gamma_d_.resize(n);
    log_gamma_1md_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const LocalParams p = local_params(model, theta, static_cast<double>(i + 1) / T);
        check_memory(p.d, static_cast<int>(i) + 1);
        d_[i] = p.d;
        sigma_[i] = p.sigma;
        log_gamma_d_[i] = log_gamma(p.d);
        log_gamma_1md_[i] = log_gamma(1.0 - p.d);
    }
}

double CovKernel::operator()(int s, int t) const
{
    if (s < t)
        std::swap(s, t);
    const auto is = static_cast<std::size_t>(s - 1);
    const auto it = static_cast<std::size_t>(t - 1);
    return kernel_value(s - t, d_[is], d_[it], sigma_[is], sigma_[it], ma_, log_gamma_d_[is], log_gamma_1md_[is]);
}

InnovationsState innovations_decompose(const CovKernel& kernel)
{
    return innovations_decompose(kernel, kernel.size());
}

std::vector<double> simulate_path(const InnovationsState& state, const SimConfig& config)
{
    if (config.T != state.size())
        throw DimensionError("simulate_path: config T = " + std::to_string(config.T)
                             + " does not match decomposition size " + std::to_string(state.size()));
    NormalStream rng(config.seed, config.replication);
    const auto n_obs = static_cast<std::size_t>(config.T);
    std::vector<double> innovation(n_obs);
    std::vector<double> path(n_obs);
    for (std::size_t n = 0; n < n_obs; ++n) {
        innovation[n] = std::sqrt(state.variances()[n]) * rng.normal();
        const auto row = state.row(static_cast<int>(n));
        double prediction = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            prediction += row[k] * innovation[k];
        path[n] = prediction + innovation[n];
    }
    return path;
}

std::vector<double> simulate_path(const ModelSpec& model, const ParamVector& theta, const SimConfig& config)
{
    if (config.T < 2)
        throw DimensionError("simulate_path: T must be at least 2");
    const ConstraintReport report = validate_params(model, theta);
    if (!report.feasible)
        throw InfeasibleError("infeasible parameters (need 0 < d(u) < 1/2, sigma(u) > 0, |MA(u)| < 1):\n"
                              + report.describe());
    const CovKernel kernel(model, theta, config.T);
    return simulate_path(innovations_decompose(kernel), config);
}

void write_series_csv(std::ostream& out, std::span<const double> series)
{
    out << "t,value\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", series[i]);
        out << i + 1 << ',' << buf << '\n';
    }
}

void write_series_csv(const std::filesystem::path& path, std::span<const double> series)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    write_series_csv(out, series);
}

std::vector<double> read_series_csv(std::istream& in)
{
    std::vector<double> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (lineno == 1 && (line == "t,value" || line == "value"))
            continue;
        const auto comma = line.rfind(',');
        const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
        double v = 0.0;
        const char* first = cell.data();
        const char* last = cell.data() + cell.size();
        while (first != last && *first == ' ')
            ++first;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || !std::isfinite(v))
            throw ConfigError("series CSV row " + std::to_string(lineno) + ": non-numeric value '" + cell + "'");
        values.push_back(v);
    }
    return values;
}

std::vector<double> read_series_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open series file '" + path.string() + "'");
    return read_series_csv(in);
}

} // namespace lsw
