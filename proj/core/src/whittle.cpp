#include "lsw/whittle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>

#include "lsw/error.hpp"

namespace lsw {

WhittleObjective::WhittleObjective(LocalPeriodogram pgram, ModelSpec model, PenaltyConfig penalty)
    : pgram_(std::move(pgram)), model_(std::move(model)), penalty_(penalty)
{
    const int N = pgram_.plan.N;
    const auto F = pgram_.frequencies.size();
    weights_.assign(F, 2.0 * (2.0 * std::numbers::pi / N));
    if (N % 2 == 0 && F > 0)
        weights_.back() = 2.0 * std::numbers::pi / N;
    freq_.reserve(F);
    for (double lambda : pgram_.frequencies)
        freq_.push_back(FrequencyTerms::at(lambda));

    const int G = std::max(penalty_.grid_size, 2);
    const auto slots = model_.slots();
    for (Component c : {Component::d, Component::sigma, Component::ar, Component::ma}) {
        const CurveSpec* cs = model_.curve(c);
        if (!cs)
            continue;
        CurveCache cache;
        cache.spec = cs;
        cache.component = c;
        cache.fixed = cs->fixed_coeffs;
        for (const Slot& s : slots)
            if (s.component == c)
                cache.offset = s.offset;
        const std::size_t p = cs->basis.size();
        cache.at_blocks.resize(pgram_.plan.u.size() * p);
        for (std::size_t j = 0; j < pgram_.plan.u.size(); ++j)
            cs->basis.values(pgram_.plan.u[j], std::span<double>(cache.at_blocks).subspan(j * p, p));
        cache.at_grid.resize(static_cast<std::size_t>(G) * p);
        for (int i = 0; i < G; ++i)
            cs->basis.values(static_cast<double>(i) / (G - 1),
                             std::span<double>(cache.at_grid).subspan(static_cast<std::size_t>(i) * p, p));
        curves_.push_back(std::move(cache));
    }
}

double WhittleObjective::curve_at(const CurveCache& c, std::span<const double> theta, const std::vector<double>& table,
                                  std::size_t point) const
{
    const std::size_t p = c.spec->basis.size();
    const double* coeffs = c.fixed.empty() ? theta.data() + c.offset : c.fixed.data();
    const double* g = table.data() + point * p;
    double eta = 0.0;
    for (std::size_t j = 0; j < p; ++j)
        eta += coeffs[j] * g[j];
    return link_inverse(c.spec->link, eta);
}

double WhittleObjective::raw_value(std::span<const double> theta) const
{
    if (theta.size() != model_.dimension())
        throw DimensionError("whittle objective: parameter vector has " + std::to_string(theta.size())
                             + " entries, model expects " + std::to_string(model_.dimension()));
    const auto& b = penalty_.bounds;
    const double arma_cap = b.arma_max - penalty_.arma_margin;
    const auto M = static_cast<std::size_t>(pgram_.plan.M);
    double total = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        LocalParams p;
        for (const auto& c : curves_) {
            const double v = curve_at(c, theta, c.at_blocks, j);
            switch (c.component) {
            case Component::d: p.d = std::clamp(v, b.d_lo, b.d_hi); break;
            case Component::sigma: p.sigma = std::max(v, std::max(b.sigma_min, penalty_.sigma_floor)); break;
            case Component::ar: p.ar = std::clamp(v, -arma_cap, arma_cap); break;
            case Component::ma: p.ma = std::clamp(v, -arma_cap, arma_cap); break;
            }
        }
        double block = 0.0;
        for (std::size_t k = 0; k < freq_.size(); ++k) {
            const double log_f = log_spectral_density(p, freq_[k]);
            block += weights_[k] * (log_f + pgram_.ordinates(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))
                                                * std::exp(-log_f));
        }
        total += block;
    }
    return total / (4.0 * std::numbers::pi * static_cast<double>(M));
}

template <class Visit>
void WhittleObjective::excesses(std::span<const double> theta, Visit&& visit) const
{
    const auto& b = penalty_.bounds;
    const auto G = static_cast<std::size_t>(std::max(penalty_.grid_size, 2));
    for (const auto& c : curves_)
        for (std::size_t i = 0; i < G; ++i) {
            const double v = curve_at(c, theta, c.at_grid, i);
            switch (c.component) {
            case Component::d:
                visit(b.d_lo - v);
                visit(v - b.d_hi);
                break;
            case Component::sigma: visit(std::max(b.sigma_min, penalty_.sigma_floor) - v); break;
            case Component::ar:
            case Component::ma: visit(std::abs(v) - (b.arma_max - penalty_.arma_margin)); break;
            }
        }
}

double WhittleObjective::penalty(std::span<const double> theta) const
{
    double excess = 0.0;
    excesses(theta, [&excess](double amount) {
        if (amount > 0.0)
            excess += amount * amount;
    });
    return penalty_.weight * excess;
}

double WhittleObjective::max_violation(std::span<const double> theta) const
{
    double worst = 0.0;
    excesses(theta, [&worst](double amount) { worst = std::max(worst, amount); });
    return worst;
}

double WhittleObjective::operator()(std::span<const double> theta) const
{
    return raw_value(theta) + penalty(theta);
}

double whittle_loglik(const WhittleObjective& objective, const ParamVector& theta)
{
    return objective(theta);
}

namespace {

std::size_t intercept_index(const BasisSpec& basis)
{
    if (basis.kind() == BasisSpec::Kind::harmonic)
        return 0;
    for (std::size_t j = 0; j < basis.powers().size(); ++j)
        if (basis.powers()[j] == 0)
            return j;
    return 0;
}

} // namespace

std::vector<double> default_start(const ModelSpec& model, double scale)
{
    std::vector<double> x(model.dimension(), 0.0);
    for (const Slot& s : model.slots()) {
        const CurveSpec& cs = *model.curve(s.component);
        const std::size_t i = s.offset + intercept_index(cs.basis);
        const bool log_link = cs.link == LinkSpec::log;
        if (s.component == Component::d)
            x[i] = log_link ? std::log(0.1) : 0.1;
        else if (s.component == Component::sigma)
            x[i] = log_link ? std::log(scale) : scale;
    }
    return x;
}

std::vector<double> default_steps(const ModelSpec& model, double scale)
{
    std::vector<double> step(model.dimension(), 0.1);
    for (const Slot& s : model.slots()) {
        const CurveSpec& cs = *model.curve(s.component);
        for (std::size_t j = 0; j < s.size; ++j) {
            double& h = step[s.offset + j];
            if (s.component == Component::d)
                h = cs.link == LinkSpec::log ? 0.2 : 0.05;
            else if (s.component == Component::sigma)
                h = cs.link == LinkSpec::log ? 0.1 : 0.1 * scale;
        }
    }
    return step;
}

FitResult estimate_from_periodogram(const LocalPeriodogram& pgram, const ModelSpec& model, double scale,
                                    const FitOptions& options)
{
    if (!(scale > 0.0) || !std::isfinite(scale))
        scale = 1.0;
    const WhittleObjective objective(pgram, model, options.penalty);
    std::vector<double> x0 = options.start ? *options.start : default_start(model, scale);
    if (x0.size() != model.dimension())
        throw DimensionError("estimate: starting point has wrong dimension");

    NelderMeadOptions nm = options.optimizer;
    if (nm.initial_step.empty())
        nm.initial_step = default_steps(model, scale);
    const NelderMeadResult r = nelder_mead([&objective](std::span<const double> x) { return objective(x); },
                                           std::move(x0), nm);

    FitResult fit;
    fit.theta = ParamVector(model, r.x);
    fit.objective = r.value;
    fit.iterations = r.iterations;
    fit.evaluations = r.evaluations;
    fit.converged = r.converged && objective.max_violation(r.x) <= options.penalty.feasibility_tol;
    fit.plan = pgram.plan;
    return fit;
}

FitResult estimate(std::span<const double> data, const ModelSpec& model, const BlockPlan& plan, const Taper& taper,
                   const FitOptions& options)
{
    if (static_cast<int>(data.size()) != plan.T)
        throw DimensionError("estimate: data length " + std::to_string(data.size()) + " does not match plan T = "
                             + std::to_string(plan.T));
    double mean = 0.0;
    for (double y : data) {
        if (!std::isfinite(y))
            throw DimensionError("estimate: data contain non-finite values");
        mean += y;
    }
    mean /= static_cast<double>(data.size());
    double ss = 0.0;
    for (double y : data)
        ss += (y - mean) * (y - mean);
    const double sd = std::sqrt(ss / static_cast<double>(data.size() - 1));
    return estimate_from_periodogram(local_periodogram(data, plan, taper), model, sd, options);
}

void write_fit_report(std::ostream& out, const ModelSpec& model, const FitResult& fit)
{
    const auto names = model.parameter_names();
    char buf[64];
    out << "param,estimate\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", fit.theta[i]);
        out << names[i] << ',' << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.17g", fit.objective);
    out << '\n'
        << "converged=" << (fit.converged ? "true" : "false") << '\n'
        << "objective=" << buf << '\n'
        << "iterations=" << fit.iterations << '\n';
}

void write_fit_report(const std::filesystem::path& path, const ModelSpec& model, const FitResult& fit)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    write_fit_report(out, model, fit);
}

} // namespace lsw
