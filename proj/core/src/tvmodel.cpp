#include "lsw/tvmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lsw/error.hpp"
#include "lsw/numerics.hpp"

namespace lsw {

BasisSpec BasisSpec::polynomial(int degree)
{
    if (degree < 0)
        throw ConfigError("polynomial basis: degree must be >= 0");
    std::vector<int> powers(static_cast<std::size_t>(degree) + 1);
    for (int j = 0; j <= degree; ++j)
        powers[static_cast<std::size_t>(j)] = j;
    return monomials(std::move(powers));
}

BasisSpec BasisSpec::monomials(std::vector<int> powers)
{
    if (powers.empty())
        throw ConfigError("polynomial basis: no powers given");
    for (int p : powers)
        if (p < 0)
            throw ConfigError("polynomial basis: negative power");
    BasisSpec b;
    b.kind_ = Kind::polynomial;
    b.powers_ = std::move(powers);
    return b;
}

BasisSpec BasisSpec::harmonic(std::vector<double> frequencies)
{
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        const double wi = frequencies[i];
        if (!std::isfinite(wi) || wi == 0.0)
            throw ConfigError("harmonic basis: frequencies must be finite and nonzero");
        for (std::size_t j = 0; j < i; ++j)
            if (wi * wi == frequencies[j] * frequencies[j])
                throw ConfigError("harmonic basis: frequencies must have distinct squares");
    }
    BasisSpec b;
    b.kind_ = Kind::harmonic;
    b.frequencies_ = std::move(frequencies);
    return b;
}

std::size_t BasisSpec::size() const
{
    return kind_ == Kind::polynomial ? powers_.size() : frequencies_.size() + 1;
}

double BasisSpec::value(std::size_t j, double u) const
{
    if (kind_ == Kind::polynomial)
        return std::pow(u, powers_[j]);
    return j == 0 ? 1.0 : std::cos(frequencies_[j - 1] * u);
}

void BasisSpec::values(double u, std::span<double> out) const
{
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = value(j, u);
}

Eigen::VectorXd BasisSpec::values(double u) const
{
    Eigen::VectorXd g(static_cast<Eigen::Index>(size()));
    values(u, std::span<double>(g.data(), size()));
    return g;
}

Eigen::MatrixXd BasisSpec::gram() const
{
    const auto rule = gauss_legendre(64, 0.0, 1.0);
    const auto p = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const Eigen::VectorXd g = values(rule.nodes[q]);
        b.noalias() += rule.weights[q] * g * g.transpose();
    }
    return b;
}

void BasisSpec::check_gram() const
{
    const Eigen::MatrixXd b = gram();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 1e-12 * hi))
        throw ConfigError("basis Gram matrix is singular (duplicate or dependent basis functions)");
}

double link_inverse(LinkSpec link, double eta)
{
    return link == LinkSpec::identity ? eta : std::exp(eta);
}

double link_inverse_derivative(LinkSpec link, double eta)
{
    return link == LinkSpec::identity ? 1.0 : std::exp(eta);
}

namespace {

double linear_predictor(const BasisSpec& basis, std::span<const double> coeffs, double u)
{
    double eta = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
        eta += coeffs[j] * basis.value(j, u);
    return eta;
}

} // namespace

double eval_curve(const CurveSpec& curve, std::span<const double> coeffs, double u)
{
    if (coeffs.size() != curve.basis.size())
        throw DimensionError("eval_curve: " + std::to_string(coeffs.size()) + " coefficients for a basis of size "
                             + std::to_string(curve.basis.size()));
    if (!(u >= 0.0 && u <= 1.0))
        throw DimensionError("eval_curve: u must lie in [0, 1]");
    return link_inverse(curve.link, linear_predictor(curve.basis, coeffs, u));
}

const char* component_name(Component c)
{
    switch (c) {
    case Component::d: return "d";
    case Component::sigma: return "sigma";
    case Component::ar: return "ar";
    case Component::ma: return "ma";
    }
    return "?";
}

const CurveSpec* ModelSpec::curve(Component c) const
{
    switch (c) {
    case Component::d: return &d;
    case Component::sigma: return &sigma;
    case Component::ar: return ar ? &*ar : nullptr;
    case Component::ma: return ma ? &*ma : nullptr;
    }
    return nullptr;
}

std::vector<Slot> ModelSpec::slots() const
{
    std::vector<Slot> out;
    std::size_t offset = 0;
    for (Component c : {Component::d, Component::sigma, Component::ar, Component::ma}) {
        const CurveSpec* cs = curve(c);
        if (!cs || cs->is_fixed())
            continue;
        out.push_back({c, offset, cs->free_size()});
        offset += cs->free_size();
    }
    return out;
}

std::size_t ModelSpec::dimension() const
{
    std::size_t n = 0;
    for (const auto& s : slots())
        n += s.size;
    return n;
}

std::vector<std::string> ModelSpec::parameter_names() const
{
    std::vector<std::string> names;
    for (const auto& s : slots()) {
        const char* stem = "";
        switch (s.component) {
        case Component::d: stem = "alpha"; break;
        case Component::sigma: stem = "beta"; break;
        case Component::ar: stem = "phi"; break;
        case Component::ma: stem = "theta"; break;
        }
        for (std::size_t j = 0; j < s.size; ++j)
            names.push_back(stem + std::to_string(j));
    }
    return names;
}

void ModelSpec::validate() const
{
    for (Component c : {Component::d, Component::sigma, Component::ar, Component::ma}) {
        const CurveSpec* cs = curve(c);
        if (!cs)
            continue;
        if (cs->is_fixed() && cs->fixed_coeffs.size() != cs->basis.size())
            throw ConfigError(std::string(component_name(c)) + ": fixed coefficient count does not match basis size");
        try {
            cs->basis.check_gram();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(component_name(c)) + ": " + e.what());
        }
    }
}

ParamVector::ParamVector(const ModelSpec& model, std::vector<double> values)
    : values_(std::move(values)), slots_(model.slots())
{
    if (values_.size() != model.dimension())
        throw DimensionError("parameter vector has " + std::to_string(values_.size()) + " entries, model expects "
                             + std::to_string(model.dimension()));
    for (double v : values_)
        if (!std::isfinite(v))
            throw DimensionError("parameter vector has a non-finite entry");
}

std::span<const double> ParamVector::coeffs(Component c) const
{
    for (const auto& s : slots_)
        if (s.component == c)
            return std::span<const double>(values_).subspan(s.offset, s.size);
    return {};
}

ParamVector ParamVector::with_value(std::size_t i, double v) const
{
    ParamVector out = *this;
    out.values_.at(i) = v;
    return out;
}

std::span<const double> curve_coeffs(const ModelSpec& model, const ParamVector& theta, Component c)
{
    const CurveSpec* cs = model.curve(c);
    if (!cs)
        return {};
    if (cs->is_fixed())
        return cs->fixed_coeffs;
    return theta.coeffs(c);
}

LocalParams local_params(const ModelSpec& model, const ParamVector& theta, double u)
{
    LocalParams p;
    p.d = eval_curve(model.d, curve_coeffs(model, theta, Component::d), u);
    p.sigma = eval_curve(model.sigma, curve_coeffs(model, theta, Component::sigma), u);
    if (model.ar)
        p.ar = eval_curve(*model.ar, curve_coeffs(model, theta, Component::ar), u);
    if (model.ma)
        p.ma = eval_curve(*model.ma, curve_coeffs(model, theta, Component::ma), u);
    return p;
}

std::string ConstraintReport::describe(std::size_t max_lines) const
{
    std::ostringstream os;
    std::size_t n = 0;
    for (const auto& v : violations) {
        if (n++ == max_lines) {
            os << "... (" << violations.size() - max_lines << " more)\n";
            break;
        }
        os << component_name(v.component) << "(u=" << v.u << ") = " << v.value << " violates bound " << v.bound
           << '\n';
    }
    return os.str();
}

ConstraintReport validate_params(const ModelSpec& model, const ParamVector& theta, int grid_size,
                                 const ConstraintBounds& bounds)
{
    ConstraintReport report;
    if (grid_size < 2)
        grid_size = 2;
    for (int i = 0; i < grid_size; ++i) {
        const double u = static_cast<double>(i) / (grid_size - 1);
        const LocalParams p = local_params(model, theta, u);
        if (!(p.d > bounds.d_lo))
            report.violations.push_back({Component::d, u, p.d, bounds.d_lo});
        if (!(p.d < bounds.d_hi))
            report.violations.push_back({Component::d, u, p.d, bounds.d_hi});
        if (!(p.sigma > bounds.sigma_min))
            report.violations.push_back({Component::sigma, u, p.sigma, bounds.sigma_min});
        if (model.ar && !(std::abs(p.ar) < bounds.arma_max))
            report.violations.push_back({Component::ar, u, p.ar, bounds.arma_max});
        if (model.ma && !(std::abs(p.ma) < bounds.arma_max))
            report.violations.push_back({Component::ma, u, p.ma, bounds.arma_max});
    }
    report.feasible = report.violations.empty();
    return report;
}

FrequencyTerms FrequencyTerms::at(double lambda)
{
    const double s = 2.0 * std::sin(0.5 * std::abs(lambda));
    return {std::cos(lambda), std::log(s * s)};
}

double log_spectral_density(const LocalParams& p, const FrequencyTerms& freq)
{
    double value = std::log(p.sigma * p.sigma / (2.0 * std::numbers::pi)) - p.d * freq.log_fn;
    if (p.ma != 0.0)
        value += std::log(1.0 - 2.0 * p.ma * freq.cos_lambda + p.ma * p.ma);
    if (p.ar != 0.0)
        value -= std::log(1.0 + 2.0 * p.ar * freq.cos_lambda + p.ar * p.ar);
    return value;
}

namespace {

void check_frequency(double lambda)
{
    if (!(std::abs(lambda) <= std::numbers::pi) || lambda == 0.0)
        throw DimensionError("spectral density: lambda must lie in [-pi, pi] \\ {0}");
}

} // namespace

double spectral_density(const ModelSpec& model, const ParamVector& theta, double u, double lambda)
{
    check_frequency(lambda);
    return std::exp(log_spectral_density(local_params(model, theta, u), FrequencyTerms::at(lambda)));
}

Eigen::VectorXd log_spectral_gradient(const ModelSpec& model, const ParamVector& theta, double u, double lambda)
{
    check_frequency(lambda);
    const FrequencyTerms freq = FrequencyTerms::at(lambda);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(theta.size()));

    for (const Slot& slot : theta.slots()) {
        const CurveSpec& cs = *model.curve(slot.component);
        const auto coeffs = theta.coeffs(slot.component);
        const double eta = linear_predictor(cs.basis, coeffs, u);
        const double dcurve = link_inverse_derivative(cs.link, eta);

        switch (slot.component) {
        case Component::d:
            for (std::size_t j = 0; j < slot.size; ++j)
                grad[static_cast<Eigen::Index>(slot.offset + j)] = -dcurve * cs.basis.value(j, u) * freq.log_fn;
            break;
        case Component::sigma: {
            const double sigma = link_inverse(cs.link, eta);
            for (std::size_t j = 0; j < slot.size; ++j)
                grad[static_cast<Eigen::Index>(slot.offset + j)] = 2.0 * dcurve * cs.basis.value(j, u) / sigma;
            break;
        }
        case Component::ar:
        case Component::ma:
            for (std::size_t j = 0; j < slot.size; ++j) {
                const std::size_t i = slot.offset + j;
                const double h = 1e-6 * std::max(1.0, std::abs(theta[i]));
                const double up = log_spectral_density(local_params(model, theta.with_value(i, theta[i] + h), u), freq);
                const double dn = log_spectral_density(local_params(model, theta.with_value(i, theta[i] - h), u), freq);
                grad[static_cast<Eigen::Index>(i)] = (up - dn) / (2.0 * h);
            }
            break;
        }
    }
    return grad;
}

} // namespace lsw
