#include "lsw/asymptotics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "lsw/error.hpp"
#include "lsw/numerics.hpp"

namespace lsw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;

void require_positive_definite(const Eigen::MatrixXd& m, const char* what)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || !(lo > 1e-12 * hi))
        throw NotPositiveDefinite(std::string(what) + " is singular or not positive definite (eigenvalue range "
                                  + std::to_string(lo) + " .. " + std::to_string(hi) + ")");
}

bool is_consecutive_polynomial(const BasisSpec& b)
{
    if (b.kind() != BasisSpec::Kind::polynomial)
        return false;
    for (std::size_t j = 0; j < b.powers().size(); ++j)
        if (b.powers()[j] != static_cast<int>(j))
            return false;
    return true;
}

bool is_monomial(const BasisSpec& b, int power)
{
    return b.kind() == BasisSpec::Kind::polynomial && b.size() == 1 && b.powers()[0] == power;
}

bool is_free(const CurveSpec& c, LinkSpec link) { return !c.is_fixed() && c.link == link; }

/// 2 int_0^1 h_i h_j / sigma(u)^2 du for an identity-link sigma curve.
Eigen::MatrixXd sigma_block(const CurveSpec& curve, std::span<const double> coeffs)
{
    const auto q = static_cast<Eigen::Index>(curve.basis.size());
    Eigen::MatrixXd out(q, q);
    // Linear sigma(u) = a + b u has elementary antiderivatives.
    if (is_consecutive_polynomial(curve.basis) && q == 2 && std::abs(coeffs[1]) > 1e-2 * std::abs(coeffs[0])) {
        const double a = coeffs[0];
        const double b = coeffs[1];
        const double s1 = a + b;
        const double lr = std::log(s1 / a);
        const double i0 = 1.0 / (a * s1);
        const double i1 = (lr + a / s1 - 1.0) / (b * b);
        const double i2 = (b - 2.0 * a * lr + a - a * a / s1) / (b * b * b);
        out << 2.0 * i0, 2.0 * i1, 2.0 * i1, 2.0 * i2;
        return out;
    }
    if (is_consecutive_polynomial(curve.basis) && q == 1) {
        out(0, 0) = 2.0 / (coeffs[0] * coeffs[0]);
        return out;
    }
    out.setZero();
    const auto rule = gauss_legendre(96, 0.0, 1.0);
    for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
        const double u = rule.nodes[n];
        const double sigma = eval_curve(curve, coeffs, u);
        const Eigen::VectorXd h = curve.basis.values(u);
        out.noalias() += (2.0 * rule.weights[n] / (sigma * sigma)) * h * h.transpose();
    }
    return out;
}

double sinc(double x)
{
    return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

/// int_0^1 u^m exp(2 a u) du.
double exp_moment(int m, double a)
{
    if (std::abs(a) < 0.05) {
        double term = 1.0;
        double sum = 0.0;
        for (int n = 0; n < 30; ++n) {
            if (n > 0)
                term *= 2.0 * a / n;
            sum += term / (m + n + 1);
        }
        return sum;
    }
    const double e = std::exp(2.0 * a);
    switch (m) {
    case 0: return (e - 1.0) / (2.0 * a);
    case 1: return ((2.0 * a - 1.0) * e + 1.0) / (4.0 * a * a);
    default: return ((2.0 * a * a - 2.0 * a + 1.0) * e - 1.0) / (4.0 * a * a * a);
    }
}

/// int_0^1 u^2 / (1 - x u^2) du for |x| < 1.
double inverse_quadratic_moment(double x)
{
    if (std::abs(x) < 0.1) {
        double sum = 0.0;
        double xk = 1.0;
        for (int k = 0; k < 40; ++k) {
            sum += xk / (2 * k + 3);
            xk *= x;
        }
        return sum;
    }
    if (x > 0.0) {
        const double r = std::sqrt(x);
        return std::atanh(r) / (x * r) - 1.0 / x;
    }
    const double y = -x;
    const double r = std::sqrt(y);
    return 1.0 / y - std::atan(r) / (y * r);
}

/// -(1/p) int_0^1 u log(1 + p u) du for |p| < 1.
double log_moment(double p)
{
    if (std::abs(p) < 0.1) {
        double sum = 0.0;
        double pk = 1.0;
        for (int k = 1; k < 40; ++k) {
            sum -= ((k % 2) ? 1.0 : -1.0) * pk / (k * (k + 2.0));
            pk *= p;
        }
        return sum;
    }
    return ((0.5 - 1.0 / p) - (1.0 - 1.0 / (p * p)) * std::log1p(p)) / (2.0 * p);
}

/// log(1 - v) / v with its limit -1 at v = 0.
double log_ratio(double v)
{
    if (std::abs(v) < 1e-8)
        return -1.0 - 0.5 * v;
    return std::log1p(-v) / v;
}

/// Domain of the closed forms: the open model set, without the fitting margins.
bool in_domain(const ModelSpec& model, const ParamVector& theta)
{
    return validate_params(model, theta, 101, ConstraintBounds{0.0, 0.5, 0.0, 1.0}).feasible;
}

void require(bool ok, ClosedForm id, const std::string& what)
{
    if (!ok)
        throw InfeasibleError(std::string(closed_form_name(id)) + " closed form: " + what);
}

} // namespace

ClosedForm parse_closed_form(const std::string& id)
{
    if (id == "ex2" || id == "polynomial")
        return ClosedForm::polynomial;
    if (id == "ex3" || id == "exponential")
        return ClosedForm::exponential;
    if (id == "ex4" || id == "harmonic")
        return ClosedForm::harmonic;
    if (id == "ex5" || id == "arma11")
        return ClosedForm::arma11;
    if (id == "sec4")
        return ClosedForm::sec4;
    throw ConfigError("unknown closed-form example '" + id + "' (expected ex2, ex3, harmonic, ex5 or sec4)");
}

const char* closed_form_name(ClosedForm id)
{
    switch (id) {
    case ClosedForm::polynomial: return "polynomial";
    case ClosedForm::exponential: return "exponential";
    case ClosedForm::harmonic: return "harmonic";
    case ClosedForm::arma11: return "arma11";
    case ClosedForm::sec4: return "sec4";
    }
    return "?";
}

ModelSpec polynomial_model(int d_degree, int sigma_degree)
{
    ModelSpec m;
    m.d.basis = BasisSpec::polynomial(d_degree);
    m.sigma.basis = BasisSpec::polynomial(sigma_degree);
    return m;
}

ModelSpec exponential_model()
{
    ModelSpec m = polynomial_model(1, 1);
    m.d.link = LinkSpec::log;
    m.sigma.link = LinkSpec::log;
    return m;
}

ModelSpec harmonic_model(std::vector<double> d_freqs, std::vector<double> sigma_freqs)
{
    ModelSpec m;
    m.d.basis = BasisSpec::harmonic(std::move(d_freqs));
    m.sigma.basis = BasisSpec::harmonic(std::move(sigma_freqs));
    return m;
}

ModelSpec arma11_model()
{
    ModelSpec m;
    m.d.basis = BasisSpec::monomials({1});
    m.sigma.basis = BasisSpec::polynomial(0);
    m.sigma.fixed_coeffs = {1.0};
    m.ar = CurveSpec{BasisSpec::monomials({1}), LinkSpec::identity, {}};
    m.ma = CurveSpec{BasisSpec::monomials({1}), LinkSpec::identity, {}};
    return m;
}

ModelSpec sec4_model()
{
    ModelSpec m = polynomial_model(1, 1);
    m.ma = CurveSpec{BasisSpec::polynomial(0), LinkSpec::identity, {}};
    return m;
}

bool matches_closed_form(const ModelSpec& m, ClosedForm id)
{
    switch (id) {
    case ClosedForm::polynomial:
        return !m.ar && !m.ma && is_free(m.d, LinkSpec::identity) && is_free(m.sigma, LinkSpec::identity)
               && is_consecutive_polynomial(m.d.basis) && is_consecutive_polynomial(m.sigma.basis);
    case ClosedForm::exponential:
        return !m.ar && !m.ma && is_free(m.d, LinkSpec::log) && is_free(m.sigma, LinkSpec::log)
               && is_consecutive_polynomial(m.d.basis) && m.d.basis.size() == 2
               && is_consecutive_polynomial(m.sigma.basis) && m.sigma.basis.size() == 2;
    case ClosedForm::harmonic:
        return !m.ar && !m.ma && is_free(m.d, LinkSpec::identity) && is_free(m.sigma, LinkSpec::identity)
               && m.d.basis.kind() == BasisSpec::Kind::harmonic && m.sigma.basis.kind() == BasisSpec::Kind::harmonic;
    case ClosedForm::arma11:
        return m.ar && m.ma && is_free(m.d, LinkSpec::identity) && is_monomial(m.d.basis, 1) && m.sigma.is_fixed()
               && is_monomial(m.sigma.basis, 0) && m.sigma.link == LinkSpec::identity
               && m.sigma.fixed_coeffs[0] == 1.0 && is_free(*m.ar, LinkSpec::identity)
               && is_monomial(m.ar->basis, 1) && is_free(*m.ma, LinkSpec::identity) && is_monomial(m.ma->basis, 1);
    case ClosedForm::sec4:
        return !m.ar && m.ma && is_free(m.d, LinkSpec::identity) && is_free(m.sigma, LinkSpec::identity)
               && is_consecutive_polynomial(m.d.basis) && m.d.basis.size() == 2
               && is_consecutive_polynomial(m.sigma.basis) && m.sigma.basis.size() == 2
               && is_free(*m.ma, LinkSpec::identity) && is_monomial(m.ma->basis, 0);
    }
    return false;
}

GammaMatrix gamma_quadrature(const ModelSpec& model, const ParamVector& theta, const QuadratureOptions& options)
{
    if (options.nu < 2 || options.n_lambda < 2 || options.levels < 0)
        throw DimensionError("gamma_quadrature: invalid rule sizes");
    const ConstraintReport report = validate_params(model, theta, 101, options.bounds);
    if (!report.feasible)
        throw InfeasibleError("gamma_quadrature: infeasible parameters\n" + report.describe());

    QuadratureRule lambda_rule = graded_rule(options.n_lambda, kPi / 16.0, options.levels);
    for (int panel = 1; panel < 16; ++panel) {
        const auto r = gauss_legendre(options.n_lambda, panel * kPi / 16.0, (panel + 1) * kPi / 16.0);
        lambda_rule.nodes.insert(lambda_rule.nodes.end(), r.nodes.begin(), r.nodes.end());
        lambda_rule.weights.insert(lambda_rule.weights.end(), r.weights.begin(), r.weights.end());
    }
    const QuadratureRule u_rule = gauss_legendre(options.nu, 0.0, 1.0);

    const auto p = static_cast<Eigen::Index>(theta.size());
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t a = 0; a < u_rule.nodes.size(); ++a) {
        Eigen::MatrixXd inner = Eigen::MatrixXd::Zero(p, p);
        for (std::size_t b = 0; b < lambda_rule.nodes.size(); ++b) {
            const Eigen::VectorXd g = log_spectral_gradient(model, theta, u_rule.nodes[a], lambda_rule.nodes[b]);
            inner.selfadjointView<Eigen::Lower>().rankUpdate(g, lambda_rule.weights[b]);
        }
        gamma += u_rule.weights[a] * inner;
    }
    // Lower triangle only; lambda symmetry doubles the half-range integral.
    gamma = gamma.selfadjointView<Eigen::Lower>();
    gamma *= 2.0 / (4.0 * kPi);

    const auto slots = theta.slots();
    for (const Slot& sd : slots)
        for (const Slot& ss : slots)
            if (sd.component == Component::d && ss.component == Component::sigma) {
                const double cross = gamma.block(static_cast<Eigen::Index>(sd.offset), static_cast<Eigen::Index>(ss.offset),
                                                 static_cast<Eigen::Index>(sd.size), static_cast<Eigen::Index>(ss.size))
                                         .cwiseAbs()
                                         .maxCoeff();
                if (cross > 1e-8)
                    throw std::logic_error("gamma_quadrature: d-sigma cross block is " + std::to_string(cross)
                                           + ", expected zero");
            }

    require_positive_definite(gamma, "Fisher matrix");
    GammaMatrix out;
    out.matrix = std::move(gamma);
    out.provenance = GammaMatrix::Provenance::quadrature;
    out.source = "quadrature";
    out.theta.assign(theta.values().begin(), theta.values().end());
    out.names = model.parameter_names();
    return out;
}

GammaMatrix gamma_closed(ClosedForm id, const ModelSpec& model, const ParamVector& theta)
{
    if (!matches_closed_form(model, id))
        throw ConfigError(std::string("model does not have the structure of the ") + closed_form_name(id)
                          + " closed form");
    const auto n = static_cast<Eigen::Index>(theta.size());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);

    switch (id) {
    case ClosedForm::polynomial: {
        require(in_domain(model, theta), id, "need 0 < d(u) < 1/2 and sigma(u) > 0");
        const auto p = static_cast<Eigen::Index>(model.d.basis.size());
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < p; ++j)
                g(i, j) = kPi2 / (6.0 * static_cast<double>(i + j + 1));
        const auto q = static_cast<Eigen::Index>(model.sigma.basis.size());
        g.block(p, p, q, q) = sigma_block(model.sigma, theta.coeffs(Component::sigma));
        break;
    }
    case ClosedForm::exponential: {
        require(in_domain(model, theta), id, "need 0 < d(u) < 1/2");
        const double a0 = theta[0];
        const double a1 = theta[1];
        const double scale = kPi2 / 6.0 * std::exp(2.0 * a0);
        g(0, 0) = scale * exp_moment(0, a1);
        g(0, 1) = g(1, 0) = scale * exp_moment(1, a1);
        g(1, 1) = scale * exp_moment(2, a1);
        g(2, 2) = 2.0;
        g(2, 3) = g(3, 2) = 1.0;
        g(3, 3) = 2.0 / 3.0;
        break;
    }
    case ClosedForm::harmonic: {
        require(in_domain(model, theta), id, "need 0 < d(u) < 1/2 and sigma(u) > 0");
        std::vector<double> lam{0.0};
        lam.insert(lam.end(), model.d.basis.frequencies().begin(), model.d.basis.frequencies().end());
        const auto p = static_cast<Eigen::Index>(lam.size());
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < p; ++j) {
                const double li = lam[static_cast<std::size_t>(i)];
                const double lj = lam[static_cast<std::size_t>(j)];
                g(i, j) = kPi2 / 12.0 * (sinc(li - lj) + sinc(li + lj));
            }
        const auto q = static_cast<Eigen::Index>(model.sigma.basis.size());
        g.block(p, p, q, q) = sigma_block(model.sigma, theta.coeffs(Component::sigma));
        break;
    }
    case ClosedForm::arma11: {
        const double a = theta[0];
        const double b = theta[1];
        const double c = theta[2];
        require(a > 0.0 && a < 0.5, id, "need 0 < d slope < 1/2");
        require(std::abs(b) < 1.0 && std::abs(c) < 1.0, id, "need |AR slope|, |MA slope| < 1");
        g(0, 0) = kPi2 / 18.0;
        g(1, 1) = inverse_quadratic_moment(b * b);
        g(2, 2) = inverse_quadratic_moment(c * c);
        g(0, 1) = g(1, 0) = log_moment(b);
        g(0, 2) = g(2, 0) = log_moment(-c);
        g(1, 2) = g(2, 1) = inverse_quadratic_moment(-b * c);
        break;
    }
    case ClosedForm::sec4: {
        require(in_domain(model, theta), id, "need 0 < d(u) < 1/2, sigma(u) > 0, |vartheta| < 1");
        g(0, 0) = kPi2 / 6.0;
        g(0, 1) = g(1, 0) = kPi2 / 12.0;
        g(1, 1) = kPi2 / 18.0;
        g.block(2, 2, 2, 2) = sigma_block(model.sigma, theta.coeffs(Component::sigma));
        const double v = theta[4];
        g(0, 4) = g(4, 0) = log_ratio(v);
        g(1, 4) = g(4, 1) = 0.5 * log_ratio(v);
        g(4, 4) = 1.0 / (1.0 - v * v);
        break;
    }
    }

    GammaMatrix out;
    out.matrix = std::move(g);
    out.provenance = GammaMatrix::Provenance::closed_form;
    out.source = closed_form_name(id);
    out.theta.assign(theta.values().begin(), theta.values().end());
    out.names = model.parameter_names();
    return out;
}

SEReport asymptotic_se(const GammaMatrix& gamma, int T)
{
    if (T < 1)
        throw DimensionError("asymptotic_se: T must be positive");
    require_positive_definite(gamma.matrix, "Fisher matrix");
    const Eigen::LLT<Eigen::MatrixXd> llt(gamma.matrix);
    const auto n = gamma.matrix.rows();
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    SEReport report;
    report.names = gamma.names;
    report.T = T;
    report.provenance = gamma.provenance;
    for (Eigen::Index i = 0; i < n; ++i)
        report.sd.push_back(std::sqrt(inv(i, i) / T));
    return report;
}

std::vector<double> dhat_variance_profile(const Eigen::MatrixXd& gamma_alpha, const BasisSpec& basis,
                                          const std::vector<double>& u_grid)
{
    if (gamma_alpha.rows() != static_cast<Eigen::Index>(basis.size()))
        throw DimensionError("dhat_variance_profile: Gamma block size does not match the basis");
    require_positive_definite(gamma_alpha, "d-block of the Fisher matrix");
    const Eigen::LLT<Eigen::MatrixXd> llt(gamma_alpha);
    std::vector<double> out;
    out.reserve(u_grid.size());
    for (double u : u_grid) {
        const Eigen::VectorXd g = basis.values(u);
        out.push_back(g.dot(llt.solve(g)));
    }
    return out;
}

double average_variance_check(const BasisSpec& basis, const QuadratureOptions& options)
{
    const Eigen::MatrixXd gram = basis.gram();
    require_positive_definite(gram, "basis Gram matrix");

    ModelSpec model;
    model.d.basis = basis;
    model.sigma.basis = BasisSpec::polynomial(0);
    model.sigma.fixed_coeffs = {1.0};
    std::vector<double> coeffs(basis.size(), 0.0);
    std::size_t intercept = 0;
    if (basis.kind() == BasisSpec::Kind::polynomial)
        for (std::size_t j = 0; j < basis.size(); ++j)
            if (basis.powers()[j] == 0)
                intercept = j;
    coeffs[intercept] = 0.25;
    // The d-block does not depend on d itself; only the lambda integrand
    // must be finite, so d may touch zero where the basis vanishes.
    QuadratureOptions opts = options;
    opts.bounds.d_lo = -1.0;
    opts.bounds.d_hi = 0.5;
    const GammaMatrix gamma = gamma_quadrature(model, ParamVector(model, coeffs), opts);
    const Eigen::LLT<Eigen::MatrixXd> llt(gamma.matrix);
    return llt.solve(gram).trace();
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& names)
{
    out << "param";
    for (const auto& name : names)
        out << ',' << name;
    out << '\n';
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << names[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
}

void write_se_csv(std::ostream& out, const SEReport& se)
{
    out << "param,sd\n";
    char buf[64];
    for (std::size_t i = 0; i < se.sd.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", se.sd[i]);
        out << se.names[i] << ',' << buf << '\n';
    }
}

} // namespace lsw
