#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lsw {

/// Basis {g_j(u)} on u in [0, 1] for a time-varying coefficient curve.
///
/// Polynomial bases hold a list of powers, g_j(u) = u^{p_j}; the usual
/// degree-k basis is powers 0..k. Harmonic bases are g_0(u) = 1 and
/// g_j(u) = cos(w_j u) for known, nonzero frequencies with distinct squares.
class BasisSpec {
public:
    enum class Kind { polynomial, harmonic };

    static BasisSpec polynomial(int degree);
    static BasisSpec monomials(std::vector<int> powers);
    static BasisSpec harmonic(std::vector<double> frequencies);

    Kind kind() const { return kind_; }
    std::size_t size() const;
    double value(std::size_t j, double u) const;
    void values(double u, std::span<double> out) const;
    Eigen::VectorXd values(double u) const;

    const std::vector<int>& powers() const { return powers_; }
    const std::vector<double>& frequencies() const { return frequencies_; }

    /// B = [int_0^1 g_i g_j du] by Gauss-Legendre quadrature.
    Eigen::MatrixXd gram() const;

    /// Throws ConfigError when the Gram matrix is numerically singular.
    void check_gram() const;

    bool operator==(const BasisSpec&) const = default;

private:
    Kind kind_ = Kind::polynomial;
    std::vector<int> powers_;
    std::vector<double> frequencies_;
};

/// Link l with l[curve(u)] = sum_j c_j g_j(u).
enum class LinkSpec { identity, log };

double link_inverse(LinkSpec link, double eta);
/// d/d eta of the inverse link.
double link_inverse_derivative(LinkSpec link, double eta);

struct CurveSpec {
    BasisSpec basis = BasisSpec::polynomial(0);
    LinkSpec link = LinkSpec::identity;
    /// Non-empty marks the curve as known: these coefficients are used and the
    /// curve contributes no free parameters.
    std::vector<double> fixed_coeffs;

    bool is_fixed() const { return !fixed_coeffs.empty(); }
    std::size_t free_size() const { return is_fixed() ? 0 : basis.size(); }

    bool operator==(const CurveSpec&) const = default;
};

/// l^{-1}(sum_j coeffs_j g_j(u)). Throws DimensionError on a size mismatch
/// or u outside [0, 1].
double eval_curve(const CurveSpec& curve, std::span<const double> coeffs, double u);

enum class Component { d, sigma, ar, ma };
const char* component_name(Component c);

/// Coordinates [offset, offset + size) of theta belong to `component`.
struct Slot {
    Component component;
    std::size_t offset;
    std::size_t size;

    bool operator==(const Slot&) const = default;
};

/// Time-varying ARFIMA family
///   (1 + phi(u) B) Y = sigma(u) (1 - vartheta(u) B) (1 - B)^{-d(u)} eps.
/// AR and MA parts are optional and of order at most one.
struct ModelSpec {
    CurveSpec d;
    CurveSpec sigma;
    std::optional<CurveSpec> ar;
    std::optional<CurveSpec> ma;

    int ar_order() const { return ar ? 1 : 0; }
    int ma_order() const { return ma ? 1 : 0; }

    const CurveSpec* curve(Component c) const;

    /// Free parameters in slot order d, sigma, ar, ma.
    std::size_t dimension() const;
    std::vector<Slot> slots() const;
    /// alpha<j>, beta<j>, phi<j>, theta<j> per free coefficient.
    std::vector<std::string> parameter_names() const;

    /// Checks fixed-coefficient lengths and basis Gram invertibility.
    void validate() const;

    bool operator==(const ModelSpec&) const = default;
};

/// Flat parameter vector with its slot map.
class ParamVector {
public:
    ParamVector() = default;
    /// Throws DimensionError if the length differs from model.dimension() or an
    /// entry is not finite.
    ParamVector(const ModelSpec& model, std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    const std::vector<Slot>& slots() const { return slots_; }

    /// Free coefficients of one component; empty when fixed or absent.
    std::span<const double> coeffs(Component c) const;

    ParamVector with_value(std::size_t i, double v) const;

private:
    std::vector<double> values_;
    std::vector<Slot> slots_;
};

/// Coefficients actually used for `c`: the fixed ones or the slice of theta.
std::span<const double> curve_coeffs(const ModelSpec& model, const ParamVector& theta, Component c);

/// Curve values at one rescaled time point.
struct LocalParams {
    double d = 0.0;
    double sigma = 1.0;
    double ar = 0.0;
    double ma = 0.0;
};

LocalParams local_params(const ModelSpec& model, const ParamVector& theta, double u);

struct ConstraintBounds {
    double d_lo = 1e-3;
    double d_hi = 0.499;
    double sigma_min = 0.0;
    double arma_max = 1.0;
};

struct Violation {
    Component component;
    double u;
    double value;
    double bound;
};

struct ConstraintReport {
    bool feasible = true;
    std::vector<Violation> violations;

    /// One line per violation, for error messages.
    std::string describe(std::size_t max_lines = 5) const;
};

/// Checks d_lo < d(u) < d_hi, sigma(u) > sigma_min and |phi(u)|, |vartheta(u)| <
/// arma_max on a uniform grid of `grid_size` points in [0, 1].
ConstraintReport validate_params(const ModelSpec& model, const ParamVector& theta,
                                 int grid_size = 101, const ConstraintBounds& bounds = {});

/// Per-frequency quantities shared by every block: cos(lambda) and
/// log((2 sin(|lambda|/2))^2).
struct FrequencyTerms {
    double cos_lambda;
    double log_fn;

    static FrequencyTerms at(double lambda);
};

double log_spectral_density(const LocalParams& p, const FrequencyTerms& freq);

/// f(u, lambda) = sigma^2/(2 pi) |1 - vartheta e^{-i lambda}|^2
///               / |1 + phi e^{-i lambda}|^2 (2 sin(|lambda|/2))^{-2 d}.
/// Throws DimensionError for lambda = 0 or |lambda| > pi.
double spectral_density(const ModelSpec& model, const ParamVector& theta, double u, double lambda);

/// Gradient of log f with respect to theta. d and sigma slots are analytic;
/// AR and MA slots use central differences with step 1e-6 max(1, |theta_i|).
Eigen::VectorXd log_spectral_gradient(const ModelSpec& model, const ParamVector& theta, double u,
                                      double lambda);

} // namespace lsw
