#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsw/tvmodel.hpp"

namespace lsw {

/// Closed-form Fisher matrices available for the model families below.
enum class ClosedForm {
    polynomial,  ///< d, sigma polynomial with identity links, no ARMA part
    exponential, ///< log d and log sigma linear in u, no ARMA part
    harmonic,    ///< d, sigma harmonic with identity links, no ARMA part
    arma11,      ///< d = a u, phi = b u, vartheta = c u, sigma = 1 known
    sec4,        ///< d, sigma linear, constant MA coefficient
};

/// "ex2" | "polynomial", "ex3" | "exponential", "harmonic", "ex5" | "arma11",
/// "sec4". Throws ConfigError for anything else.
ClosedForm parse_closed_form(const std::string& id);
const char* closed_form_name(ClosedForm id);

/// Canonical model of each family. Polynomial degrees and harmonic
/// frequencies apply to the families that use them.
ModelSpec polynomial_model(int d_degree, int sigma_degree);
ModelSpec exponential_model();
ModelSpec harmonic_model(std::vector<double> d_freqs, std::vector<double> sigma_freqs);
ModelSpec arma11_model();
ModelSpec sec4_model();

/// True when `model` has the structure of family `id`.
bool matches_closed_form(const ModelSpec& model, ClosedForm id);

struct GammaMatrix {
    enum class Provenance { quadrature, closed_form };

    Eigen::MatrixXd matrix;
    Provenance provenance = Provenance::quadrature;
    /// Family name for closed-form entries.
    std::string source;
    std::vector<double> theta;
    std::vector<std::string> names;
};

struct QuadratureOptions {
    /// Gauss-Legendre nodes in u on [0, 1].
    int nu = 24;
    /// Nodes per lambda panel.
    int n_lambda = 16;
    /// Dyadic refinements towards lambda = 0 below pi/16; [pi/16, pi] is
    /// covered by 15 equal panels.
    int levels = 48;
    ConstraintBounds bounds;
};

/// Gamma(theta) = 1/(4 pi) int_0^1 int_{-pi}^{pi} grad log f grad log f' dlambda du
/// by tensor-product Gauss-Legendre quadrature, using lambda-symmetry.
/// Throws InfeasibleError for infeasible theta, NotPositiveDefinite when the
/// result is singular, and std::logic_error if the d-sigma cross block
/// exceeds 1e-8 (it vanishes identically).
GammaMatrix gamma_quadrature(const ModelSpec& model, const ParamVector& theta, const QuadratureOptions& options = {});

/// Closed-form Gamma(theta) for a catalog family, in this library's slot
/// order and sign conventions. `model` supplies degrees and frequencies and
/// must match the family. Throws InfeasibleError outside a formula's domain
/// and ConfigError on a structural mismatch.
GammaMatrix gamma_closed(ClosedForm id, const ModelSpec& model, const ParamVector& theta);

struct SEReport {
    std::vector<std::string> names;
    std::vector<double> sd;
    int T = 0;
    GammaMatrix::Provenance provenance = GammaMatrix::Provenance::quadrature;
};

/// sd_i = sqrt((Gamma^{-1})_{ii} / T) through a Cholesky solve. Throws
/// NotPositiveDefinite for singular Gamma, DimensionError for T < 1.
SEReport asymptotic_se(const GammaMatrix& gamma, int T);

/// v(u) = g(u)' Gamma_alpha^{-1} g(u), the limit of T var[d_hat(u)], at each u.
std::vector<double> dhat_variance_profile(const Eigen::MatrixXd& gamma_alpha, const BasisSpec& basis,
                                          const std::vector<double>& u_grid);

/// trace(Gamma_alpha^{-1} B) with Gamma_alpha from quadrature on a fractional
/// noise model with this d-basis and B the basis Gram matrix; the limit of
/// T int_0^1 var[d_hat(u)] du.
double average_variance_check(const BasisSpec& basis, const QuadratureOptions& options = {});

/// Square CSV with a leading `param` column and parameter-name header.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& names);
/// CSV `param,sd`.
void write_se_csv(std::ostream& out, const SEReport& se);

} // namespace lsw
