#pragma once

#include <iosfwd>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "lsw/optimizer.hpp"
#include "lsw/spectral.hpp"
#include "lsw/tvmodel.hpp"

namespace lsw {

/// Constraint handling for the Whittle objective. Outside the feasible set
/// the curve values entering the likelihood are clamped to the bounds and
/// `weight * sum(excess^2)` over a `grid_size`-point u-grid is added, which
/// keeps the objective finite and continuous across the boundary.
struct PenaltyConfig {
    ConstraintBounds bounds;
    int grid_size = 101;
    double weight = 1e4;
    /// Clamp floor for sigma(u) and margin below 1 for |AR|, |MA|.
    double sigma_floor = 1e-6;
    double arma_margin = 1e-6;
    /// Largest bound excess at which an optimum still counts as feasible.
    /// Penalised optima on the boundary overshoot it by O(1/weight).
    double feasibility_tol = 1e-4;
};

/// Blockwise Whittle quasi-likelihood
///
///   L(theta) = 1/(4 pi) 1/M sum_j sum_k w_k [log f(u_j, l_k) + I(u_j, l_k) / f(u_j, l_k)]
///
/// over the block Fourier frequencies l_k = 2 pi k / N, k = 1..floor(N/2),
/// with w_k = 2 (2 pi / N) (both signs of the frequency) except w = 2 pi / N
/// at the Nyquist frequency of an even N.
class WhittleObjective {
public:
    WhittleObjective(LocalPeriodogram pgram, ModelSpec model, PenaltyConfig penalty = {});

    /// Penalised value; equals raw_value() wherever theta is feasible.
    double operator()(std::span<const double> theta) const;
    double operator()(const ParamVector& theta) const { return (*this)(theta.values()); }

    /// Likelihood with the curve values clamped to the bounds, no penalty term.
    double raw_value(std::span<const double> theta) const;
    /// Penalty term alone (zero iff theta is feasible on the grid).
    double penalty(std::span<const double> theta) const;
    /// Largest amount by which a curve leaves its bounds on the grid.
    double max_violation(std::span<const double> theta) const;

    const LocalPeriodogram& periodogram() const { return pgram_; }
    const ModelSpec& model() const { return model_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    struct CurveCache {
        const CurveSpec* spec = nullptr;
        Component component;
        std::size_t offset = 0;
        std::vector<double> fixed;
        /// Basis values, row-major: points x basis size.
        std::vector<double> at_blocks;
        std::vector<double> at_grid;
    };

    template <class Visit>
    void excesses(std::span<const double> theta, Visit&& visit) const;
    double curve_at(const CurveCache& c, std::span<const double> theta, const std::vector<double>& table,
                    std::size_t point) const;

    LocalPeriodogram pgram_;
    ModelSpec model_;
    PenaltyConfig penalty_;
    std::vector<double> weights_;
    std::vector<FrequencyTerms> freq_;
    std::vector<CurveCache> curves_;
};

double whittle_loglik(const WhittleObjective& objective, const ParamVector& theta);

struct FitOptions {
    NelderMeadOptions optimizer;
    PenaltyConfig penalty;
    /// Overrides the default starting point when set.
    std::optional<std::vector<double>> start;
};

struct FitResult {
    ParamVector theta;
    double objective = 0.0;
    int iterations = 0;
    int evaluations = 0;
    /// Simplex converged and the optimum is feasible up to
    /// PenaltyConfig::feasibility_tol.
    bool converged = false;
    BlockPlan plan;
};

/// Default start: d intercept 0.1 (other d coefficients 0), sigma intercept
/// equal to `scale` (other sigma coefficients 0), ARMA coefficients 0. The
/// intercept is the coefficient of the constant basis function, or the first
/// coefficient when the basis has none; log links receive the log of the
/// value.
std::vector<double> default_start(const ModelSpec& model, double scale);

/// Per-coordinate initial simplex edges matching default_start.
std::vector<double> default_steps(const ModelSpec& model, double scale);

/// Minimises the Whittle objective of a given periodogram. `scale` sets the
/// sigma start and step when no explicit start is supplied.
FitResult estimate_from_periodogram(const LocalPeriodogram& pgram, const ModelSpec& model, double scale,
                                    const FitOptions& options = {});

/// Periodogram of `data` under (plan, taper), then estimate_from_periodogram
/// with scale = sample SD. Throws DimensionError for non-finite data or a
/// length different from plan.T.
FitResult estimate(std::span<const double> data, const ModelSpec& model, const BlockPlan& plan, const Taper& taper,
                   const FitOptions& options = {});

/// `param,estimate` rows, a blank line, then `converged=`, `objective=`,
/// `iterations=` lines.
void write_fit_report(std::ostream& out, const ModelSpec& model, const FitResult& fit);
void write_fit_report(const std::filesystem::path& path, const ModelSpec& model, const FitResult& fit);

} // namespace lsw
