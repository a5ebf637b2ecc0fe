#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lsw {

struct NelderMeadOptions {
    /// Converged when max f - min f over the simplex falls below `ftol` and
    /// every vertex lies within `xtol` (max-norm) of the best one.
    double ftol = 1e-8;
    double xtol = 1e-5;
    int max_iterations = 2000;
    /// After the first convergence, rebuild the simplex around the optimum
    /// and run once more.
    bool restart = true;
    /// Initial simplex edge per coordinate; empty means 0.1 for each.
    std::vector<double> initial_step;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead simplex minimisation with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2). Deterministic.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options = {});

} // namespace lsw
