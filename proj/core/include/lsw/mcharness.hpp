#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lsw/config.hpp"
#include "lsw/spectral.hpp"
#include "lsw/tvmodel.hpp"
#include "lsw/whittle.hpp"

namespace lsw {

struct MCConfig {
    ModelSpec model;
    ParamVector theta;
    int T = 512;
    int N = 105;
    int S = 35;
    Taper::Kind taper = Taper::Kind::cosine_bell;
    int reps = 200;
    std::uint64_t seed = 1;
    int workers = 1;
    FitOptions fit;
};

struct MCRow {
    std::string param;
    double truth = 0.0;
    double mean_est = 0.0;
    double emp_sd = 0.0;
    double theo_sd = 0.0;
    int n_converged = 0;
    int n_total = 0;
};

struct MCTable {
    std::vector<MCRow> rows;
    BlockPlan plan;
    std::uint64_t seed = 0;
    int reps = 0;
    /// Plan substitutions and other remarks, one per line.
    std::vector<std::string> notes;
    /// Estimates by replication index (reps x dimension) and their status.
    std::vector<std::vector<double>> estimates;
    std::vector<bool> converged;
};

struct GridConfig {
    ModelSpec model;
    ParamVector theta;
    int T = 512;
    IntRange N{80, 140, 1};
    IntRange S{20, 50, 1};
    Taper::Kind taper = Taper::Kind::cosine_bell;
    int reps = 100;
    std::uint64_t seed = 1;
    int workers = 1;
    FitOptions fit;
};

struct GridCell {
    int N = 0;
    int S = 0;
    int M = 0;
    double mse = 0.0;
    int reps = 0;
};

struct MSEGrid {
    std::vector<GridCell> cells;
    std::uint64_t seed = 0;
    int T = 0;
};

/// find_nearest_plan, appending "plan N=.. S=.. replaced by N=.. S=.. (M=..)"
/// to `notes` when a substitution happens.
BlockPlan nearest_plan(int T, int N, int S, std::vector<std::string>* notes = nullptr);

/// Calls body(i) for i = 0..count-1 on `workers` threads. The first exception
/// thrown by any call is rethrown after all workers stop.
void parallel_for(int count, int workers, const std::function<void(int)>& body);

/// Replication r = 1..R simulates with stream (seed, r), estimates under the
/// nearest valid plan and is stored by index. Non-converged fits are left out
/// of the moments and counted. The theoretical SD comes from the closed form
/// when the model has one, else from quadrature, else NaN.
MCTable run_mc(const MCConfig& config);

/// Mean of |theta_hat - theta|^2 over the converged replications.
double mean_squared_error(const MCTable& table, const ParamVector& truth);

/// Empirical MSE for every valid (N, S) in the ranges. All cells share the
/// same R paths. Throws PlanError if no cell is valid.
MSEGrid mse_grid(const GridConfig& config);

/// CSV `param,true,mean_est,emp_sd,theo_sd,n_converged,n_total`.
void write_mc_csv(std::ostream& out, const MCTable& table);
void write_mc_csv(const std::filesystem::path& path, const MCTable& table);
/// CSV `N,S,M,mse,reps`.
void write_grid_csv(std::ostream& out, const MSEGrid& grid);
void write_grid_csv(const std::filesystem::path& path, const MSEGrid& grid);

} // namespace lsw
