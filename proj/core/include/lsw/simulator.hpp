#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "lsw/tvmodel.hpp"

namespace lsw {

/// Exact Gaussian simulation of time-varying ARFIMA(0, d(u), 1) paths
///
///   Y_t = sigma(t/T) (1 - vartheta B) (1 - B)^{-d(t/T)} eps_t,  t = 1..T,
///
/// from the closed-form covariance kernel and the innovations algorithm.
/// The MA coefficient must be a constant (degree-0) curve; AR parts are not
/// supported because no closed-form kernel is available for them.

/// E[Y_s Y_t] for 1 <= t <= s <= T. Throws DimensionError for bad indices and
/// InfeasibleError when the model is outside the supported family or d(u)
/// leaves (0, 1/2).
double covariance(const ModelSpec& model, const ParamVector& theta, int s, int t, int T);

/// T x T covariance matrix of the model, filled from the per-time curve values.
class CovKernel {
public:
    CovKernel(const ModelSpec& model, const ParamVector& theta, int T);

    int size() const { return T_; }
    /// kappa(s, t) for 1-based indices in any order.
    double operator()(int s, int t) const;

private:
    int T_;
    double ma_;
    std::vector<double> d_;
    std::vector<double> sigma_;
    std::vector<double> log_gamma_d_;
    std::vector<double> log_gamma_1md_;
};

/// Unit lower-triangular innovations coefficients and prediction variances,
/// K = L diag(v) L'. Row n holds theta_{n, n-k} for k = 0..n-1 (0-based time).
class InnovationsState {
public:
    InnovationsState() = default;
    InnovationsState(std::vector<std::vector<double>> rows, std::vector<double> v)
        : rows_(std::move(rows)), v_(std::move(v))
    {
    }

    int size() const { return static_cast<int>(v_.size()); }
    /// Coefficient of innovation k in the one-step predictor of X_n, k < n.
    double coefficient(int n, int k) const { return rows_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)]; }
    std::span<const double> row(int n) const { return rows_[static_cast<std::size_t>(n)]; }
    const std::vector<double>& variances() const { return v_; }

private:
    std::vector<std::vector<double>> rows_;
    std::vector<double> v_;
};

/// Innovations recursion (Brockwell & Davis, Prop. 5.2.2) on any symmetric
/// kernel callable as kernel(s, t) with 1-based indices. O(T^2) memory and
/// O(T^3) time. Throws NotPositiveDefinite naming the first index with a
/// non-positive prediction variance.
template <class Kernel>
InnovationsState innovations_decompose(const Kernel& kernel, int T);

InnovationsState innovations_decompose(const CovKernel& kernel);

struct SimConfig {
    int T = 0;
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
};

/// Path from a precomputed decomposition; z-variates come from
/// NormalStream(seed, replication), so equal configs give identical paths.
std::vector<double> simulate_path(const InnovationsState& state, const SimConfig& config);

/// Validates theta against the default bounds, builds the kernel and
/// decomposes it, then simulates. Throws InfeasibleError for infeasible theta.
std::vector<double> simulate_path(const ModelSpec& model, const ParamVector& theta, const SimConfig& config);

/// CSV `t,value`, 1-based t, 17 significant digits.
void write_series_csv(std::ostream& out, std::span<const double> series);
void write_series_csv(const std::filesystem::path& path, std::span<const double> series);

/// Reads the value column of a series CSV. Throws ConfigError naming the
/// offending row for non-numeric or non-finite cells.
std::vector<double> read_series_csv(std::istream& in);
std::vector<double> read_series_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------

[[noreturn]] void throw_not_positive_definite(int index, double value);

template <class Kernel>
InnovationsState innovations_decompose(const Kernel& kernel, int T)
{
    const auto n_obs = static_cast<std::size_t>(T);
    std::vector<std::vector<double>> rows(n_obs);
    std::vector<double> v(n_obs);
    for (std::size_t n = 0; n < n_obs; ++n) {
        auto& row = rows[n];
        row.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& rk = rows[k];
            double acc = kernel(static_cast<int>(n) + 1, static_cast<int>(k) + 1);
            for (std::size_t j = 0; j < k; ++j)
                acc -= rk[j] * row[j] * v[j];
            row[k] = acc / v[k];
        }
        double vn = kernel(static_cast<int>(n) + 1, static_cast<int>(n) + 1);
        for (std::size_t j = 0; j < n; ++j)
            vn -= row[j] * row[j] * v[j];
        if (!(vn > 0.0))
            throw_not_positive_definite(static_cast<int>(n), vn);
        v[n] = vn;
    }
    return InnovationsState(std::move(rows), std::move(v));
}

} // namespace lsw
