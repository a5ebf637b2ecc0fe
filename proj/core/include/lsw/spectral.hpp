#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lsw {

/// Segmentation of a length-T series into M blocks of length N shifted by S,
/// T = S (M - 1) + N. Block j (0-based) covers observations
/// start[j] .. start[j] + N - 1 (1-based) and is centred at
/// u[j] = (S j + N / 2) / T.
struct BlockPlan {
    int T = 0;
    int N = 0;
    int S = 0;
    int M = 0;
    std::vector<int> start;
    std::vector<double> u;

    bool operator==(const BlockPlan&) const = default;
};

/// Throws PlanError if N > T, N < 2, S < 1 or (T - N) is not a multiple of S;
/// the divisibility message names the nearest admissible (N, S).
BlockPlan make_plan(int T, int N, int S);

/// Admissible (N', S') closest to (N, S) in L1 distance, ties broken by
/// smaller N' then smaller S'. Requires 2 <= N <= T.
BlockPlan find_nearest_plan(int T, int N, int S);

bool plan_is_valid(int T, int N, int S);

/// Data taper h(s / N), s = 0..N-1, with H_k = sum_s h(s/N)^k.
struct Taper {
    enum class Kind { cosine_bell, uniform };

    Kind kind = Kind::cosine_bell;
    int N = 0;
    std::vector<double> weights;
    double h1 = 0.0;
    double h2 = 0.0;
};

/// Cosine bell h(x) = (1 - cos(2 pi x)) / 2, or h = 1.
Taper taper_weights(Taper::Kind kind, int N);

/// I_N(u_j, lambda_k) = |D_N(u_j, lambda_k)|^2 / (2 pi H_2) on the block
/// Fourier frequencies lambda_k = 2 pi k / N, k = 1..floor(N/2).
struct LocalPeriodogram {
    BlockPlan plan;
    std::vector<double> frequencies;
    /// M x F, row j is block j.
    Eigen::MatrixXd ordinates;
    double h2 = 0.0;
};

/// Tapered DFT of every block through FFTW (any N). Throws DimensionError if
/// the data length differs from plan.T or the taper length from plan.N.
LocalPeriodogram local_periodogram(std::span<const double> data, const BlockPlan& plan, const Taper& taper);

/// CSV `block,u,freq,ordinate` with 1-based block numbers.
void write_periodogram_csv(std::ostream& out, const LocalPeriodogram& pgram);
void write_periodogram_csv(const std::filesystem::path& path, const LocalPeriodogram& pgram);

} // namespace lsw
