#include "lsw/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>

#include <fftw3.h>

#include "lsw/error.hpp"

namespace lsw {

bool plan_is_valid(int T, int N, int S)
{
    return N >= 2 && N <= T && S >= 1 && (T - N) % S == 0;
}

BlockPlan find_nearest_plan(int T, int N, int S)
{
    if (N < 2 || N > T)
        throw PlanError("nearest plan: need 2 <= N <= T (N = " + std::to_string(N) + ", T = " + std::to_string(T)
                        + ")");
    S = std::max(S, 1);
    // S' = 1 is always admissible, so the search ends by distance |S - 1|.
    for (int dist = 0;; ++dist) {
        for (int dn = -dist; dn <= dist; ++dn) {
            const int n = N + dn;
            const int rest = dist - std::abs(dn);
            for (int s : {S - rest, S + rest}) {
                if (plan_is_valid(T, n, s))
                    return make_plan(T, n, s);
                if (rest == 0)
                    break;
            }
        }
    }
}

BlockPlan make_plan(int T, int N, int S)
{
    if (N < 2)
        throw PlanError("block length N must be at least 2");
    if (N > T)
        throw PlanError("block length N = " + std::to_string(N) + " exceeds series length T = " + std::to_string(T));
    if (S < 1)
        throw PlanError("shift S must be at least 1");
    if ((T - N) % S != 0) {
        const BlockPlan near = find_nearest_plan(T, N, S);
        throw PlanError("T - N = " + std::to_string(T - N) + " is not a multiple of S = " + std::to_string(S)
                        + "; nearest valid plan is N = " + std::to_string(near.N) + ", S = " + std::to_string(near.S)
                        + " (M = " + std::to_string(near.M) + ")");
    }
    BlockPlan plan;
    plan.T = T;
    plan.N = N;
    plan.S = S;
    plan.M = (T - N) / S + 1;
    plan.start.resize(static_cast<std::size_t>(plan.M));
    plan.u.resize(static_cast<std::size_t>(plan.M));
    for (int j = 0; j < plan.M; ++j) {
        plan.start[static_cast<std::size_t>(j)] = S * j + 1;
        plan.u[static_cast<std::size_t>(j)] = (S * j + 0.5 * N) / T;
    }
    return plan;
}

Taper taper_weights(Taper::Kind kind, int N)
{
    if (N < 2)
        throw DimensionError("taper length must be at least 2");
    Taper taper;
    taper.kind = kind;
    taper.N = N;
    taper.weights.resize(static_cast<std::size_t>(N));
    for (int s = 0; s < N; ++s) {
        const double x = static_cast<double>(s) / N;
        taper.weights[static_cast<std::size_t>(s)] =
            kind == Taper::Kind::uniform ? 1.0 : 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * x));
    }
    for (double h : taper.weights) {
        taper.h1 += h;
        taper.h2 += h * h;
    }
    return taper;
}

namespace {

// FFTW's planner is not reentrant; execution on distinct buffers is.
std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

class RealDft {
public:
    explicit RealDft(int n)
    {
        in_ = fftw_alloc_real(static_cast<std::size_t>(n));
        out_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
    }
    ~RealDft()
    {
        {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(in_);
        fftw_free(out_);
    }
    RealDft(const RealDft&) = delete;
    RealDft& operator=(const RealDft&) = delete;

    double* input() { return in_; }
    void execute() { fftw_execute(plan_); }
    double power(int k) const { return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1]; }

private:
    double* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

} // namespace

LocalPeriodogram local_periodogram(std::span<const double> data, const BlockPlan& plan, const Taper& taper)
{
    if (static_cast<int>(data.size()) != plan.T)
        throw DimensionError("periodogram: data length " + std::to_string(data.size()) + " does not match plan T = "
                             + std::to_string(plan.T));
    if (taper.N != plan.N)
        throw DimensionError("periodogram: taper length does not match block length");

    const int F = plan.N / 2;
    LocalPeriodogram out;
    out.plan = plan;
    out.h2 = taper.h2;
    out.frequencies.resize(static_cast<std::size_t>(F));
    for (int k = 1; k <= F; ++k)
        out.frequencies[static_cast<std::size_t>(k - 1)] = 2.0 * std::numbers::pi * k / plan.N;
    out.ordinates.resize(plan.M, F);

    const double norm = 1.0 / (2.0 * std::numbers::pi * taper.h2);
    RealDft dft(plan.N);
    for (int j = 0; j < plan.M; ++j) {
        const auto offset = static_cast<std::size_t>(plan.start[static_cast<std::size_t>(j)] - 1);
        double* buf = dft.input();
        for (int s = 0; s < plan.N; ++s)
            buf[s] = taper.weights[static_cast<std::size_t>(s)] * data[offset + static_cast<std::size_t>(s)];
        dft.execute();
        for (int k = 1; k <= F; ++k)
            out.ordinates(j, k - 1) = dft.power(k) * norm;
    }
    return out;
}

void write_periodogram_csv(std::ostream& out, const LocalPeriodogram& pgram)
{
    out << "block,u,freq,ordinate\n";
    char buf[128];
    for (int j = 0; j < pgram.plan.M; ++j)
        for (std::size_t k = 0; k < pgram.frequencies.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", j + 1, pgram.plan.u[static_cast<std::size_t>(j)],
                          pgram.frequencies[k], pgram.ordinates(j, static_cast<Eigen::Index>(k)));
            out << buf;
        }
}

void write_periodogram_csv(const std::filesystem::path& path, const LocalPeriodogram& pgram)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    write_periodogram_csv(out, pgram);
}

} // namespace lsw
