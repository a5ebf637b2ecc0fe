#include "lsw/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lsw {
namespace {

struct RunResult {
    std::vector<double> x;
    double value;
    int iterations;
    bool converged;
};

RunResult run_simplex(const Objective& f, const std::vector<double>& x0, const std::vector<double>& step,
                      const NelderMeadOptions& opt, int max_iterations, int& evaluations)
{
    const std::size_t n = x0.size();
    auto eval = [&](const std::vector<double>& x) {
        ++evaluations;
        const double v = f(x);
        return std::isnan(v) ? HUGE_VAL : v;
    };

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += step[i];
    for (std::size_t i = 0; i <= n; ++i)
        values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    int iter = 0;
    bool converged = false;
    for (; iter < max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Stable sort keeps the vertex order deterministic on ties.
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double xspread = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                xspread = std::max(xspread, std::abs(simplex[i][k] - simplex[best][k]));
        if (values[worst] - values[best] < opt.ftol && xspread < opt.xtol) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < n; ++k)
                    centroid[k] += simplex[i][k] / static_cast<double>(n);

        for (std::size_t k = 0; k < n; ++k)
            trial[k] = centroid[k] + (centroid[k] - simplex[worst][k]);
        const double fr = eval(trial);

        if (fr < values[best]) {
            for (std::size_t k = 0; k < n; ++k)
                trial2[k] = centroid[k] + 2.0 * (centroid[k] - simplex[worst][k]);
            const double fe = eval(trial2);
            if (fe < fr) {
                simplex[worst] = trial2;
                values[worst] = fe;
            } else {
                simplex[worst] = trial;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = trial;
            values[worst] = fr;
            continue;
        }
        // Contraction: outside if the reflected point improved on the worst.
        const bool outside = fr < values[worst];
        for (std::size_t k = 0; k < n; ++k)
            trial2[k] = outside ? centroid[k] + 0.5 * (trial[k] - centroid[k])
                                : centroid[k] + 0.5 * (simplex[worst][k] - centroid[k]);
        const double fc = eval(trial2);
        if (fc < (outside ? fr : values[worst])) {
            simplex[worst] = trial2;
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best)
                continue;
            for (std::size_t k = 0; k < n; ++k)
                simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
            values[i] = eval(simplex[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    return {simplex[best], values[best], iter, converged};
}

} // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options)
{
    if (x0.empty())
        throw std::invalid_argument("nelder_mead: empty starting point");
    std::vector<double> step = options.initial_step;
    if (step.empty())
        step.assign(x0.size(), 0.1);
    if (step.size() != x0.size())
        throw std::invalid_argument("nelder_mead: initial_step size mismatch");

    NelderMeadResult result;
    RunResult run = run_simplex(f, x0, step, options, options.max_iterations, result.evaluations);
    result.iterations = run.iterations;
    if (options.restart && run.converged) {
        const int left = options.max_iterations - run.iterations;
        RunResult again = run_simplex(f, run.x, step, options, std::max(left, 1), result.evaluations);
        result.iterations += again.iterations;
        const bool converged = again.converged;
        if (again.value <= run.value)
            run = std::move(again);
        run.converged = converged;
    }
    result.x = std::move(run.x);
    result.value = run.value;
    result.converged = run.converged;
    return result;
}

} // namespace lsw
