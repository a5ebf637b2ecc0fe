#pragma once

#include <utility>
#include <vector>

namespace lsw {

/// log|Gamma(x)| without touching the global `signgam`.
double log_gamma(double x);

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton iteration on P_n); cached per n,
/// safe to call concurrently.
const QuadratureRule& gauss_legendre(int n);

/// Rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Composite rule on (0, b]: dyadic panels [b 2^-(k+1), b 2^-k] for
/// k = 0..levels-1 plus the innermost panel [0, b 2^-levels], each carrying
/// an n-point Gauss-Legendre rule. Integrands with log or log^2 growth at
/// zero converge geometrically in `levels`.
QuadratureRule graded_rule(int n, double b, int levels);

} // namespace lsw
