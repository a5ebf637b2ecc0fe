#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "lsw/error.hpp"
#include "lsw/numerics.hpp"
#include "lsw/rng.hpp"
#include "lsw/simulator.hpp"

using namespace lsw;

namespace {

ModelSpec arfima01(bool with_ma = true)
{
    ModelSpec m;
    m.d.basis = BasisSpec::polynomial(0);
    m.sigma.basis = BasisSpec::polynomial(0);
    if (with_ma)
        m.ma = CurveSpec{BasisSpec::polynomial(0), LinkSpec::identity, {}};
    return m;
}

ModelSpec case1()
{
    ModelSpec m;
    m.d.basis = BasisSpec::polynomial(1);
    m.sigma.basis = BasisSpec::polynomial(1);
    m.ma = CurveSpec{BasisSpec::polynomial(0), LinkSpec::identity, {}};
    return m;
}

// Stationary ARFIMA(0, d, 1) autocovariance, sigma = 1, from the fractional
// noise recursion and the MA(1) filter (1 - v B).
std::vector<double> stationary_acvf(double d, double v, int lags)
{
    std::vector<double> g(static_cast<std::size_t>(lags + 2));
    g[0] = std::tgamma(1.0 - 2.0 * d) / std::pow(std::tgamma(1.0 - d), 2);
    for (std::size_t k = 1; k < g.size(); ++k)
        g[k] = g[k - 1] * (static_cast<double>(k) - 1.0 + d) / (static_cast<double>(k) - d);
    std::vector<double> out(static_cast<std::size_t>(lags + 1));
    for (int k = 0; k <= lags; ++k) {
        const double below = g[static_cast<std::size_t>(std::abs(k - 1))];
        out[static_cast<std::size_t>(k)] =
            (1.0 + v * v) * g[static_cast<std::size_t>(k)] - v * (below + g[static_cast<std::size_t>(k + 1)]);
    }
    return out;
}

} // namespace

TEST_CASE("philox4x32-10 known answers")
{
    using W = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff})
          == W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0})
          == W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal streams are reproducible and independent")
{
    NormalStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    bool differ_stream = false;
    bool differ_seed = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal();
        CHECK(x == b.normal());
        differ_stream |= x != c.normal();
        differ_seed |= x != d.normal();
    }
    CHECK(differ_stream);
    CHECK(differ_seed);

    NormalStream s(1, 1);
    const int n = 200000;
    double m1 = 0.0, m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        m1 += z;
        m2 += z * z;
        m4 += z * z * z * z;
    }
    CHECK(std::abs(m1 / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(m2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(m4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));

    NormalStream u(9, 0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK((x > 0.0 && x < 1.0));
    }
}

TEST_CASE("log_gamma")
{
    for (double x : {0.5, 1.0, 2.5, 7.0, 30.0, 171.0})
        CHECK(log_gamma(x) == doctest::Approx(std::log(std::tgamma(x))).epsilon(1e-13));
    CHECK(log_gamma(1e5) == doctest::Approx((1e5 - 0.5) * std::log(1e5) - 1e5 + 0.5 * std::log(2 * std::numbers::pi)
                                            + 1.0 / (12 * 1e5))
                                .epsilon(1e-14));
    CHECK(log_gamma(-0.5) == doctest::Approx(std::log(2.0 * std::sqrt(std::numbers::pi))));
}

TEST_CASE("Gauss-Legendre rules")
{
    for (int n : {1, 2, 5, 16, 24, 64}) {
        const auto& r = gauss_legendre(n);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double sum = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i)
                sum += r.weights[i] * std::pow(r.nodes[i], p);
            CHECK(sum == doctest::Approx(p % 2 ? 0.0 : 2.0 / (p + 1)).epsilon(1e-13));
        }
    }
    const auto g = gauss_legendre(8, 1.0, 3.0);
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        s += g.weights[i] * std::exp(g.nodes[i]);
    CHECK(s == doctest::Approx(std::exp(3.0) - std::exp(1.0)).epsilon(1e-14));

    const auto gr = graded_rule(16, 1.0, 40);
    double l1 = 0.0, l2 = 0.0;
    for (std::size_t i = 0; i < gr.nodes.size(); ++i) {
        l1 += gr.weights[i] * std::log(gr.nodes[i]);
        l2 += gr.weights[i] * std::log(gr.nodes[i]) * std::log(gr.nodes[i]);
    }
    CHECK(std::abs(l1 + 1.0) < 1e-11);
    CHECK(std::abs(l2 - 2.0) < 1e-11);
}

TEST_CASE("kernel reduces to the stationary ARFIMA(0,d,1) autocovariance")
{
    const auto m = arfima01();
    for (double d : {0.1, 0.3, 0.45})
        for (double v : {0.0, 0.4, -0.4}) {
            const ParamVector th(m, {d, 1.0, v});
            const auto want = stationary_acvf(d, v, 50);
            for (int k = 0; k <= 50; ++k) {
                const double got = covariance(m, th, 60 + k, 60, 200);
                CHECK(std::abs(got - want[static_cast<std::size_t>(k)]) <= 1e-10 * std::abs(want[0]));
            }
        }
}

TEST_CASE("kernel arguments and scaling")
{
    const auto m = case1();
    const ParamVector th(m, {0.15, 0.2, 0.5, 0.3, 0.5});
    CHECK_THROWS_AS(covariance(m, th, 3, 5, 10), DimensionError);
    CHECK_THROWS_AS(covariance(m, th, 11, 5, 10), DimensionError);
    CHECK_THROWS_AS(covariance(m, ParamVector(m, {0.3, 0.3, 0.5, 0.3, 0.5}), 100, 1, 100), InfeasibleError);
    const CovKernel K(m, th, 64);
    CHECK(K(10, 4) == K(4, 10));
    CHECK(K(10, 4) == covariance(m, th, 10, 4, 64));

    // Doubling sigma scales the kernel by four.
    const ParamVector th2(m, {0.15, 0.2, 1.0, 0.6, 0.5});
    CHECK(covariance(m, th2, 30, 20, 64) == doctest::Approx(4.0 * covariance(m, th, 30, 20, 64)).epsilon(1e-14));

    ModelSpec ar = case1();
    ar.ar = CurveSpec{BasisSpec::polynomial(0), LinkSpec::identity, {}};
    CHECK_THROWS_AS(CovKernel(ar, ParamVector(ar, {0.15, 0.2, 0.5, 0.3, 0.1, 0.5}), 10), InfeasibleError);
}

TEST_CASE("innovations decomposition reproduces the covariance matrix")
{
    const auto m = case1();
    const ParamVector th(m, {0.15, 0.2, 0.5, 0.3, 0.5});
    const int T = 40;
    const CovKernel K(m, th, T);
    const InnovationsState st = innovations_decompose(K);
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(T, T);
    Eigen::MatrixXd Kmat(T, T);
    for (int n = 0; n < T; ++n) {
        for (int k = 0; k < n; ++k)
            L(n, k) = st.coefficient(n, k);
        for (int k = 0; k < T; ++k)
            Kmat(n, k) = K(n + 1, k + 1);
    }
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(st.variances().data(), T);
    const Eigen::MatrixXd back = L * v.asDiagonal() * L.transpose();
    CHECK((back - Kmat).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::LLT<Eigen::MatrixXd> llt(Kmat);
    const Eigen::MatrixXd C = llt.matrixL();
    for (int n = 0; n < T; ++n)
        CHECK(v(n) == doctest::Approx(C(n, n) * C(n, n)).epsilon(1e-12));
}

TEST_CASE("decomposition rejects an indefinite kernel")
{
    auto bad = [](int s, int t) { return s == t ? 1.0 : 2.0; };
    CHECK_THROWS_AS(innovations_decompose(bad, 3), NotPositiveDefinite);
}

TEST_CASE("simulated paths are deterministic and CSV round-trips")
{
    const auto m = case1();
    const ParamVector th(m, {0.15, 0.2, 0.5, 0.3, 0.5});
    const auto a = simulate_path(m, th, SimConfig{128, 42, 1});
    const auto b = simulate_path(m, th, SimConfig{128, 42, 1});
    const auto c = simulate_path(m, th, SimConfig{128, 42, 2});
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a.size() == 128);

    std::stringstream io;
    write_series_csv(io, a);
    CHECK(io.str().rfind("t,value\n1,", 0) == 0);
    CHECK(read_series_csv(io) == a);

    CHECK_THROWS_AS(simulate_path(m, ParamVector(m, {0.3, 0.3, 0.5, 0.3, 0.5}), SimConfig{64, 1, 1}),
                    InfeasibleError);
}

TEST_CASE("series CSV reader")
{
    std::istringstream plain("1.5\n-2\n3e-1\n");
    CHECK(read_series_csv(plain) == std::vector<double>{1.5, -2.0, 0.3});
    std::istringstream bad("t,value\n1,0.5\n2,abc\n");
    try {
        read_series_csv(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
    std::istringstream inf("t,value\n1,inf\n");
    CHECK_THROWS_AS(read_series_csv(inf), ConfigError);
}

TEST_CASE("kernel satisfies Cauchy-Schwarz and decays like a long-memory process")
{
    const auto m = case1();
    const ParamVector th(m, {0.15, 0.2, 0.5, 0.3, 0.5});
    const CovKernel K(m, th, 512);
    std::mt19937_64 gen(8);
    std::uniform_int_distribution<int> idx(1, 512);
    for (int rep = 0; rep < 500; ++rep) {
        const int s = idx(gen);
        const int t = idx(gen);
        CHECK(K(s, t) == K(t, s));
        CHECK(std::abs(K(s, t)) <= std::sqrt(K(s, s) * K(t, t)) * (1 + 1e-12));
    }

    const auto fn = arfima01(false);
    for (double d : {0.1, 0.3, 0.45}) {
        const ParamVector c(fn, {d, 1.0});
        const auto scaled = [&](int k) { return covariance(fn, c, 1 + k, 1, 1000) * std::pow(k, 1 - 2 * d); };
        CHECK(scaled(400) / scaled(200) == doctest::Approx(1.0).epsilon(0.1));
    }
}
