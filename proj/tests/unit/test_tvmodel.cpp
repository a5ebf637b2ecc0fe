#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "lsw/config.hpp"
#include "lsw/error.hpp"
#include "lsw/model_io.hpp"
#include "lsw/tvmodel.hpp"

using namespace lsw;

namespace {

const char* kCase1 = R"(
# comment line
d.degree = 1
d.coeffs = 0.15, 0.20     # trailing comment
sigma.degree = 1
sigma.coeffs = 0.5,0.3
ma.degree = 0
ma.coeffs = 0.5
)";

ModelSpec arma_model()
{
    ModelSpec m;
    m.d.basis = BasisSpec::polynomial(1);
    m.sigma.basis = BasisSpec::polynomial(1);
    m.sigma.link = LinkSpec::log;
    m.ar = CurveSpec{BasisSpec::polynomial(1), LinkSpec::identity, {}};
    m.ma = CurveSpec{BasisSpec::harmonic({2.0}), LinkSpec::identity, {}};
    return m;
}

// f from the complex transfer function, independent of the library's
// real-valued expansion.
double direct_density(double d, double sigma, double phi, double vartheta, double lambda)
{
    const std::complex<double> z = std::polar(1.0, -lambda);
    const double ma = std::norm(1.0 - vartheta * z);
    const double ar = std::norm(1.0 + phi * z);
    return sigma * sigma / (2.0 * std::numbers::pi) * ma / ar * std::pow(std::abs(1.0 - z), -2.0 * d);
}

} // namespace

TEST_CASE("config parses comments, whitespace and typed values")
{
    const auto cfg = KeyValueConfig::parse_string(kCase1);
    CHECK(cfg.get("d.degree") == "1");
    CHECK(cfg.get_doubles("d.coeffs") == std::vector<double>{0.15, 0.20});
    CHECK(cfg.get_int("ma.degree") == 0);
    CHECK_FALSE(cfg.has("ar.coeffs"));
    CHECK(cfg.get_or("plan.taper", "cosine") == "cosine");
}

TEST_CASE("config errors name the key or line")
{
    CHECK_THROWS_AS(KeyValueConfig::parse_string("a=1\na=2\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse_string("no equals sign\n"), ConfigError);
    const auto cfg = KeyValueConfig::parse_string("x = abc\nflag = maybe\n");
    try {
        cfg.get_double("x");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("x") != std::string::npos);
    }
    CHECK_THROWS_AS(cfg.get_bool("flag"), ConfigError);
    CHECK_THROWS_AS(cfg.get("missing"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("config write re-parses to an equal config")
{
    const auto cfg = KeyValueConfig::parse_string(kCase1);
    std::ostringstream out;
    cfg.write(out);
    CHECK(KeyValueConfig::parse_string(out.str()) == cfg);
    CHECK(cfg.unknown_keys(model_keys()).empty());
    auto extra = cfg;
    extra.set("d.colour", "red");
    CHECK(extra.unknown_keys(model_keys()) == std::vector<std::string>{"d.colour"});
}

TEST_CASE("integer ranges")
{
    CHECK(parse_range("85:135", "grid.N").values().size() == 51);
    CHECK(parse_range("1:10:3", "r").values() == std::vector<int>{1, 4, 7, 10});
    CHECK(parse_range("10:1", "r").values().empty());
    CHECK_THROWS_AS(parse_range("5", "r"), ConfigError);
    CHECK_THROWS_AS(parse_range("1:x", "r"), ConfigError);
    CHECK_THROWS_AS(parse_range("1:5:0", "r"), ConfigError);
}

TEST_CASE("format_double round-trips")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9})
        CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("model config round trip")
{
    const auto mp = parse_model(KeyValueConfig::parse_string(kCase1));
    CHECK(mp.model.dimension() == 5);
    CHECK(mp.model.parameter_names() == std::vector<std::string>{"alpha0", "alpha1", "beta0", "beta1", "theta0"});
    CHECK(mp.theta[4] == 0.5);
    KeyValueConfig written;
    write_model(mp.model, mp.theta, written);
    const auto again = parse_model(written);
    CHECK(again.model == mp.model);
    CHECK(std::vector<double>(again.theta.values().begin(), again.theta.values().end())
          == std::vector<double>(mp.theta.values().begin(), mp.theta.values().end()));

    const auto m = arma_model();
    const ParamVector th(m, {0.1, 0.2, -0.5, 0.3, 0.2, -0.1, 0.3, 0.1});
    KeyValueConfig c2;
    write_model(m, th, c2);
    CHECK(parse_model(c2).model == m);
}

TEST_CASE("model config errors")
{
    CHECK_THROWS_AS(parse_model(KeyValueConfig::parse_string("d.coeffs=0.1,0.2\nsigma.coeffs=1\n")), ConfigError);
    CHECK_THROWS_AS(parse_model(KeyValueConfig::parse_string("d.basis=spline\nd.coeffs=0.1\nsigma.coeffs=1\n")),
                    ConfigError);
    CHECK_THROWS_AS(parse_model(KeyValueConfig::parse_string("d.coeffs=0.1\nsigma.coeffs=1\nma.degree=0\n")),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_model(KeyValueConfig::parse_string("d.coeffs=0.1\nsigma.coeffs=1\nd.powers=0\nd.degree=0\n")),
        ConfigError);
}

TEST_CASE("fixed curves contribute no parameters")
{
    const auto mp = parse_model(
        KeyValueConfig::parse_string("d.degree=1\nd.coeffs=0.1,0.2\nsigma.coeffs=1\nsigma.fixed=true\n"));
    CHECK(mp.model.dimension() == 2);
    CHECK(mp.theta.coeffs(Component::sigma).empty());
    CHECK(local_params(mp.model, mp.theta, 0.5).sigma == 1.0);
}

TEST_CASE("basis values and Gram matrices")
{
    const auto p = BasisSpec::polynomial(2);
    CHECK(p.values(0.5)(2) == doctest::Approx(0.25));
    const Eigen::MatrixXd g = p.gram();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(g(i, j) - 1.0 / (i + j + 1)) < 1e-14);

    const auto h = BasisSpec::harmonic({1.5});
    CHECK(h.size() == 2);
    CHECK(h.value(1, 0.4) == doctest::Approx(std::cos(0.6)));
    CHECK(h.gram()(1, 1) == doctest::Approx(0.5 + std::sin(3.0) / 6.0).epsilon(1e-13));

    CHECK_THROWS_AS(BasisSpec::monomials({1, 1}).check_gram(), ConfigError);
    CHECK_THROWS_AS(BasisSpec::harmonic({1.0, -1.0}), ConfigError);
    CHECK_THROWS_AS(BasisSpec::polynomial(-1), ConfigError);
}

TEST_CASE("links and curve evaluation")
{
    CurveSpec c{BasisSpec::polynomial(1), LinkSpec::log, {}};
    const std::vector<double> coeffs{std::log(0.2), 0.5};
    CHECK(eval_curve(c, coeffs, 1.0) == doctest::Approx(0.2 * std::exp(0.5)));
    CHECK(link_inverse_derivative(LinkSpec::log, 0.3) == doctest::Approx(std::exp(0.3)));
    CHECK(link_inverse_derivative(LinkSpec::identity, 0.3) == 1.0);
    CHECK_THROWS_AS(eval_curve(c, coeffs, 1.5), DimensionError);
    CHECK_THROWS_AS(eval_curve(c, std::vector<double>{1.0}, 0.5), DimensionError);
}

TEST_CASE("parameter vector checks")
{
    const auto m = arma_model();
    CHECK(m.dimension() == 8);
    CHECK_THROWS_AS(ParamVector(m, {0.1}), DimensionError);
    CHECK_THROWS_AS(ParamVector(m, {0.1, 0.2, -0.5, 0.3, 0.2, -0.1, NAN, 0.1}), DimensionError);
    const auto slots = m.slots();
    CHECK(slots.size() == 4);
    CHECK(slots[3] == Slot{Component::ma, 6, 2});
}

TEST_CASE("constraint validation")
{
    const auto mp = parse_model(KeyValueConfig::parse_string(kCase1));
    CHECK(validate_params(mp.model, mp.theta).feasible);
    const auto bad = ParamVector(mp.model, {0.3, 0.3, 0.5, 0.3, 0.5});
    const auto report = validate_params(mp.model, bad);
    CHECK_FALSE(report.feasible);
    CHECK(report.violations.front().component == Component::d);
    CHECK(report.describe().find("d(u=") != std::string::npos);
    CHECK_FALSE(validate_params(mp.model, ParamVector(mp.model, {0.1, 0.1, 0.5, -0.6, 0.5})).feasible);
    CHECK_FALSE(validate_params(mp.model, ParamVector(mp.model, {0.1, 0.1, 0.5, 0.3, 1.0})).feasible);
}

TEST_CASE("spectral density matches the complex transfer function")
{
    const auto m = arma_model();
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const ParamVector th(m, {0.2 + 0.05 * unif(gen), 0.1 * unif(gen), 0.3 * unif(gen), 0.2 * unif(gen),
                                 0.3 * unif(gen), 0.2 * unif(gen), 0.3 * unif(gen), 0.2 * unif(gen)});
        const double u = 0.5 + 0.5 * unif(gen);
        const double lambda = std::numbers::pi * (0.5 + 0.49 * unif(gen)) * (rep % 2 ? 1 : -1);
        const LocalParams p = local_params(m, th, u);
        const double want = direct_density(p.d, p.sigma, p.ar, p.ma, lambda);
        CHECK(spectral_density(m, th, u, lambda) == doctest::Approx(want).epsilon(1e-12));
    }
    const ParamVector th(m, std::vector<double>(8, 0.1));
    CHECK_THROWS_AS(spectral_density(m, th, 0.5, 0.0), DimensionError);
    CHECK_THROWS_AS(spectral_density(m, th, 0.5, 3.2), DimensionError);
}

TEST_CASE("log-density gradient matches finite differences")
{
    for (LinkSpec dlink : {LinkSpec::identity, LinkSpec::log}) {
        ModelSpec m = arma_model();
        m.d.link = dlink;
        const double d0 = dlink == LinkSpec::log ? std::log(0.2) : 0.2;
        const ParamVector th(m, {d0, 0.05, -0.4, 0.2, 0.3, -0.1, 0.25, 0.1});
        for (double u : {0.0, 0.37, 1.0})
            for (double lambda : {0.01, 1.0, 3.1}) {
                const Eigen::VectorXd g = log_spectral_gradient(m, th, u, lambda);
                for (std::size_t i = 0; i < th.size(); ++i) {
                    const double h = 1e-5;
                    const double fd = (std::log(spectral_density(m, th.with_value(i, th[i] + h), u, lambda))
                                       - std::log(spectral_density(m, th.with_value(i, th[i] - h), u, lambda)))
                                      / (2 * h);
                    CHECK(g(static_cast<Eigen::Index>(i)) == doctest::Approx(fd).epsilon(1e-6));
                }
            }
    }
}

TEST_CASE("spectral density is even and has the long-memory pole")
{
    const auto m = arma_model();
    const ParamVector th(m, {0.2, 0.1, -0.4, 0.2, 0.3, -0.1, 0.25, 0.1});
    for (double u : {0.0, 0.4, 1.0})
        for (double lambda : {0.003, 0.5, 2.0, 3.14}) {
            CHECK(spectral_density(m, th, u, lambda) == spectral_density(m, th, u, -lambda));
            CHECK(spectral_density(m, th, u, lambda) > 0.0);
        }
    for (double u : {0.1, 0.8}) {
        const double d = local_params(m, th, u).d;
        const auto scaled = [&](double lambda) { return spectral_density(m, th, u, lambda) * std::pow(lambda, 2 * d); };
        CHECK(scaled(1e-3) / scaled(1e-2) == doctest::Approx(1.0).epsilon(0.01));
        CHECK(scaled(1e-4) / scaled(1e-3) == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("gradient of a linear memory curve at random points")
{
    ModelSpec m;
    m.d.basis = BasisSpec::polynomial(1);
    m.sigma.basis = BasisSpec::polynomial(0);
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const double a0 = 0.05 + 0.2 * unif(gen);
        const ParamVector th(m, {a0, 0.2 * unif(gen), 0.5 + unif(gen)});
        const double u = unif(gen);
        const double lambda = 0.05 + 3.0 * unif(gen);
        const Eigen::VectorXd g = log_spectral_gradient(m, th, u, lambda);
        for (std::size_t i = 0; i < 2; ++i) {
            const double h = 1e-6;
            const double fd = (std::log(spectral_density(m, th.with_value(i, th[i] + h), u, lambda))
                               - std::log(spectral_density(m, th.with_value(i, th[i] - h), u, lambda)))
                              / (2 * h);
            CHECK(g(static_cast<Eigen::Index>(i)) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("log link stays positive")
{
    CurveSpec c{BasisSpec::polynomial(2), LinkSpec::log, {}};
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> unif(-50.0, 50.0);
    for (int rep = 0; rep < 200; ++rep) {
        const std::vector<double> coeffs{unif(gen), unif(gen), unif(gen)};
        for (double u : {0.0, 0.3, 1.0})
            CHECK(eval_curve(c, coeffs, u) >= 0.0);
    }
    CHECK(eval_curve(c, std::vector<double>{-3.0, 1.0, 0.5}, 0.5) > 0.0);
}
