#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <sstream>
#include <stdexcept>

#include "lsw/asymptotics.hpp"
#include "lsw/error.hpp"
#include "lsw/mcharness.hpp"
#include "lsw/simulator.hpp"

using namespace lsw;

namespace {

MCConfig small_config()
{
    MCConfig c;
    c.model = sec4_model();
    c.theta = ParamVector(c.model, {0.15, 0.2, 0.5, 0.3, 0.5});
    c.T = 128;
    c.N = 32;
    c.S = 16;
    c.reps = 6;
    c.seed = 99;
    return c;
}

std::string csv(const MCTable& t)
{
    std::ostringstream out;
    write_mc_csv(out, t);
    return out.str();
}

} // namespace

TEST_CASE("nearest plan logs substitutions")
{
    std::vector<std::string> notes;
    CHECK(nearest_plan(652, 256, 4, &notes).M == 100);
    CHECK(notes.empty());
    const auto p = nearest_plan(512, 105, 35, &notes);
    CHECK((512 - p.N) % p.S == 0);
    REQUIRE(notes.size() == 1);
    CHECK(notes[0] == "plan N=105 S=35 replaced by N=104 S=34 (M=13)");
    CHECK(nearest_plan(200, 200, 9).M == 1);
}

TEST_CASE("parallel_for covers every index and propagates errors")
{
    std::vector<int> hits(100, 0);
    parallel_for(100, 4, [&](int i) { hits[static_cast<std::size_t>(i)] += 1; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 100);
    std::atomic<int> calls{0};
    CHECK_THROWS_AS(parallel_for(50, 3,
                                 [&](int i) {
                                     ++calls;
                                     if (i == 7)
                                         throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
    CHECK(calls.load() <= 50);
    parallel_for(0, 4, [](int) { FAIL("no calls expected"); });
}

TEST_CASE("single replication reproduces the single fit")
{
    auto c = small_config();
    c.reps = 1;
    const auto table = run_mc(c);
    const auto y = simulate_path(c.model, c.theta, SimConfig{c.T, c.seed, 1});
    const auto fit = estimate(y, c.model, make_plan(c.T, c.N, c.S), taper_weights(c.taper, c.N));
    REQUIRE(table.rows.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(table.rows[i].mean_est == fit.theta[i]);
        CHECK(table.rows[i].emp_sd == 0.0);
        CHECK(table.rows[i].n_total == 1);
    }
}

TEST_CASE("tables are identical across worker counts")
{
    auto c = small_config();
    c.workers = 1;
    const auto one = run_mc(c);
    c.workers = 3;
    const auto three = run_mc(c);
    CHECK(csv(one) == csv(three));
    CHECK(one.estimates == three.estimates);

    const auto text = csv(one);
    CHECK(text.rfind("param,true,mean_est,emp_sd,theo_sd,n_converged,n_total\nalpha0,", 0) == 0);
    for (const auto& r : one.rows) {
        CHECK(r.emp_sd >= 0.0);
        CHECK(r.theo_sd > 0.0);
    }
    const auto se = asymptotic_se(gamma_closed(ClosedForm::sec4, c.model, c.theta), c.T);
    CHECK(one.rows[0].theo_sd == se.sd[0]);
}

TEST_CASE("run_mc errors")
{
    auto c = small_config();
    c.reps = 0;
    CHECK_THROWS_AS(run_mc(c), ConfigError);
    c = small_config();
    c.theta = ParamVector(c.model, {0.3, 0.3, 0.5, 0.3, 0.5});
    CHECK_THROWS_AS(run_mc(c), InfeasibleError);
    c = small_config();
    c.N = 200;
    CHECK_THROWS_AS(run_mc(c), PlanError);
}

TEST_CASE("grid cells are paired with the Monte Carlo table")
{
    const auto c = small_config();
    GridConfig g;
    g.model = c.model;
    g.theta = c.theta;
    g.T = c.T;
    g.N = IntRange{32, 32, 1};
    g.S = IntRange{16, 16, 1};
    g.reps = c.reps;
    g.seed = c.seed;
    const auto grid = mse_grid(g);
    REQUIRE(grid.cells.size() == 1);
    CHECK(grid.cells[0].M == 7);
    const auto table = run_mc(c);
    CHECK(grid.cells[0].mse == doctest::Approx(mean_squared_error(table, c.theta)).epsilon(1e-15));

    g.N = IntRange{30, 34, 1};
    g.S = IntRange{15, 17, 1};
    g.workers = 1;
    const auto a = mse_grid(g);
    g.workers = 2;
    const auto b = mse_grid(g);
    std::ostringstream sa, sb;
    write_grid_csv(sa, a);
    write_grid_csv(sb, b);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().rfind("N,S,M,mse,reps\n", 0) == 0);
    for (const auto& cell : a.cells) {
        CHECK(plan_is_valid(g.T, cell.N, cell.S));
        CHECK(cell.mse >= 0.0);
    }

    g.N = IntRange{100, 101, 1};
    g.S = IntRange{50, 60, 1};
    CHECK_THROWS_AS(mse_grid(g), PlanError);
}

TEST_CASE("empirical spread tracks the asymptotic standard errors")
{
    MCConfig c;
    c.model = sec4_model();
    c.theta = ParamVector(c.model, {0.15, 0.2, 0.5, 0.3, 0.5});
    c.T = 1024;
    c.N = 196;
    c.S = 46;
    c.reps = 500;
    c.seed = 77;
    const auto table = run_mc(c);
    for (const auto& r : table.rows) {
        CAPTURE(r.param);
        CHECK(r.emp_sd / r.theo_sd >= 0.7);
        CHECK(r.emp_sd / r.theo_sd <= 1.6);
    }
}
