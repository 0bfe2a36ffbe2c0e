#include <doctest.h>

#include <cmath>

#include "ubatch/experiments.hpp"
#include "ubatch/oracle.hpp"
#include "ubatch/solver.hpp"

using namespace ubatch;

TEST_SUITE_BEGIN("solver");

TEST_CASE("single matched model has zero regret in one pass") {
    SolverConfig cfg;
    cfg.grid = make_uniform_grid(0.3, 0.3, 1);
    cfg.theta = HypothesisSet::interval(0.3, 0.3);
    cfg.N = 10;
    auto rep = solve(cfg);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.r_lower == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.r_upper == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ab_step hand-evaluated reweighting") {
    DivergenceProfile prof;
    prof.to_predictor = {0.0, std::log(2.0)};
    prof.to_set = {0.0, 0.0};
    prof.d = {0.0, std::log(2.0)};
    Prior prior({0.5, 0.5});
    auto next = ab_step(prior, prof, 1.0);
    CHECK(next.w[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(next.w[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    SUBCASE("uniform profile leaves the prior unchanged") {
        prof.d = {0.7, 0.7};
        auto same = ab_step(prior, prof, 1.0);
        CHECK(same.w[0] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("zero step leaves the prior unchanged") {
        prof.d = {0.0, std::log(2.0)};
        auto same = ab_step(Prior({0.25, 0.75}), prof, 0.0);
        CHECK(same.w[0] == 0.25);
        CHECK(same.w[1] == 0.75);
    }
}

TEST_CASE("bounds equal the oracle on a small instance") {
    std::vector<ParamPoint> pts = {ParamPoint::bernoulli(0.2), ParamPoint::bernoulli(0.5),
                                   ParamPoint::bernoulli(0.8)};
    ParamGrid grid(pts, 0.0, 1.0);
    Prior prior({0.2, 0.5, 0.3});
    auto theta = HypothesisSet::interval(0.4, 0.6);
    auto fast = bounds(grid, prior, theta, 5);
    auto slow = oracle::enum_regret_terms(grid, prior, theta, 5);
    CHECK(fast.r_lower == doctest::Approx(slow.r_lower).epsilon(1e-10));
    CHECK(fast.r_upper == doctest::Approx(slow.r_upper).epsilon(1e-10));
    CHECK(fast.r_lower <= fast.r_upper);

    SUBCASE("hypothesis set collapsed to the middle grid point") {
        auto mid = HypothesisSet::subgrid(ParamGrid({pts[1]}, 0.0, 1.0));
        auto f2 = bounds(grid, prior, mid, 5);
        auto s2 = oracle::enum_regret_terms(grid, prior, mid, 5);
        CHECK(f2.r_lower == doctest::Approx(s2.r_lower).epsilon(1e-10));
        CHECK(f2.r_upper == doctest::Approx(s2.r_upper).epsilon(1e-10));
    }
}

TEST_CASE("Theta = Phi lower bound is the mutual information") {
    auto grid = make_uniform_grid(0.0, 1.0, 51);
    auto prior = Prior::uniform(grid.size());
    auto theta = HypothesisSet::interval(0.0, 1.0);
    auto b = bounds(grid, prior, theta, 6);
    auto table = predictive_from_prior(grid, prior, 6);
    CHECK(b.r_lower == doctest::Approx(mutual_info(grid, prior, table, 6)).epsilon(1e-12));
    CHECK(b.r_lower >= 0.0);
}

TEST_CASE("invariants hold at every iteration") {
    SolverConfig cfg;
    cfg.grid = make_uniform_grid(0.0, 1.0, 101);
    cfg.theta = HypothesisSet::interval(0.3, 0.7);
    cfg.N = 30;
    cfg.lambda = 60.0;
    cfg.epsilon = 1e-7;
    std::int64_t seen = 0;
    IterationCallback cb = [&](const SolverState& st) {
        ++seen;
        CHECK(st.r_lower <= st.r_upper + 1e-12);
        CHECK(st.prior->is_valid());
    };
    auto rep = solve(cfg, &cb);
    CHECK(seen == rep.iterations);
    CHECK(rep.converged);
    CHECK(rep.cert_ok);
    CHECK(rep.gap() <= cfg.resolved_epsilon());
    CHECK(rep.r_lower >= -cfg.resolved_epsilon());
    CHECK(rep.final_prior.is_valid());
}

TEST_CASE("stochastic reduction matches capacity bit-for-bit") {
    SolverConfig cfg;
    cfg.grid = make_uniform_grid(0.2, 0.8, 301);
    cfg.theta = HypothesisSet::interval(0.2, 0.8);
    cfg.N = 25;
    cfg.lambda = 50.0;
    cfg.epsilon = 1e-7;
    auto via_solve = solve(cfg);

    SolverParams p;
    p.grid_m = 301;
    p.lambda = 50.0;
    p.epsilon = 1e-7;
    auto via_capacity = capacity(cfg.grid, 25, p);

    CHECK(via_solve.r_lower == via_capacity.r_lower);
    CHECK(via_solve.r_upper == via_capacity.r_upper);
    CHECK(via_solve.iterations == via_capacity.iterations);
    REQUIRE(via_solve.final_prior.size() == via_capacity.final_prior.size());
    for (std::size_t j = 0; j < via_solve.final_prior.size(); ++j)
        CHECK(via_solve.final_prior.w[j] == via_capacity.final_prior.w[j]);
}

TEST_CASE("identical configs give identical reports") {
    SolverConfig cfg;
    cfg.grid = make_uniform_grid(0.0, 1.0, 201);
    cfg.theta = HypothesisSet::interval(0.25, 0.75);
    cfg.N = 40;
    cfg.lambda = 80.0;
    cfg.epsilon = 1e-7;
    auto a = solve(cfg);
    auto b = solve(cfg);
    CHECK(a.r_lower == b.r_lower);
    CHECK(a.r_upper == b.r_upper);
    CHECK(a.iterations == b.iterations);
    for (std::size_t j = 0; j < a.final_prior.size(); ++j)
        CHECK(a.final_prior.w[j] == b.final_prior.w[j]);
}

TEST_CASE("two-thread run matches itself") {
    SolverConfig cfg;
    cfg.grid = make_uniform_grid(0.0, 1.0, 151);
    cfg.theta = HypothesisSet::interval(0.3, 0.6);
    cfg.N = 20;
    cfg.lambda = 40.0;
    cfg.epsilon = 1e-7;
    cfg.threads = 2;
    auto a = solve(cfg);
    auto b = solve(cfg);
    CHECK(a.r_lower == b.r_lower);
    CHECK(a.iterations == b.iterations);
    for (std::size_t j = 0; j < a.final_prior.size(); ++j)
        CHECK(a.final_prior.w[j] == b.final_prior.w[j]);
}

TEST_CASE("non-convergence is reported, not thrown") {
    SolverConfig cfg;
    cfg.grid = make_uniform_grid(0.0, 1.0, 101);
    cfg.theta = HypothesisSet::interval(0.25, 0.75);
    cfg.N = 30;
    cfg.lambda = 1.0;  // module default: far too slow to converge in 5 passes
    cfg.epsilon = 1e-12;
    cfg.max_iters = 5;
    auto rep = solve(cfg);
    CHECK_FALSE(rep.converged);
    CHECK(rep.iterations == 5);
    CHECK(rep.r_lower <= rep.r_upper);
    CHECK(rep.cert_ok);
}

TEST_CASE("gap history is sampled every hundred iterations") {
    SolverConfig cfg;
    cfg.grid = make_uniform_grid(0.0, 1.0, 101);
    cfg.theta = HypothesisSet::interval(0.25, 0.75);
    cfg.N = 30;
    cfg.lambda = 5.0;
    cfg.epsilon = 1e-12;
    cfg.max_iters = 250;
    auto rep = solve(cfg);
    REQUIRE(rep.gap_history.size() >= 3);
    CHECK(rep.gap_history[0].iteration == 1);
    CHECK(rep.gap_history[1].iteration == 100);
    CHECK(rep.gap_history[2].iteration == 200);
    CHECK(rep.gap_history.back().iteration == rep.iterations);
    for (const auto& s : rep.gap_history) CHECK(s.r_lower <= s.r_upper + 1e-12);
}

TEST_CASE("sandwich on a small instance") {
    SolverParams p;
    p.grid_m = 201;
    p.lambda = 60.0;
    p.epsilon = 5e-7;
    auto res = verify_sandwich(HypothesisSet::interval(0.25, 0.75), 0.0, 1.0, 30, 0.1, p);
    CHECK(res.all_converged);
    CHECK(res.holds_within_tol);
    CHECK(res.c_theta.midpoint() <= res.regret.midpoint() + 1e-6);
    CHECK(res.regret.midpoint() <= res.c_theta_eps.midpoint() + 1e-6);
    CHECK(res.theta_eps.a < 0.25);
    CHECK(res.theta_eps.b > 0.75);

    SUBCASE("Theta = Phi collapses the triple") {
        auto flat = verify_sandwich(HypothesisSet::interval(0.0, 1.0), 0.0, 1.0, 20, 0.1, p);
        CHECK(std::abs(flat.c_theta.midpoint() - flat.regret.midpoint()) < 1e-5);
        CHECK(std::abs(flat.c_theta_eps.midpoint() - flat.regret.midpoint()) < 1e-5);
    }
}

TEST_CASE("converged prior concentrates on the epsilon shell") {
    // Misspecified run: mass must settle inside Theta_eps.
    SolverConfig cfg;
    cfg.grid = make_uniform_grid(0.0, 1.0, 501);
    cfg.theta = HypothesisSet::interval(0.25, 0.75);
    cfg.N = 100;
    cfg.lambda = 200.0;
    cfg.epsilon = 1e-4 / 200.0;
    auto rep = solve(cfg);
    REQUIRE(rep.converged);
    double eps_n = std::pow(100.0, -0.9);
    auto shell = theta_epsilon(cfg.theta, eps_n, 0.0, 1.0);
    double inside = 0.0;
    for (std::size_t j = 0; j < cfg.grid.size(); ++j) {
        double pphi = cfg.grid[j].success();
        if (pphi >= shell.a && pphi <= shell.b) inside += rep.final_prior.w[j];
    }
    CHECK(inside >= 0.95);
}

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    cfg.grid = make_uniform_grid(0.0, 1.0, 11);
    cfg.theta = HypothesisSet::interval(0.0, 1.0);
    cfg.N = 0;
    CHECK_THROWS_AS(solve(cfg), std::invalid_argument);
    cfg.N = 5;
    cfg.lambda = -1.0;
    CHECK_THROWS_AS(solve(cfg), std::invalid_argument);
    cfg.lambda = 1.0;
    cfg.max_iters = 0;
    CHECK_THROWS_AS(solve(cfg), std::invalid_argument);
    cfg.max_iters = 10;
    cfg.init_prior = Prior::uniform(7);  // wrong size
    CHECK_THROWS_AS(solve(cfg), std::invalid_argument);
}

TEST_SUITE_END();
