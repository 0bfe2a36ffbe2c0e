#include <doctest.h>

#include <cmath>

#include "ubatch/oracle.hpp"
#include "ubatch/oracle_check.hpp"

using namespace ubatch;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("enumeration limits are enforced") {
    auto grid = make_uniform_grid(0.2, 0.8, 3);
    auto prior = Prior::uniform(3);
    auto phi = ParamPoint::bernoulli(0.4);
    CHECK_THROWS_AS(oracle::enum_cond_div(phi, grid, prior, 15), OracleLimitError);
    CHECK_THROWS_AS(oracle::enum_combined_div(phi, grid, prior, 12, 4), OracleLimitError);
    ChannelGrid cg = {ChannelParam::bsc(0.2)};
    SupHypothesis th({HypothesisSet::interval(0, 1), HypothesisSet::interval(0, 1)});
    CHECK_THROWS_AS(
        oracle::enum_supervised(cg, Prior::uniform(1), th, FeatureDist::uniform_binary(), 7),
        OracleLimitError);
}

TEST_CASE("oracle trivia") {
    auto grid = make_uniform_grid(0.2, 0.8, 3);
    SUBCASE("point-mass prior has zero divergence to itself") {
        auto prior = Prior::point_mass(3, 1);
        CHECK(oracle::enum_cond_div(grid[1], grid, prior, 6) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("N = 1 is the one-symbol KL to the mixture mean") {
        auto prior = Prior::uniform(3);
        double mean = (0.2 + 0.5 + 0.8) / 3.0;
        auto phi = ParamPoint::bernoulli(0.35);
        CHECK(oracle::enum_cond_div(phi, grid, prior, 1) ==
              doctest::Approx(kl_single(phi, ParamPoint::bernoulli(mean))).epsilon(1e-12));
    }
    SUBCASE("matched single point gives zero bounds") {
        auto single = make_uniform_grid(0.5, 0.5, 1);
        auto b = oracle::enum_regret_terms(single, Prior::uniform(1),
                                           HypothesisSet::interval(0.5, 0.5), 4);
        CHECK(b.r_lower == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(b.r_upper == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("supervised oracle reductions") {
    ChannelGrid cg = {ChannelParam({{0.7, 0.3}, {0.7, 0.3}}),
                      ChannelParam({{0.4, 0.6}, {0.4, 0.6}})};
    SupHypothesis th({HypothesisSet::interval(0.0, 1.0), HypothesisSet::interval(0.0, 1.0)});
    Prior prior({0.5, 0.5});
    SUBCASE("point-mass prior zeroes the information term") {
        auto t = oracle::enum_supervised(cg, Prior::point_mass(2, 0), th,
                                         FeatureDist::uniform_binary(), 4);
        CHECK(t.mutual_info == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("degenerate features match the unsupervised oracle") {
        auto t = oracle::enum_supervised(cg, prior, th, FeatureDist({1.0, 0.0}), 4);
        std::vector<ParamPoint> pts = {ParamPoint::bernoulli(0.3),
                                       ParamPoint::bernoulli(0.6)};
        ParamGrid grid(pts, 0.0, 1.0);
        double unsup = 0.0;
        for (std::size_t j = 0; j < 2; ++j)
            unsup += 0.5 * oracle::enum_cond_div(grid[j], grid, prior, 4);
        CHECK(t.mutual_info == doctest::Approx(unsup).epsilon(1e-10));
    }
}

TEST_CASE("randomized equivalence sweep stays within tolerance") {
    auto res = run_oracle_check(/*seed=*/2024, /*cases_per_family=*/8, /*max_n=*/8);
    CHECK(res.cases >= 32);
    CHECK(res.pass);
    CHECK(res.max_abs_discrepancy <= 1e-10);
}

TEST_SUITE_END();
