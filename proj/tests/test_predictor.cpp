#include <doctest.h>

#include <cmath>

#include "ubatch/predictor.hpp"

using namespace ubatch;

TEST_SUITE_BEGIN("predictor");

TEST_CASE("point-mass prior predicts its component at every count") {
    auto grid = make_uniform_grid(0.0, 1.0, 11);
    auto prior = Prior::point_mass(grid.size(), 3);  // phi = 0.3
    auto table = predictive_from_prior(grid, prior, 9);
    for (std::int64_t k = 0; k <= table.horizon; ++k)
        CHECK(table.q1(k) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("uniform prior is symmetric at the balanced count") {
    auto grid = make_uniform_grid(0.0, 1.0, 2001);
    auto prior = Prior::uniform(grid.size());
    auto table = predictive_from_prior(grid, prior, 3);  // horizon 2
    CHECK(table.q1(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("dense uniform prior approaches the add-one rule") {
    // (k+1)/(n+2) in the M -> infinity limit. The extreme count classes keep
    // an O(1/M) contribution from the boundary atoms, so the error there
    // must shrink with the grid.
    auto q_at = [](std::int64_t M, std::int64_t N, std::int64_t k) {
        auto grid = make_uniform_grid(0.0, 1.0, M);
        auto table = predictive_from_prior(grid, Prior::uniform(grid.size()), N);
        return table.q1(k);
    };
    double coarse = q_at(2001, 3, 2);
    double fine = q_at(8001, 3, 2);
    CHECK(coarse == doctest::Approx(0.75).epsilon(5e-4));
    CHECK(std::abs(fine - 0.75) < 0.5 * std::abs(coarse - 0.75));
    CHECK(q_at(2001, 3, 0) == doctest::Approx(0.25).epsilon(5e-4));
    // Interior count class: boundary likelihoods vanish, quadrature-grade.
    CHECK(q_at(2001, 11, 7) == doctest::Approx(8.0 / 12.0).epsilon(1e-5));
}

TEST_CASE("rows sum to one") {
    auto grid = make_uniform_grid(0.05, 0.95, 37);
    std::vector<double> w(grid.size(), 0.0);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = double(j + 1);
    double s = 0.0;
    for (double x : w) s += x;
    for (auto& x : w) x /= s;
    double s2 = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) s2 += w[i];
    w.back() = 1.0 - s2;
    auto table = predictive_from_prior(grid, Prior(w), 12);
    for (std::size_t c = 0; c < table.num_classes(); ++c) {
        auto row = table.row(c);
        CHECK(row[0] + row[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("seq_log_marginal basics") {
    auto grid = make_uniform_grid(0.0, 1.0, 11);
    SUBCASE("point mass equals the component weight") {
        auto prior = Prior::point_mass(grid.size(), 7);  // 0.7
        auto stat = SuffStat::binary(2, 3);
        CHECK(seq_log_marginal(grid, prior, stat) ==
              doctest::Approx(log_count_weight(grid[7], stat)).epsilon(1e-13));
    }
    SUBCASE("two-point prior on the degenerate coins") {
        std::vector<double> w(grid.size(), 0.0);
        w.front() = 0.5;
        w.back() = 0.5;
        // All-zeros batch: only phi = 0 survives.
        CHECK(seq_log_marginal(grid, Prior(w), SuffStat::binary(6, 0)) ==
              doctest::Approx(std::log(0.5)).epsilon(1e-13));
    }
}

TEST_CASE("seq_log_marginal approximates the Beta integral") {
    auto grid = make_uniform_grid(0.0, 1.0, 2001);
    auto prior = Prior::uniform(grid.size());
    // C(4,2) * Integral phi^2 (1-phi)^2 dphi = 6 B(3,3) = 0.2; the grid sum
    // carries a 1/M quadrature offset.
    double v = std::exp(seq_log_marginal(grid, prior, SuffStat::binary(2, 2)));
    CHECK(v == doctest::Approx(0.2).epsilon(1e-3));
    CHECK(std::abs(v - 0.2) < 2e-4);
}

TEST_CASE("predictive marginal chain rule over count classes") {
    // M_{n+1}(k+1) = M_n(k) Q(1|k) + M_n(k+1) Q(0|k+1).
    auto grid = make_uniform_grid(0.1, 0.9, 17);
    std::vector<double> w(grid.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = (j % 3 == 0) ? 2.0 : 1.0;
    double s = 0.0;
    for (double x : w) s += x;
    for (auto& x : w) x /= s;
    double s2 = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) s2 += w[i];
    w.back() = 1.0 - s2;
    Prior prior(w);

    for (std::int64_t n : {1, 5, 20}) {
        auto table = predictive_from_prior(grid, prior, n + 1);  // horizon n
        for (std::int64_t k = 0; k + 1 <= n + 1 && k <= n; ++k) {
            double m_n_k = std::exp(seq_log_marginal(grid, prior, SuffStat::binary(n - k, k)));
            double lhs = m_n_k * table.q1(k);
            if (k + 1 <= n) {
                double m_n_k1 =
                    std::exp(seq_log_marginal(grid, prior, SuffStat::binary(n - k - 1, k + 1)));
                lhs += m_n_k1 * (1.0 - table.q1(k + 1));
            }
            double rhs = std::exp(
                seq_log_marginal(grid, prior, SuffStat::binary(n - k, k + 1)));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("add_beta inverts a synthetic add-beta table") {
    const std::int64_t n = 12;
    PredictiveTable table;
    table.alphabet = 2;
    table.horizon = n;
    table.classes = std::make_shared<CountClassTable>(2, n);
    table.flagged.assign(table.num_classes(), 0);
    table.q.resize(table.num_classes() * 2);
    const double beta0 = 0.5;
    for (std::int64_t k = 0; k <= n; ++k) {
        double q1 = (double(k) + beta0) / (double(n) + 2.0 * beta0);
        table.q[std::size_t(k) * 2 + 1] = q1;
        table.q[std::size_t(k) * 2 + 0] = 1.0 - q1;
    }
    for (std::int64_t k = 0; k <= n; ++k) {
        auto r = add_beta(table, k);
        if (2 * k == n) continue;  // symmetric point lands on the singularity guard? no: q1 = 0.5 only if k = n/2
        CHECK_FALSE(r.singular);
        CHECK(r.beta == doctest::Approx(beta0).epsilon(1e-9));
        // Reconstruction: substituting beta back reproduces the entry.
        double q = (double(k) + r.beta) / (double(n) + 2.0 * r.beta);
        CHECK(q == doctest::Approx(table.q1(k)).epsilon(1e-9));
    }
    // k = n/2 gives Q = 1/2 exactly: singular.
    CHECK(add_beta(table, n / 2).singular);
}

TEST_CASE("beta_curve on a constant-beta table is flat") {
    const std::int64_t n = 9;
    PredictiveTable table;
    table.alphabet = 2;
    table.horizon = n;
    table.classes = std::make_shared<CountClassTable>(2, n);
    table.flagged.assign(table.num_classes(), 0);
    table.q.resize(table.num_classes() * 2);
    const double beta0 = 1.3;
    for (std::int64_t k = 0; k <= n; ++k) {
        double q1 = (double(k) + beta0) / (double(n) + 2.0 * beta0);
        table.q[std::size_t(k) * 2 + 1] = q1;
        table.q[std::size_t(k) * 2 + 0] = 1.0 - q1;
    }
    auto curve = beta_curve(table);
    REQUIRE(curve.beta.size() == std::size_t(n + 1));
    for (std::size_t i = 0; i < curve.beta.size(); ++i) {
        CHECK_FALSE(curve.singular[i]);
        CHECK(curve.beta[i] == doctest::Approx(beta0).epsilon(1e-9));
        if (i > 0) CHECK(curve.p_emp[i] > curve.p_emp[i - 1]);
    }
}

TEST_CASE("flagged rows refuse queries") {
    // Prior fully on the two degenerate coins: mixed-count classes have zero
    // marginal and must be flagged.
    auto grid = make_uniform_grid(0.0, 1.0, 3);
    Prior prior({0.5, 0.0, 0.5});
    auto table = predictive_from_prior(grid, prior, 4);  // horizon 3
    CHECK_FALSE(table.is_flagged(0));
    CHECK_FALSE(table.is_flagged(3));
    CHECK(table.is_flagged(1));
    CHECK(table.is_flagged(2));
    CHECK_THROWS_AS(table.row(1), std::logic_error);
}

TEST_CASE("prior validation") {
    CHECK_THROWS_AS(Prior({0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(Prior({-0.1, 1.1}), std::invalid_argument);
    CHECK(Prior::uniform(7).is_valid());
}

TEST_SUITE_END();
