#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ubatch/combined.hpp"
#include "ubatch/oracle.hpp"
#include "ubatch/solver.hpp"
#include "ubatch/supervised.hpp"

namespace ubatch {

struct OracleCheckResult {
    std::int64_t cases = 0;
    double max_abs_discrepancy = 0.0;
    bool pass = false;
    double tolerance = 1e-10;
};

namespace detail {

inline ParamPoint random_point(std::mt19937_64& rng, int alphabet) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(static_cast<std::size_t>(alphabet), 0.0);
    double s = 0.0;
    for (auto& v : p) {
        v = u(rng) + 1e-3;
        s += v;
    }
    for (auto& v : p) v /= s;
    // Exact renormalization so ParamPoint's sum invariant holds.
    double s2 = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) s2 += p[i];
    p.back() = 1.0 - s2;
    return ParamPoint(p);
}

inline ParamGrid random_grid(std::mt19937_64& rng, int alphabet, std::size_t m) {
    if (alphabet == 2) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> succ;
        while (succ.size() < m) {
            double v = u(rng);
            bool dup = false;
            for (double x : succ) dup = dup || std::abs(x - v) < 1e-9;
            if (!dup) succ.push_back(v);
        }
        std::sort(succ.begin(), succ.end());
        std::vector<ParamPoint> pts;
        for (double v : succ) pts.push_back(ParamPoint::bernoulli(v));
        return ParamGrid(std::move(pts), 0.0, 1.0);
    }
    std::vector<ParamPoint> pts;
    while (pts.size() < m) {
        auto cand = random_point(rng, alphabet);
        bool dup = false;
        for (const auto& q : pts) dup = dup || q == cand;
        if (!dup) pts.push_back(cand);
    }
    return ParamGrid(std::move(pts), 0.0, 1.0);
}

inline Prior random_prior(std::mt19937_64& rng, std::size_t m) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> w(m);
    double s = 0.0;
    for (auto& v : w) {
        v = u(rng);
        s += v;
    }
    for (auto& v : w) v /= s;
    double s2 = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) s2 += w[i];
    w.back() = 1.0 - s2;
    return Prior(std::move(w));
}

inline HypothesisSet random_interval(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    return HypothesisSet::interval(a, b);
}

}  // namespace detail

// Randomized equivalence suite: every sufficient-statistic fast path against
// its exhaustive-enumeration reference. Seeded and deterministic.
inline OracleCheckResult run_oracle_check(std::uint64_t seed, std::int64_t cases_per_family,
                                          std::int64_t max_n) {
    if (max_n < 1 || max_n > OracleLimits::kMaxUnsupervisedLength)
        throw OracleLimitError("oracle-check N must be in 1.." +
                               std::to_string(OracleLimits::kMaxUnsupervisedLength));
    std::mt19937_64 rng(seed);
    OracleCheckResult res;
    auto note = [&res](double fast, double slow) {
        res.max_abs_discrepancy = std::max(res.max_abs_discrepancy, std::abs(fast - slow));
        res.cases++;
    };
    std::uniform_int_distribution<int> msize(1, 5);

    // Conditional divergence to the mixture predictor.
    for (std::int64_t c = 0; c < cases_per_family; ++c) {
        int alphabet = (c % 3 == 2) ? 3 : 2;
        std::int64_t ncap = alphabet == 2 ? std::min<std::int64_t>(max_n, 10)
                                          : std::min<std::int64_t>(max_n, 7);
        std::uniform_int_distribution<std::int64_t> nn(1, ncap);
        std::int64_t N = nn(rng);
        auto grid = detail::random_grid(rng, alphabet, std::size_t(msize(rng)));
        auto prior = detail::random_prior(rng, grid.size());
        auto phi = detail::random_point(rng, alphabet);
        auto table = predictive_from_prior(grid, prior, N);
        double fast = cond_div_to_predictor(phi, table, N);
        double slow = oracle::enum_cond_div(phi, grid, prior, N);
        note(fast, slow);
    }

    // Lower/upper regret bounds.
    for (std::int64_t c = 0; c < cases_per_family; ++c) {
        std::uniform_int_distribution<std::int64_t> nn(1, std::min<std::int64_t>(max_n, 9));
        std::int64_t N = nn(rng);
        auto grid = detail::random_grid(rng, 2, std::size_t(msize(rng)));
        auto prior = detail::random_prior(rng, grid.size());
        HypothesisSet theta = (c % 4 == 3)
                                  ? HypothesisSet::subgrid(detail::random_grid(rng, 2, 3))
                                  : detail::random_interval(rng);
        auto fast = bounds(grid, prior, theta, N);
        auto slow = oracle::enum_regret_terms(grid, prior, theta, N);
        note(fast.r_lower, slow.r_lower);
        note(fast.r_upper, slow.r_upper);
    }

    // Combined divergences and bounds, N + L - 1 within the oracle limit.
    for (std::int64_t c = 0; c < cases_per_family; ++c) {
        std::uniform_int_distribution<std::int64_t> nn(
            1, std::max<std::int64_t>(1, std::min<std::int64_t>(max_n - 2, 8)));
        std::int64_t N = nn(rng);
        std::uniform_int_distribution<std::int64_t> ll(
            1, std::max<std::int64_t>(1, std::min<std::int64_t>(4, max_n + 1 - N)));
        std::int64_t L = ll(rng);
        auto grid = detail::random_grid(rng, 2, std::size_t(msize(rng)));
        auto prior = detail::random_prior(rng, grid.size());
        auto theta = detail::random_interval(rng);

        auto phi = grid[std::size_t(c) % grid.size()];
        double fast_d = combined_div_to_predictor(phi, grid, prior, N, L);
        double slow_d = oracle::enum_combined_div(phi, grid, prior, N, L);
        note(fast_d, slow_d);

        CombinedConfig ccfg;
        ccfg.base.grid = grid;
        ccfg.base.theta = theta;
        ccfg.base.N = N;
        ccfg.base.epsilon = 1e-15;  // read bounds at the initial prior
        ccfg.base.max_iters = 1;
        ccfg.base.init_prior = prior;
        ccfg.L = L;
        auto rep = combined_solve(ccfg);
        auto slow = oracle::enum_combined_regret_terms(grid, prior, theta, N, L);
        note(rep.r_lower * double(L), slow.r_lower);
        note(rep.r_upper * double(L), slow.r_upper);
    }

    // Supervised exact path.
    for (std::int64_t c = 0; c < cases_per_family; ++c) {
        std::uniform_int_distribution<std::int64_t> nn(
            1, std::min<std::int64_t>(max_n, OracleLimits::kMaxSupervisedLength));
        std::int64_t N = nn(rng);
        std::uniform_int_distribution<int> gs(1, 3);
        std::uniform_real_distribution<double> u(0.05, 0.95);
        ChannelGrid grid;
        int m = gs(rng);
        for (int j = 0; j < m; ++j) {
            double r0 = u(rng), r1 = u(rng);
            grid.push_back(ChannelParam({{1.0 - r0, r0}, {1.0 - r1, r1}}));
        }
        auto prior = detail::random_prior(rng, grid.size());
        double px0 = u(rng);
        FeatureDist px({px0, 1.0 - px0});
        SupHypothesis theta({detail::random_interval(rng), detail::random_interval(rng)});

        SupervisedConfig cfg;
        cfg.grid = grid;
        cfg.theta = theta;
        cfg.px = px;
        cfg.N = N;
        auto fast = sup_regret_terms(cfg, prior);
        auto slow = oracle::enum_supervised(grid, prior, theta, px, N);
        note(fast.mutual_info, slow.mutual_info);
        note(fast.penalty, slow.penalty);
        note(fast.r_lower, slow.r_lower);
        note(fast.r_upper, slow.r_upper);
    }

    res.pass = res.max_abs_discrepancy <= res.tolerance;
    return res;
}

}  // namespace ubatch
