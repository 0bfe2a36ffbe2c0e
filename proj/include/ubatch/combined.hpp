#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ubatch/divergence.hpp"
#include "ubatch/solver.hpp"

namespace ubatch {

// Batch-plus-online configuration: predict the L outcomes y_N .. y_{N+L-1}
// from the N-1 training samples. L = 1 is exactly the batch problem for the
// same N.
struct CombinedConfig {
    SolverConfig base;
    std::int64_t L = 1;

    void validate() const {
        base.validate();
        if (L < 1) throw std::invalid_argument("L must be >= 1");
    }
};

namespace detail {

inline std::vector<std::int64_t> combined_horizons(std::int64_t N, std::int64_t L) {
    std::vector<std::int64_t> hs;
    hs.reserve(std::size_t(L));
    for (std::int64_t t = 0; t < L; ++t) hs.push_back(N - 1 + t);
    return hs;
}

}  // namespace detail

// L-step conditional divergence to the mixture predictor: the chain rule
// splits it into one batch-style divergence per prediction step, each at its
// own history length.
inline double combined_div_to_predictor(const ParamPoint& phi, const ParamGrid& grid,
                                        const Prior& prior, std::int64_t N,
                                        std::int64_t L) {
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    double total = 0.0;
    for (std::int64_t t = 0; t < L; ++t) {
        auto table = predictive_from_prior(grid, prior, N + t);
        total += cond_div_to_predictor(phi, table, N + t);
    }
    return total;
}

// i.i.d. hypotheses factor across the L steps, so the projection penalty is
// linear in L: D_{c,N,L}(P_phi || Theta) = L * D_{c,N}(P_phi || Theta).
inline double combined_div_to_set(const ParamPoint& phi, const HypothesisSet& theta,
                                  std::int64_t L) {
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    return double(L) * div_to_set(phi, theta);
}

// Arimoto-Blahut iteration for the combined setting. Internally the bounds
// stay in total nats; the report is per-symbol (divided by L), and the
// configured epsilon applies to the per-symbol gap.
inline RegretReport combined_solve(const CombinedConfig& cfg,
                                   const IterationCallback* cb = nullptr) {
    cfg.validate();
    detail::MixtureEngine engine(cfg.base.grid,
                                 detail::combined_horizons(cfg.base.N, cfg.L),
                                 cfg.base.threads);
    auto pen = detail::penalty_vector(cfg.base.grid, cfg.base.theta, double(cfg.L));
    detail::LoopParams lp;
    lp.N = cfg.base.N;
    lp.lambda = cfg.base.lambda;
    lp.max_iters = cfg.base.max_iters;
    lp.init_prior = &cfg.base.init_prior;
    lp.eps_total = cfg.base.resolved_epsilon() * double(cfg.L);
    lp.norm = double(cfg.L);
    return detail::solve_core(engine, pen, lp, cb);
}

}  // namespace ubatch
