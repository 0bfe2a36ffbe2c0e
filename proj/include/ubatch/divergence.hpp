#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ubatch/family.hpp"
#include "ubatch/math_util.hpp"
#include "ubatch/predictor.hpp"

namespace ubatch {

// Per-grid-point regret decomposition d_j = D(P_j || Q_pi) - D(P_j || Theta),
// with infinities saturated to kSaturatedDivergence inside d.
struct DivergenceProfile {
    std::vector<double> to_predictor;  // D_{c,N}(P_phi || Q_pi), >= 0
    std::vector<double> to_set;        // D_{c,N}(P_phi || Theta), >= 0
    std::vector<double> d;             // saturated difference
};

// One-symbol KL divergence D(phi || theta) in nats. For i.i.d. sources the
// conditional divergence of Eq-style definitions collapses to this.
inline double kl_single(const ParamPoint& phi, const ParamPoint& theta) {
    if (phi.alphabet_size() != theta.alphabet_size())
        throw std::invalid_argument("KL needs matching alphabets");
    double v = 0.0;
    for (int y = 0; y < phi.alphabet_size(); ++y) {
        double t = xlog_ratio(phi.probs[std::size_t(y)], theta.probs[std::size_t(y)]);
        if (std::isinf(t)) return kInf;
        v += t;
    }
    return std::max(v, 0.0);
}

// inf over Theta of D(phi || theta). Bernoulli intervals use the clamp
// projection (the theta-derivative of the KL is monotone, so the minimizer
// is the clamped point); subgrids use exhaustive minimization.
inline double div_to_set(const ParamPoint& phi, const HypothesisSet& theta) {
    if (theta.kind == HypothesisSet::Kind::Interval) {
        if (!phi.is_bernoulli())
            throw std::invalid_argument("interval hypothesis sets are Bernoulli-only");
        double p = phi.success();
        double proj = std::min(std::max(p, theta.a), theta.b);
        if (proj == p) return 0.0;
        return kl_single(phi, ParamPoint::bernoulli(proj));
    }
    double best = kInf;
    for (std::size_t m = 0; m < theta.grid.size(); ++m)
        best = std::min(best, kl_single(phi, theta.grid[m]));
    return best;
}

// Conditional divergence from an i.i.d. source to the mixture predictor:
// sum over count classes of w(class; phi, N-1) * KL(phi || Q(.|class)).
// Flagged classes are excluded (their generating weight is zero under any
// prior-supported source).
inline double cond_div_to_predictor(const ParamPoint& phi, const PredictiveTable& table,
                                    std::int64_t N) {
    if (N - 1 != table.horizon)
        throw std::invalid_argument("table horizon does not match N");
    if (phi.alphabet_size() != table.alphabet)
        throw std::invalid_argument("alphabet mismatch");
    const auto& classes = *table.classes;
    double total = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (table.is_flagged(c)) continue;
        double lw = log_count_weight(phi, classes.stat(c));
        if (std::isinf(lw) && lw < 0.0) continue;
        double w = std::exp(lw);
        auto q = table.row(c);
        double kl = 0.0;
        for (int y = 0; y < table.alphabet; ++y) {
            double t = xlog_ratio(phi.probs[std::size_t(y)], q[std::size_t(y)]);
            if (std::isinf(t)) return kInf;
            kl += t;
        }
        total += w * kl;
    }
    return std::max(total, 0.0);
}

// I(Y_N; Phi | Y^{N-1}) = E_pi { D_{c,N}(P_phi || Q_pi) }.
inline double mutual_info(const ParamGrid& grid, const Prior& prior,
                          const PredictiveTable& table, std::int64_t N) {
    if (prior.size() != grid.size())
        throw std::invalid_argument("prior not aligned with grid");
    double v = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (prior.w[j] == 0.0) continue;
        v += prior.w[j] * cond_div_to_predictor(grid[j], table, N);
    }
    return v;
}

// The per-phi bracket feeding both regret bounds, all three vectors retained.
inline DivergenceProfile divergence_profile(const ParamGrid& grid, const Prior& prior,
                                            const HypothesisSet& theta, std::int64_t N) {
    auto table = predictive_from_prior(grid, prior, N);
    DivergenceProfile prof;
    prof.to_predictor.reserve(grid.size());
    prof.to_set.reserve(grid.size());
    prof.d.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double dp = cond_div_to_predictor(grid[j], table, N);
        double ds = div_to_set(grid[j], theta);
        prof.to_predictor.push_back(dp);
        prof.to_set.push_back(ds);
        prof.d.push_back(saturate_divergence(dp) - saturate_divergence(ds));
    }
    return prof;
}

}  // namespace ubatch
