#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ubatch/divergence.hpp"
#include "ubatch/family.hpp"
#include "ubatch/predictor.hpp"
#include "ubatch/supervised_types.hpp"

namespace ubatch {

struct OracleLimits {
    static constexpr std::int64_t kMaxUnsupervisedLength = 14;  // 2^14 sequences
    static constexpr std::int64_t kMaxSupervisedLength = 6;     // 4^6 (x,y) pairs
};

class OracleLimitError : public std::runtime_error {
public:
    explicit OracleLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Everything below enumerates raw sequences in plain double arithmetic, with
// no sufficient statistics and no log-domain tricks. Slow on purpose: these
// are the reference values the fast paths are certified against.
namespace oracle {

namespace detail {

inline void check_unsup_limit(std::int64_t len) {
    if (len < 1 || len > OracleLimits::kMaxUnsupervisedLength)
        throw OracleLimitError("oracle sequence length " + std::to_string(len) +
                               " exceeds limit " +
                               std::to_string(OracleLimits::kMaxUnsupervisedLength));
}

inline double seq_prob(const ParamPoint& phi, const std::vector<int>& seq,
                       std::size_t len) {
    double p = 1.0;
    for (std::size_t i = 0; i < len; ++i) p *= phi.probs[std::size_t(seq[i])];
    return p;
}

inline double mixture_seq_prob(const ParamGrid& grid, const Prior& prior,
                               const std::vector<int>& seq, std::size_t len) {
    double p = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        p += prior.w[j] * seq_prob(grid[j], seq, len);
    return p;
}

// Advances an odometer over {0..base-1}^len; returns false after the last.
inline bool next_seq(std::vector<int>& seq, int base) {
    for (std::size_t i = seq.size(); i-- > 0;) {
        if (++seq[i] < base) return true;
        seq[i] = 0;
    }
    return false;
}

// Minimizes KL(phi || Ber(t)) over t in [a, b] by bisection on the sign of
// the derivative (the objective is convex in t).
inline double min_kl_over_interval(const ParamPoint& phi, double a, double b) {
    auto kl_at = [&](double t) { return kl_single(phi, ParamPoint::bernoulli(t)); };
    if (a == b) return kl_at(a);
    double p = phi.success();
    auto deriv = [&](double t) { return (t - p) / (t * (1.0 - t)); };
    double lo = a, hi = b;
    if (lo > 0.0 && deriv(lo) >= 0.0) return kl_at(lo);
    if (hi < 1.0 && deriv(hi) <= 0.0) return kl_at(hi);
    if (lo == 0.0) lo = std::min(1e-300, (hi > 0 ? hi * 0.5 : 1e-300));
    if (hi == 1.0) hi = 1.0 - 1e-16;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (deriv(mid) < 0.0) lo = mid; else hi = mid;
    }
    return std::min({kl_at(0.5 * (lo + hi)), kl_at(a), kl_at(b)});
}

inline double div_to_set_ref(const ParamPoint& phi, const HypothesisSet& theta) {
    if (theta.kind == HypothesisSet::Kind::Interval)
        return min_kl_over_interval(phi, theta.a, theta.b);
    double best = kInf;
    for (std::size_t m = 0; m < theta.grid.size(); ++m) {
        double v = 0.0;
        for (int y = 0; y < phi.alphabet_size(); ++y)
            v += xlog_ratio(phi.probs[std::size_t(y)],
                            theta.grid[m].probs[std::size_t(y)]);
        best = std::min(best, v);
    }
    return best;
}

}  // namespace detail

// D_{c,N}(P_phi || Q_pi) summed literally over every length-N sequence.
inline double enum_cond_div(const ParamPoint& phi, const ParamGrid& grid,
                            const Prior& prior, std::int64_t N) {
    detail::check_unsup_limit(N);
    if (prior.size() != grid.size())
        throw std::invalid_argument("prior not aligned with grid");
    const int A = phi.alphabet_size();
    std::vector<int> seq(std::size_t(N), 0);
    double total = 0.0;
    do {
        double p_full = detail::seq_prob(phi, seq, std::size_t(N));
        if (p_full == 0.0) continue;
        double q_full = detail::mixture_seq_prob(grid, prior, seq, std::size_t(N));
        double q_hist = detail::mixture_seq_prob(grid, prior, seq, std::size_t(N - 1));
        double q_cond = q_full / q_hist;
        double p_cond = phi.probs[std::size_t(seq[std::size_t(N - 1)])];
        total += p_full * std::log(p_cond / q_cond);
    } while (detail::next_seq(seq, A));
    return total;
}

// L-step conditional divergence D_{c,N,L}(P_phi || Q_pi) by enumeration over
// y^{N-1+L}: history length N-1, then L predicted outcomes.
inline double enum_combined_div(const ParamPoint& phi, const ParamGrid& grid,
                                const Prior& prior, std::int64_t N, std::int64_t L) {
    std::int64_t len = N - 1 + L;
    detail::check_unsup_limit(len);
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    const int A = phi.alphabet_size();
    std::vector<int> seq(std::size_t(len), 0);
    double total = 0.0;
    do {
        double p_full = detail::seq_prob(phi, seq, std::size_t(len));
        if (p_full == 0.0) continue;
        double q_full = detail::mixture_seq_prob(grid, prior, seq, std::size_t(len));
        double q_hist = detail::mixture_seq_prob(grid, prior, seq, std::size_t(N - 1));
        double p_block = 1.0;
        for (std::int64_t i = N - 1; i < len; ++i)
            p_block *= phi.probs[std::size_t(seq[std::size_t(i)])];
        total += p_full * std::log(p_block / (q_full / q_hist));
    } while (detail::next_seq(seq, A));
    return total;
}

struct OracleBounds {
    double r_lower = 0.0;
    double r_upper = 0.0;
    std::vector<double> d;
};

// Regret bounds (prior average and worst case) evaluated definitionally.
inline OracleBounds enum_regret_terms(const ParamGrid& grid, const Prior& prior,
                                      const HypothesisSet& theta, std::int64_t N) {
    OracleBounds out;
    out.d.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double dp = enum_cond_div(grid[j], grid, prior, N);
        double ds = detail::div_to_set_ref(grid[j], theta);
        out.d.push_back(dp - ds);
    }
    out.r_upper = kNegInf;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        out.r_lower += prior.w[j] * out.d[j];
        out.r_upper = std::max(out.r_upper, out.d[j]);
    }
    return out;
}

// Combined-setting bounds in total nats (caller divides by L for per-symbol).
inline OracleBounds enum_combined_regret_terms(const ParamGrid& grid, const Prior& prior,
                                               const HypothesisSet& theta, std::int64_t N,
                                               std::int64_t L) {
    OracleBounds out;
    out.d.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double dp = enum_combined_div(grid[j], grid, prior, N, L);
        double ds = double(L) * detail::div_to_set_ref(grid[j], theta);
        out.d.push_back(dp - ds);
    }
    out.r_upper = kNegInf;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        out.r_lower += prior.w[j] * out.d[j];
        out.r_upper = std::max(out.r_upper, out.d[j]);
    }
    return out;
}

struct SupervisedOracleTerms {
    double mutual_info = 0.0;
    double penalty = 0.0;
    double r_lower = 0.0;
    double r_upper = 0.0;
    std::vector<double> d;
};

// Supervised objective enumerated over all (x^N, y^N) pairs.
inline SupervisedOracleTerms enum_supervised(const ChannelGrid& grid, const Prior& prior,
                                             const SupHypothesis& theta,
                                             const FeatureDist& px, std::int64_t N) {
    if (N < 1 || N > OracleLimits::kMaxSupervisedLength)
        throw OracleLimitError("supervised oracle limited to N <= " +
                               std::to_string(OracleLimits::kMaxSupervisedLength));
    if (prior.size() != grid.size())
        throw std::invalid_argument("prior not aligned with channel grid");
    const int X = int(px.p.size());
    const int Y = grid.front().num_outputs();

    auto chan_seq_prob = [&](const ChannelParam& w, const std::vector<int>& xs,
                             const std::vector<int>& ys, std::size_t len) {
        double p = 1.0;
        for (std::size_t i = 0; i < len; ++i) p *= w.rows[std::size_t(xs[i])][std::size_t(ys[i])];
        return p;
    };
    auto mixture_prob = [&](const std::vector<int>& xs, const std::vector<int>& ys,
                            std::size_t len) {
        double p = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j)
            p += prior.w[j] * chan_seq_prob(grid[j], xs, ys, len);
        return p;
    };

    SupervisedOracleTerms out;
    out.d.assign(grid.size(), 0.0);
    std::vector<int> xs(std::size_t(N), 0);
    do {
        double p_x = 1.0;
        for (std::size_t i = 0; i < std::size_t(N); ++i) p_x *= px.p[std::size_t(xs[i])];
        if (p_x == 0.0) continue;
        std::vector<int> ys(std::size_t(N), 0);
        do {
            double q_full = mixture_prob(xs, ys, std::size_t(N));
            double q_hist = mixture_prob(xs, ys, std::size_t(N - 1));
            for (std::size_t j = 0; j < grid.size(); ++j) {
                double p_y = chan_seq_prob(grid[j], xs, ys, std::size_t(N));
                if (p_y == 0.0) continue;
                double p_cond = grid[j].rows[std::size_t(xs[std::size_t(N - 1)])]
                                            [std::size_t(ys[std::size_t(N - 1)])];
                double q_cond = q_full / q_hist;
                out.d[j] += p_x * p_y * std::log(p_cond / q_cond);
            }
        } while (detail::next_seq(ys, Y));
    } while (detail::next_seq(xs, X));

    out.r_upper = kNegInf;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        out.mutual_info += prior.w[j] * out.d[j];
        double pen = 0.0;
        for (int x = 0; x < X; ++x) {
            ParamPoint row(grid[j].rows[std::size_t(x)]);
            pen += px.p[std::size_t(x)] * detail::div_to_set_ref(row, theta.rows[std::size_t(x)]);
        }
        out.penalty += prior.w[j] * pen;
        out.d[j] -= pen;
        out.r_lower += prior.w[j] * out.d[j];
        out.r_upper = std::max(out.r_upper, out.d[j]);
    }
    return out;
}

}  // namespace oracle
}  // namespace ubatch
