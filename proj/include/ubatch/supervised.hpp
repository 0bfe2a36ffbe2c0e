#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "ubatch/divergence.hpp"
#include "ubatch/math_util.hpp"
#include "ubatch/parallel.hpp"
#include "ubatch/solver.hpp"
#include "ubatch/supervised_types.hpp"

namespace ubatch {

// Largest N the exact supervised path accepts; the count-class lattice grows
// as N^3 for binary features.
inline constexpr std::int64_t kSupervisedExactMaxN = 200;

struct SupervisedConfig {
    ChannelGrid grid;
    SupHypothesis theta;
    FeatureDist px;
    std::int64_t N = 1;
    double lambda = 1.0;
    double epsilon = 0.0;  // <= 0: 1e-5/(2N)
    std::int64_t max_iters = 200000;
    std::optional<Prior> init_prior;
    int threads = 0;
    bool force_monte_carlo = false;
    std::int64_t mc_samples = 4096;
    std::uint64_t seed = 1;

    double resolved_epsilon() const {
        return epsilon > 0.0 ? epsilon : 1e-5 / (2.0 * double(N));
    }
    bool use_exact() const { return !force_monte_carlo && N <= kSupervisedExactMaxN; }

    void validate() const {
        if (grid.empty()) throw std::invalid_argument("channel grid must be non-empty");
        for (const auto& ch : grid) {
            ch.validate();
            if (ch.num_inputs() != 2 || ch.num_outputs() != 2)
                throw std::invalid_argument(
                    "supervised solver supports binary features and labels");
        }
        px.validate();
        if (px.p.size() != 2) throw std::invalid_argument("binary feature alphabet required");
        if (theta.rows.size() != 2)
            throw std::invalid_argument("need one hypothesis set per input symbol");
        if (N < 1) throw std::invalid_argument("N must be >= 1");
        if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
        if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
        if (!use_exact() && mc_samples < 2)
            throw std::invalid_argument("need at least 2 Monte-Carlo samples");
        if (init_prior && init_prior->size() != grid.size())
            throw std::invalid_argument("initial prior not aligned with channel grid");
    }
};

// Mixture predictive distribution over labels given the test feature and the
// training sufficient statistic.
struct SupPredictive {
    std::vector<double> q;
    bool flagged = false;
};

inline SupPredictive sup_predictive(const ChannelGrid& grid, const Prior& prior,
                                    const SupStat& stat, int x_test) {
    if (prior.size() != grid.size())
        throw std::invalid_argument("prior not aligned with channel grid");
    stat.validate();
    const auto& first = grid.front();
    if (x_test < 0 || x_test >= first.num_inputs())
        throw std::invalid_argument("test feature outside alphabet");
    const std::size_t Y = std::size_t(first.num_outputs());

    // log likelihood of the training labels under each channel; feature
    // probabilities cancel between numerator and denominator.
    std::vector<double> loglik(grid.size(), kNegInf);
    double scale = kNegInf;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (prior.w[j] == 0.0) continue;
        double v = std::log(prior.w[j]);
        bool dead = false;
        for (std::size_t x = 0; x < stat.n_x.size() && !dead; ++x)
            for (std::size_t y = 0; y < Y; ++y) {
                auto k = stat.k_xy[x][y];
                if (k == 0) continue;
                double p = grid[j].rows[x][y];
                if (p == 0.0) { dead = true; break; }
                v += double(k) * std::log(p);
            }
        if (dead) continue;
        loglik[j] = v;
        scale = std::max(scale, v);
    }

    SupPredictive out;
    out.q.assign(Y, 1.0 / double(Y));
    if (std::isinf(scale)) {
        out.flagged = true;
        return out;
    }
    std::vector<double> numer(Y, 0.0);
    double denom = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (std::isinf(loglik[j])) continue;
        double w = std::exp(loglik[j] - scale);
        denom += w;
        for (std::size_t y = 0; y < Y; ++y)
            numer[y] += w * grid[j].rows[std::size_t(x_test)][y];
    }
    if (denom <= 0.0) {
        out.flagged = true;
        return out;
    }
    for (std::size_t y = 0; y < Y; ++y) out.q[y] = numer[y] / denom;
    return out;
}

// Per-row decomposition of the projection penalty: sum_x P(x) inf_theta KL.
inline double sup_div_to_set(const ChannelParam& phi, const SupHypothesis& theta,
                             const FeatureDist& px) {
    if (theta.rows.size() != std::size_t(phi.num_inputs()))
        throw std::invalid_argument("hypothesis rows do not match channel inputs");
    if (px.p.size() != std::size_t(phi.num_inputs()))
        throw std::invalid_argument("feature distribution does not match channel inputs");
    double v = 0.0;
    for (int x = 0; x < phi.num_inputs(); ++x) {
        if (px.p[std::size_t(x)] == 0.0) continue;
        v += px.p[std::size_t(x)] * div_to_set(phi.row_point(x), theta.rows[std::size_t(x)]);
    }
    return v;
}

namespace detail {

// Supervised analogue of MixtureEngine for binary features and labels. State
// space: (n0, k0, k1) with n0 training features equal to 0 and k_x label-1
// counts among the x-labeled rows. Exact mode weights n0 binomially;
// Monte-Carlo mode weights sampled n0 values by their empirical frequency.
class SupervisedEngine {
public:
    SupervisedEngine(const ChannelGrid& grid, const FeatureDist& px, std::int64_t N,
                     int threads, const std::map<std::int64_t, double>& n0_weights)
        : grid_(grid), px_(px), n_(N - 1), threads_(resolve_threads(threads)) {
        M_ = grid_.size();
        for (auto& [n0, wgt] : n0_weights) {
            if (n0 < 0 || n0 > n_) throw std::invalid_argument("n0 outside 0..N-1");
            std::int64_t n1 = n_ - n0;
            for (std::int64_t k0 = 0; k0 <= n0; ++k0)
                for (std::int64_t k1 = 0; k1 <= n1; ++k1)
                    states_.push_back({n0, k0, k1, wgt});
        }
        S_ = states_.size();
        build_matrices();
    }

    std::size_t grid_size() const { return M_; }
    std::size_t num_states() const { return S_; }

    struct Scratch {
        std::vector<double> numer;  // S x 3: denom, numer(y=1|x=0), numer(y=1|x=1)
        std::vector<double> logq;   // S x 4: log q(y|x)
        std::vector<std::size_t> flagged;
        std::vector<std::vector<double>> block_partials;
    };

    void divergence_to_predictor(const Prior& pi, Scratch& s,
                                 std::vector<double>& out) const {
        std::int64_t nblocks =
            std::max<std::int64_t>(1, std::min<std::int64_t>(threads_, std::int64_t(M_)));
        if (s.block_partials.size() != std::size_t(nblocks))
            s.block_partials.assign(std::size_t(nblocks), {});

        parallel_blocks(std::int64_t(M_), threads_, [&](std::int64_t b, std::int64_t lo,
                                                        std::int64_t hi) {
            DenormalFlushGuard ftz;
            auto& part = s.block_partials[std::size_t(b)];
            part.assign(S_ * 3, 0.0);
            for (std::int64_t j = lo; j < hi; ++j) {
                double pj = pi.w[std::size_t(j)];
                if (pj == 0.0) continue;
                const double* lr = lik_.data() + std::size_t(j) * S_;
                double q10 = grid_[std::size_t(j)].rows[0][1];
                double q11 = grid_[std::size_t(j)].rows[1][1];
                for (std::size_t st = 0; st < S_; ++st) {
                    double w = pj * lr[st];
                    part[st * 3 + 0] += w;
                    part[st * 3 + 1] += w * q10;
                    part[st * 3 + 2] += w * q11;
                }
            }
        });
        s.numer.assign(S_ * 3, 0.0);
        for (auto& part : s.block_partials)
            for (std::size_t i = 0; i < S_ * 3; ++i) s.numer[i] += part[i];

        s.logq.resize(S_ * 4);
        s.flagged.clear();
        for (std::size_t st = 0; st < S_; ++st) {
            double denom = s.numer[st * 3];
            if (denom <= 0.0) {
                s.flagged.push_back(st);
                for (std::size_t i = 0; i < 4; ++i) s.logq[st * 4 + i] = 0.0;
                continue;
            }
            for (std::size_t x = 0; x < 2; ++x) {
                double q1 = s.numer[st * 3 + 1 + x] / denom;
                double q0 = 1.0 - q1;
                s.logq[st * 4 + 2 * x + 0] = q0 > 0.0 ? std::log(q0) : -kSaturatedDivergence;
                s.logq[st * 4 + 2 * x + 1] = q1 > 0.0 ? std::log(q1) : -kSaturatedDivergence;
            }
        }

        out.resize(M_);
        parallel_blocks(std::int64_t(M_), threads_, [&](std::int64_t, std::int64_t lo,
                                                        std::int64_t hi) {
            DenormalFlushGuard ftz;
            for (std::int64_t j = lo; j < hi; ++j) {
                const double* wr = countw_.data() + std::size_t(j) * S_;
                const auto& ch = grid_[std::size_t(j)];
                double px0 = px_.p[0], px1 = px_.p[1];
                double c00 = px0 * ch.rows[0][0], c01 = px0 * ch.rows[0][1];
                double c10 = px1 * ch.rows[1][0], c11 = px1 * ch.rows[1][1];
                double acc = 0.0;
                for (std::size_t st = 0; st < S_; ++st) {
                    const double* lq = s.logq.data() + st * 4;
                    acc += wr[st] * (c00 * lq[0] + c01 * lq[1] + c10 * lq[2] + c11 * lq[3]);
                }
                double hterm = px0 * (xlogx(ch.rows[0][0]) + xlogx(ch.rows[0][1])) +
                               px1 * (xlogx(ch.rows[1][0]) + xlogx(ch.rows[1][1]));
                double wtot = 1.0;
                for (std::size_t st : s.flagged) wtot -= wr[st];
                double d = wtot * hterm - acc;
                out[std::size_t(j)] = std::min(std::max(d, 0.0), kSaturatedDivergence);
            }
        });
    }

private:
    void build_matrices() {
        DenormalFlushGuard ftz;
        lik_.resize(M_ * S_);
        countw_.resize(M_ * S_);
        std::vector<double> scale(S_, kNegInf);
        std::vector<double> logs(M_ * S_);
        for (std::size_t j = 0; j < M_; ++j) {
            const auto& ch = grid_[j];
            auto lp = [](double v) { return v > 0.0 ? std::log(v) : kNegInf; };
            double l00 = lp(ch.rows[0][0]), l01 = lp(ch.rows[0][1]);
            double l10 = lp(ch.rows[1][0]), l11 = lp(ch.rows[1][1]);
            double* lr = logs.data() + j * S_;
            for (std::size_t st = 0; st < S_; ++st) {
                const auto& s = states_[st];
                std::int64_t n1 = n_ - s.n0;
                double v = 0.0;
                auto add = [&v](std::int64_t k, double lnp) {
                    if (k == 0 || std::isinf(v)) return;
                    v = std::isinf(lnp) ? kNegInf : v + double(k) * lnp;
                };
                add(s.k0, l01);
                add(s.n0 - s.k0, l00);
                add(s.k1, l11);
                add(n1 - s.k1, l10);
                lr[st] = v;
                if (v > scale[st]) scale[st] = v;
            }
        }
        for (std::size_t j = 0; j < M_; ++j) {
            const double* lr = logs.data() + j * S_;
            double* er = lik_.data() + j * S_;
            double* wr = countw_.data() + j * S_;
            for (std::size_t st = 0; st < S_; ++st) {
                const auto& s = states_[st];
                std::int64_t n1 = n_ - s.n0;
                er[st] = std::isinf(scale[st]) ? 0.0 : std::exp(lr[st] - scale[st]);
                if (std::isinf(lr[st])) {
                    wr[st] = 0.0;
                } else {
                    double lw = std::log(s.weight) + log_binomial(s.n0, s.k0) +
                                log_binomial(n1, s.k1) + lr[st];
                    wr[st] = std::exp(lw);
                }
            }
        }
    }

    struct StateRef {
        std::int64_t n0, k0, k1;
        double weight;
    };

    const ChannelGrid& grid_;
    const FeatureDist& px_;
    std::int64_t n_;
    int threads_;
    std::size_t M_ = 0, S_ = 0;
    std::vector<StateRef> states_;
    std::vector<double> lik_;     // M x S, per-state scaled label likelihood
    std::vector<double> countw_;  // M x S, absolute state weights
};

inline std::map<std::int64_t, double> exact_n0_weights(std::int64_t n, double px0) {
    std::map<std::int64_t, double> w;
    for (std::int64_t n0 = 0; n0 <= n; ++n0) {
        if (px0 == 0.0 && n0 > 0) continue;
        if (px0 == 1.0 && n0 < n) continue;
        double lw = log_binomial(n, n0);
        if (n0 > 0) lw += double(n0) * std::log(px0);
        if (n - n0 > 0) lw += double(n - n0) * std::log(1.0 - px0);
        w[n0] = std::exp(lw);
    }
    return w;
}

// Seeded Binomial(n, px0) sample frequencies. Chunked seeding keeps the draw
// sequence independent of any worker partitioning.
inline std::map<std::int64_t, double> mc_n0_weights(std::int64_t n, double px0,
                                                    std::int64_t samples,
                                                    std::uint64_t seed) {
    std::map<std::int64_t, std::int64_t> counts;
    constexpr std::int64_t kChunk = 1024;
    for (std::int64_t chunk = 0; chunk * kChunk < samples; ++chunk) {
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * std::uint64_t(chunk + 1));
        std::binomial_distribution<std::int64_t> bin(n, px0);
        std::int64_t lo = chunk * kChunk;
        std::int64_t hi = std::min(samples, lo + kChunk);
        for (std::int64_t i = lo; i < hi; ++i) counts[bin(rng)]++;
    }
    std::map<std::int64_t, double> w;
    for (auto& [n0, c] : counts) w[n0] = double(c) / double(samples);
    return w;
}

}  // namespace detail

struct SupRegretTerms {
    double mutual_info = 0.0;
    double penalty = 0.0;
    double r_lower = 0.0;
    double r_upper = 0.0;
    bool exact = true;
    double stderr_r_lower = 0.0;
    double stderr_r_upper = 0.0;
};

struct SupervisedReport {
    RegretReport report;
    bool exact = true;
    double stderr_r_lower = 0.0;
    double stderr_r_upper = 0.0;
};

// Both certified bounds of the supervised objective at a fixed prior,
// plus the mutual-information and penalty terms. Monte-Carlo runs report the
// standard error of the sampled feature-count average.
inline SupRegretTerms sup_regret_terms(const SupervisedConfig& cfg, const Prior& prior) {
    cfg.validate();
    if (prior.size() != cfg.grid.size())
        throw std::invalid_argument("prior not aligned with channel grid");

    const std::int64_t n = cfg.N - 1;
    auto weights = cfg.use_exact()
                       ? detail::exact_n0_weights(n, cfg.px.p[0])
                       : detail::mc_n0_weights(n, cfg.px.p[0], cfg.mc_samples, cfg.seed);

    SupRegretTerms out;
    out.exact = cfg.use_exact();

    // One divergence evaluation per distinct n0 group yields the totals and,
    // for Monte-Carlo runs, the across-group variance.
    std::vector<double> d_total(cfg.grid.size(), 0.0);
    std::vector<std::vector<double>> d_by_group;
    std::vector<double> group_weight;
    for (auto& [n0, wgt] : weights) {
        std::map<std::int64_t, double> single{{n0, 1.0}};
        detail::SupervisedEngine eng(cfg.grid, cfg.px, cfg.N, cfg.threads, single);
        detail::SupervisedEngine::Scratch scratch;
        std::vector<double> dpart;
        eng.divergence_to_predictor(prior, scratch, dpart);
        d_by_group.push_back(dpart);
        group_weight.push_back(wgt);
        for (std::size_t j = 0; j < cfg.grid.size(); ++j)
            d_total[j] += wgt * dpart[j];
    }

    std::vector<double> pen(cfg.grid.size());
    for (std::size_t j = 0; j < cfg.grid.size(); ++j)
        pen[j] = saturate_divergence(sup_div_to_set(cfg.grid[j], cfg.theta, cfg.px));

    out.r_upper = kNegInf;
    std::size_t arg_upper = 0;
    for (std::size_t j = 0; j < cfg.grid.size(); ++j) {
        out.mutual_info += prior.w[j] * d_total[j];
        out.penalty += prior.w[j] * pen[j];
        double dd = d_total[j] - pen[j];
        out.r_lower += prior.w[j] * dd;
        if (dd > out.r_upper) {
            out.r_upper = dd;
            arg_upper = j;
        }
    }

    if (!out.exact) {
        auto stderr_of = [&](auto&& value_of_group) {
            double mean = 0.0;
            for (std::size_t g = 0; g < d_by_group.size(); ++g)
                mean += group_weight[g] * value_of_group(g);
            double var = 0.0;
            for (std::size_t g = 0; g < d_by_group.size(); ++g) {
                double diff = value_of_group(g) - mean;
                var += group_weight[g] * diff * diff;
            }
            return std::sqrt(var / double(cfg.mc_samples));
        };
        out.stderr_r_lower = stderr_of([&](std::size_t g) {
            double v = 0.0;
            for (std::size_t j = 0; j < cfg.grid.size(); ++j)
                v += prior.w[j] * d_by_group[g][j];
            return v;
        });
        out.stderr_r_upper = stderr_of([&](std::size_t g) { return d_by_group[g][arg_upper]; });
    }
    return out;
}

// Arimoto-Blahut iteration on the supervised divergence profile; the batch
// update is reused verbatim.
inline SupervisedReport sup_solve(const SupervisedConfig& cfg,
                                  const IterationCallback* cb = nullptr) {
    cfg.validate();
    const std::int64_t n = cfg.N - 1;
    auto weights = cfg.use_exact()
                       ? detail::exact_n0_weights(n, cfg.px.p[0])
                       : detail::mc_n0_weights(n, cfg.px.p[0], cfg.mc_samples, cfg.seed);
    detail::SupervisedEngine engine(cfg.grid, cfg.px, cfg.N, cfg.threads, weights);

    std::vector<double> pen(cfg.grid.size());
    for (std::size_t j = 0; j < cfg.grid.size(); ++j)
        pen[j] = saturate_divergence(sup_div_to_set(cfg.grid[j], cfg.theta, cfg.px));

    detail::LoopParams lp;
    lp.N = cfg.N;
    lp.lambda = cfg.lambda;
    lp.max_iters = cfg.max_iters;
    lp.init_prior = &cfg.init_prior;
    lp.eps_total = cfg.resolved_epsilon();
    lp.norm = 1.0;

    SupervisedReport out;
    out.exact = cfg.use_exact();
    out.report = detail::solve_core(engine, pen, lp, cb);
    if (!out.exact) {
        auto terms = sup_regret_terms(cfg, out.report.final_prior);
        out.stderr_r_lower = terms.stderr_r_lower;
        out.stderr_r_upper = terms.stderr_r_upper;
    }
    return out;
}

// Channel grid of binary symmetric channels over a crossover range.
inline ChannelGrid bsc_grid(double lo, double hi, std::int64_t M) {
    auto base = make_uniform_grid(lo, hi, M);
    ChannelGrid out;
    out.reserve(base.size());
    for (std::size_t j = 0; j < base.size(); ++j)
        out.push_back(ChannelParam::bsc(base[j].success()));
    return out;
}

}  // namespace ubatch
