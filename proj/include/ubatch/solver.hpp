#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ubatch/divergence.hpp"
#include "ubatch/family.hpp"
#include "ubatch/math_util.hpp"
#include "ubatch/parallel.hpp"
#include "ubatch/predictor.hpp"

namespace ubatch {

struct SolverConfig {
    ParamGrid grid;
    HypothesisSet theta;
    std::int64_t N = 1;
    double lambda = 1.0;       // exponent of the multiplicative update
    double epsilon = 0.0;      // gap threshold in nats; <= 0 resolves to 1e-5/(2N)
    std::int64_t max_iters = 200000;
    std::optional<Prior> init_prior;
    int threads = 0;           // 0: hardware concurrency

    double resolved_epsilon() const {
        return epsilon > 0.0 ? epsilon : 1e-5 / (2.0 * double(N));
    }

    void validate() const {
        grid.validate();
        if (N < 1) throw std::invalid_argument("N must be >= 1");
        if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
        if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
        if (!(resolved_epsilon() > 0.0)) throw std::invalid_argument("epsilon must be > 0");
        if (init_prior && init_prior->size() != grid.size())
            throw std::invalid_argument("initial prior not aligned with grid");
    }
};

struct GapSample {
    std::int64_t iteration = 0;
    double r_lower = 0.0;
    double r_upper = 0.0;
};

// Iteration-indexed view handed to solve() observers.
struct SolverState {
    std::int64_t iteration = 0;
    double r_lower = 0.0;
    double r_upper = 0.0;
    const Prior* prior = nullptr;
};

using IterationCallback = std::function<void(const SolverState&)>;

struct RegretReport {
    double r_lower = 0.0;
    double r_upper = 0.0;
    std::int64_t N = 0;
    std::int64_t iterations = 0;
    bool converged = false;
    bool cert_ok = true;  // R_L <= R_U and prior validity held at every iteration
    Prior final_prior;
    std::vector<GapSample> gap_history;  // first, every 100th, and final iteration

    double midpoint() const { return 0.5 * (r_lower + r_upper); }
    double gap() const { return r_upper - r_lower; }
    double normalized_2n() const { return 2.0 * double(N) * midpoint(); }
};

struct BoundsPair {
    double r_lower = 0.0;
    double r_upper = 0.0;
};

// Certified regret bounds at a given prior: the prior-averaged objective
// bounds from below, the worst grid point from above.
inline BoundsPair bounds_from_profile(const Prior& prior, const DivergenceProfile& prof) {
    if (prior.size() != prof.d.size())
        throw std::invalid_argument("profile not aligned with prior");
    BoundsPair out;
    out.r_upper = kNegInf;
    for (std::size_t j = 0; j < prof.d.size(); ++j) {
        out.r_lower += prior.w[j] * prof.d[j];
        out.r_upper = std::max(out.r_upper, prof.d[j]);
    }
    return out;
}

inline BoundsPair bounds(const ParamGrid& grid, const Prior& prior,
                         const HypothesisSet& theta, std::int64_t N) {
    auto prof = divergence_profile(grid, prior, theta, N);
    return bounds_from_profile(prior, prof);
}

// One multiplicative update pi_j <- pi_j * exp(lambda * d_j), normalized.
// Weights that drop below kWeightFloor are clamped there rather than zeroed:
// a multiplicative update can never revive an exact zero, and points pushed
// below the floor during a fast transient may still belong to the optimum.
// Points with a saturated (infinite) penalty are the exception and do go to
// exactly zero.
inline Prior ab_step(const Prior& prior, const DivergenceProfile& prof, double lambda) {
    if (prior.size() != prof.d.size())
        throw std::invalid_argument("profile not aligned with prior");
    double m = kNegInf;
    for (double v : prof.d) m = std::max(m, v);
    std::vector<double> w(prior.size());
    double z = 0.0;
    for (std::size_t j = 0; j < prior.size(); ++j) {
        w[j] = prior.w[j] * std::exp(lambda * (prof.d[j] - m));
        z += w[j];
    }
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::logic_error("ab_step: unnormalizable update (all weights vanished)");
    double z2 = 0.0;
    for (std::size_t j = 0; j < prior.size(); ++j) {
        w[j] /= z;
        if (w[j] < kWeightFloor)
            w[j] = prof.d[j] <= -0.5 * kSaturatedDivergence ? 0.0 : kWeightFloor;
        z2 += w[j];
    }
    if (!(z2 > 0.0)) throw std::logic_error("ab_step: all weights below floor");
    for (auto& x : w) x /= z2;
    return Prior(std::move(w));
}

namespace detail {

// Per-solve precomputation for one grid and a list of horizons (one for the
// batch solver, a consecutive run for the combined solver). Holds, for every
// grid point and count class, the scaled sequence likelihood (predictive
// numerators) and the absolute count-class weight (divergence weights), so
// each iteration reduces to dense passes over two row-major matrices.
class MixtureEngine {
public:
    MixtureEngine(const ParamGrid& grid, std::vector<std::int64_t> horizons, int threads)
        : grid_(grid), horizons_(std::move(horizons)),
          threads_(resolve_threads(threads)) {
        M_ = grid_.size();
        A_ = std::size_t(grid_.alphabet_size());
        std::size_t col = 0;
        for (auto h : horizons_) {
            tables_.push_back(std::make_shared<CountClassTable>(int(A_), h));
            col += tables_.back()->size();
        }
        C_ = col;
        build_matrices();
        neg_entropy_.resize(M_);
        for (std::size_t j = 0; j < M_; ++j) {
            double h = 0.0;
            for (std::size_t y = 0; y < A_; ++y) h += xlogx(grid_[j].probs[y]);
            neg_entropy_[j] = h;
        }
    }

    std::size_t grid_size() const { return M_; }
    std::size_t num_horizons() const { return horizons_.size(); }

    struct Scratch {
        std::vector<double> numer;         // planar, A arrays of length C
        std::vector<double> logq;          // planar, A arrays of length C
        std::vector<std::size_t> flagged;  // columns with zero marginal
        std::vector<std::vector<double>> block_partials;
    };

    // d_j = sum over horizons of D(P_j || Q_pi at that horizon). Scratch
    // buffers live in the caller so iterations do not allocate.
    void divergence_to_predictor(const Prior& pi, Scratch& s,
                                 std::vector<double>& to_pred) const {
        const std::size_t CA = C_ * A_;
        std::int64_t nblocks =
            std::max<std::int64_t>(1, std::min<std::int64_t>(threads_, std::int64_t(M_)));
        if (s.block_partials.size() != std::size_t(nblocks))
            s.block_partials.assign(std::size_t(nblocks), {});

        // Pass 1: predictive numerators numer[y][c] = sum_j pi_j phi_jy lik_jc,
        // block-deterministic reduction.
        parallel_blocks(std::int64_t(M_), threads_, [&](std::int64_t b, std::int64_t lo,
                                                        std::int64_t hi) {
            DenormalFlushGuard ftz;
            auto& part = s.block_partials[std::size_t(b)];
            part.assign(CA, 0.0);
            for (std::int64_t j = lo; j < hi; ++j) {
                double pj = pi.w[std::size_t(j)];
                if (pj == 0.0) continue;
                const double* lr = lik_.data() + std::size_t(j) * C_;
                if (A_ == 2) {
                    const double a0 = pj * grid_[std::size_t(j)].probs[0];
                    const double a1 = pj * grid_[std::size_t(j)].probs[1];
                    double* n0 = part.data();
                    double* n1 = part.data() + C_;
                    for (std::size_t c = 0; c < C_; ++c) {
                        double t = lr[c];
                        n0[c] += a0 * t;
                        n1[c] += a1 * t;
                    }
                } else {
                    for (std::size_t y = 0; y < A_; ++y) {
                        double ay = pj * grid_[std::size_t(j)].probs[y];
                        if (ay == 0.0) continue;
                        double* ny = part.data() + y * C_;
                        for (std::size_t c = 0; c < C_; ++c) ny[c] += ay * lr[c];
                    }
                }
            }
        });
        s.numer.assign(CA, 0.0);
        for (auto& part : s.block_partials)
            for (std::size_t i = 0; i < CA; ++i) s.numer[i] += part[i];

        // Pass 2: per-class log predictive; zero-marginal classes are flagged
        // and excluded from every divergence sum.
        s.logq.resize(CA);
        s.flagged.clear();
        for (std::size_t c = 0; c < C_; ++c) {
            double tot = 0.0;
            for (std::size_t y = 0; y < A_; ++y) tot += s.numer[y * C_ + c];
            if (tot <= 0.0) {
                s.flagged.push_back(c);
                for (std::size_t y = 0; y < A_; ++y) s.logq[y * C_ + c] = 0.0;
                continue;
            }
            for (std::size_t y = 0; y < A_; ++y) {
                double q = s.numer[y * C_ + c] / tot;
                s.logq[y * C_ + c] = q > 0.0 ? std::log(q) : -kSaturatedDivergence;
            }
        }

        // Pass 3: d_j = (#horizons) * h_j - sum_y phi_jy sum_c w_jc log q_yc.
        to_pred.resize(M_);
        const double nh = double(horizons_.size());
        parallel_blocks(std::int64_t(M_), threads_, [&](std::int64_t, std::int64_t lo,
                                                        std::int64_t hi) {
            DenormalFlushGuard ftz;
            for (std::int64_t j = lo; j < hi; ++j) {
                const double* wr = countw_.data() + std::size_t(j) * C_;
                double d;
                if (A_ == 2) {
                    const double* q0 = s.logq.data();
                    const double* q1 = s.logq.data() + C_;
                    double acc0 = 0.0, acc1 = 0.0;
                    for (std::size_t c = 0; c < C_; ++c) {
                        double w = wr[c];
                        acc0 += w * q0[c];
                        acc1 += w * q1[c];
                    }
                    double horizon_weight = nh;
                    for (std::size_t c : s.flagged) horizon_weight -= wr[c];
                    d = horizon_weight * neg_entropy_[std::size_t(j)] -
                        grid_[std::size_t(j)].probs[0] * acc0 -
                        grid_[std::size_t(j)].probs[1] * acc1;
                } else {
                    double acc[kMaxAlphabet] = {0, 0, 0, 0};
                    for (std::size_t y = 0; y < A_; ++y) {
                        const double* qy = s.logq.data() + y * C_;
                        double a = 0.0;
                        for (std::size_t c = 0; c < C_; ++c) a += wr[c] * qy[c];
                        acc[y] = a;
                    }
                    double horizon_weight = nh;
                    for (std::size_t c : s.flagged) horizon_weight -= wr[c];
                    d = horizon_weight * neg_entropy_[std::size_t(j)];
                    for (std::size_t y = 0; y < A_; ++y)
                        d -= grid_[std::size_t(j)].probs[y] * acc[y];
                }
                to_pred[std::size_t(j)] = std::min(std::max(d, 0.0), kSaturatedDivergence);
            }
        });
    }

private:
    void build_matrices() {
        DenormalFlushGuard ftz;
        lik_.resize(M_ * C_);
        countw_.resize(M_ * C_);
        std::vector<double> scale(C_, kNegInf);
        std::vector<double> logs(M_ * C_);
        for (std::size_t j = 0; j < M_; ++j) {
            double* lr = logs.data() + j * C_;
            std::size_t col = 0;
            for (const auto& tab : tables_)
                for (std::size_t c = 0; c < tab->size(); ++c, ++col) {
                    lr[col] = ubatch::detail::log_seq_likelihood(grid_[j], tab->counts(c));
                    if (lr[col] > scale[col]) scale[col] = lr[col];
                }
        }
        parallel_blocks(std::int64_t(M_), threads_, [&](std::int64_t, std::int64_t blo,
                                                        std::int64_t bhi) {
            for (std::int64_t j = blo; j < bhi; ++j) {
                const double* lr = logs.data() + std::size_t(j) * C_;
                double* er = lik_.data() + std::size_t(j) * C_;
                double* wr = countw_.data() + std::size_t(j) * C_;
                std::size_t col = 0;
                for (const auto& tab : tables_)
                    for (std::size_t c = 0; c < tab->size(); ++c, ++col) {
                        er[col] = std::isinf(scale[col]) ? 0.0
                                                         : std::exp(lr[col] - scale[col]);
                        wr[col] = std::exp(tab->log_coeff(c) + lr[col]);
                    }
            }
        });
    }

    const ParamGrid& grid_;
    std::vector<std::int64_t> horizons_;
    int threads_;
    std::size_t M_ = 0, A_ = 0, C_ = 0;
    std::vector<std::shared_ptr<CountClassTable>> tables_;
    std::vector<double> lik_;      // M x C, per-column scaled
    std::vector<double> countw_;   // M x C, absolute count-class weights
    std::vector<double> neg_entropy_;
};

// Saturated misspecification penalty per grid point, scaled by the number of
// predicted outcomes.
inline std::vector<double> penalty_vector(const ParamGrid& grid, const HypothesisSet& theta,
                                          double steps) {
    std::vector<double> pen(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        pen[j] = steps * saturate_divergence(div_to_set(grid[j], theta));
    return pen;
}

struct LoopParams {
    std::int64_t N = 1;
    double lambda = 1.0;
    std::int64_t max_iters = 1;
    const std::optional<Prior>* init_prior = nullptr;
    double eps_total = 1e-9;
    double norm = 1.0;  // divides reported quantities (L for combined)
};

// Shared Arimoto-Blahut loop over any engine exposing grid_size(), a Scratch
// type and divergence_to_predictor(prior, scratch, out). Bounds are evaluated
// at the current prior every pass; the loop stops when the certified gap
// reaches eps_total or the pass budget runs out.
template <class Engine>
RegretReport solve_core(const Engine& engine, const std::vector<double>& penalty,
                        const LoopParams& lp, const IterationCallback* cb = nullptr) {
    DenormalFlushGuard ftz;
    const std::size_t M = engine.grid_size();
    Prior pi = (lp.init_prior && lp.init_prior->has_value()) ? **lp.init_prior
                                                             : Prior::uniform(M);

    typename Engine::Scratch scratch;
    std::vector<double> to_pred(M), d(M);
    RegretReport rep;
    rep.N = lp.N;
    bool cert_ok = true;

    std::int64_t it = 0;
    bool converged = false;
    double r_lower = 0.0, r_upper = 0.0;
    while (true) {
        ++it;
        engine.divergence_to_predictor(pi, scratch, to_pred);
        r_lower = 0.0;
        r_upper = kNegInf;
        for (std::size_t j = 0; j < M; ++j) {
            d[j] = to_pred[j] - penalty[j];
            r_lower += pi.w[j] * d[j];
            r_upper = std::max(r_upper, d[j]);
        }
        if (r_lower - r_upper > 1e-12 * std::max(1.0, std::abs(r_upper)))
            cert_ok = false;
        if (cb && *cb) (*cb)(SolverState{it, r_lower / lp.norm, r_upper / lp.norm, &pi});
        if (it == 1 || it % 100 == 0)
            rep.gap_history.push_back({it, r_lower / lp.norm, r_upper / lp.norm});
        if (r_upper - r_lower <= lp.eps_total) {
            converged = true;
            break;
        }
        if (it >= lp.max_iters) break;

        // pi_{i+1} proportional to pi_i * exp(lambda * d), clamped at the
        // weight floor (exact zero only for saturated penalties: a
        // multiplicative update cannot revive a zero), renormalized.
        double z = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            double w = pi.w[j] * std::exp(lp.lambda * (d[j] - r_upper));
            pi.w[j] = w;
            z += w;
        }
        if (!(z > 0.0) || !std::isfinite(z))
            throw std::logic_error("solve: unnormalizable update");
        double z2 = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            pi.w[j] /= z;
            if (pi.w[j] < kWeightFloor)
                pi.w[j] = d[j] <= -0.5 * kSaturatedDivergence ? 0.0 : kWeightFloor;
            z2 += pi.w[j];
        }
        if (!(z2 > 0.0)) throw std::logic_error("solve: all weights below floor");
        for (std::size_t j = 0; j < M; ++j) pi.w[j] /= z2;
        if (!pi.is_valid()) cert_ok = false;
    }

    if (rep.gap_history.empty() || rep.gap_history.back().iteration != it)
        rep.gap_history.push_back({it, r_lower / lp.norm, r_upper / lp.norm});
    rep.r_lower = r_lower / lp.norm;
    rep.r_upper = r_upper / lp.norm;
    rep.iterations = it;
    rep.converged = converged;
    rep.cert_ok = cert_ok && pi.is_valid();
    rep.final_prior = std::move(pi);
    return rep;
}

}  // namespace detail

// Extended Arimoto-Blahut iteration for the misspecified batch problem.
inline RegretReport solve(const SolverConfig& cfg, const IterationCallback* cb = nullptr) {
    cfg.validate();
    detail::MixtureEngine engine(cfg.grid, {cfg.N - 1}, cfg.threads);
    auto pen = detail::penalty_vector(cfg.grid, cfg.theta, 1.0);
    detail::LoopParams lp;
    lp.N = cfg.N;
    lp.lambda = cfg.lambda;
    lp.max_iters = cfg.max_iters;
    lp.init_prior = &cfg.init_prior;
    lp.eps_total = cfg.resolved_epsilon();
    lp.norm = 1.0;
    return detail::solve_core(engine, pen, lp, cb);
}

// Grid-owning solver knobs for the capacity/sandwich entry points.
struct SolverParams {
    std::int64_t grid_m = 0;  // 0: 1001 for N <= 200, else 2001
    double lambda = 1.0;
    double epsilon = 0.0;     // 0: 1e-5/(2N)
    std::int64_t max_iters = 200000;
    int threads = 0;

    std::int64_t resolved_m(std::int64_t N) const {
        if (grid_m > 0) return grid_m;
        return N <= 200 ? 1001 : 2001;
    }
};

// Conditional capacity: the Theta = Phi special case (penalty identically 0).
inline RegretReport capacity(const ParamGrid& grid, std::int64_t N,
                             const SolverParams& p = {}) {
    SolverConfig cfg;
    cfg.grid = grid;
    cfg.theta = grid.is_bernoulli() ? HypothesisSet::interval(grid.lo, grid.hi)
                                    : HypothesisSet::subgrid(grid);
    cfg.N = N;
    cfg.lambda = p.lambda;
    cfg.epsilon = p.epsilon;
    cfg.max_iters = p.max_iters;
    cfg.threads = p.threads;
    return solve(cfg);
}

struct SandwichResult {
    double eps_n = 0.0;
    HypothesisSet theta_eps;
    RegretReport c_theta;       // C(Theta), stochastic run on Theta
    RegretReport regret;        // R*(Theta, Phi), misspecified run
    RegretReport c_theta_eps;   // C(Theta_eps)
    bool strict_ordering = false;
    bool holds_within_tol = false;  // each inequality allowed 2*eps slack
    bool all_converged = false;
};

// Numerical check of the capacity sandwich: C(Theta) <= R*(Theta,Phi) <=
// C(Theta_eps) with eps_N = N^(alpha-1). The capacity legs run on grids with
// the same spacing as the Phi grid so discretization bias cancels in the
// comparisons.
inline SandwichResult verify_sandwich(const HypothesisSet& theta, double phi_lo,
                                      double phi_hi, std::int64_t N, double alpha,
                                      const SolverParams& p = {}) {
    if (theta.kind != HypothesisSet::Kind::Interval)
        throw std::invalid_argument("verify_sandwich needs an interval Theta");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must be in (0, 1)");
    if (theta.a < phi_lo - 1e-15 || theta.b > phi_hi + 1e-15)
        throw std::invalid_argument("Theta must be contained in Phi");

    SandwichResult out;
    out.eps_n = std::pow(double(N), alpha - 1.0);
    out.theta_eps = theta_epsilon(theta, out.eps_n, phi_lo, phi_hi);

    std::int64_t M = p.resolved_m(N);
    double h = M > 1 ? (phi_hi - phi_lo) / double(M - 1) : 0.0;
    auto sub_m = [&](double a, double b) {
        if (a == b || h <= 0.0) return std::int64_t(1);
        return std::max<std::int64_t>(2, std::int64_t(std::llround((b - a) / h)) + 1);
    };

    SolverConfig mis;
    mis.grid = make_uniform_grid(phi_lo, phi_hi, M);
    mis.theta = theta;
    mis.N = N;
    mis.lambda = p.lambda;
    mis.epsilon = p.epsilon;
    mis.max_iters = p.max_iters;
    mis.threads = p.threads;
    out.regret = solve(mis);

    out.c_theta =
        capacity(make_uniform_grid(theta.a, theta.b, sub_m(theta.a, theta.b)), N, p);
    out.c_theta_eps = capacity(
        make_uniform_grid(out.theta_eps.a, out.theta_eps.b,
                          sub_m(out.theta_eps.a, out.theta_eps.b)),
        N, p);

    double eps = mis.resolved_epsilon();
    double m1 = out.c_theta.midpoint();
    double m2 = out.regret.midpoint();
    double m3 = out.c_theta_eps.midpoint();
    out.strict_ordering = m1 < m2 && m2 < m3;
    out.holds_within_tol = (m2 >= m1 - 2.0 * eps) && (m3 >= m2 - 2.0 * eps);
    out.all_converged = out.c_theta.converged && out.regret.converged &&
                        out.c_theta_eps.converged;
    return out;
}

}  // namespace ubatch
