#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "ubatch/family.hpp"
#include "ubatch/math_util.hpp"

namespace ubatch {

// Probability weights over a ParamGrid: the pi(phi) the solver optimizes.
struct Prior {
    std::vector<double> w;

    Prior() = default;
    explicit Prior(std::vector<double> weights) : w(std::move(weights)) { validate(); }

    static Prior uniform(std::size_t m) {
        return Prior(std::vector<double>(m, 1.0 / double(m)));
    }

    static Prior point_mass(std::size_t m, std::size_t at) {
        std::vector<double> v(m, 0.0);
        v.at(at) = 1.0;
        return Prior(std::move(v));
    }

    std::size_t size() const { return w.size(); }

    void validate() const {
        if (w.empty()) throw std::invalid_argument("prior must be non-empty");
        double s = 0.0;
        for (double x : w) {
            if (!(x >= 0.0)) throw std::invalid_argument("prior weights must be >= 0");
            s += x;
        }
        if (std::abs(s - 1.0) > kProbSumTol)
            throw std::invalid_argument("prior weights must sum to 1");
    }

    bool is_valid() const {
        if (w.empty()) return false;
        double s = 0.0;
        for (double x : w) {
            if (!(x >= 0.0)) return false;
            s += x;
        }
        return std::abs(s - 1.0) <= kProbSumTol;
    }
};

// Q_pi(y | count class) for every class reachable after horizon = N-1 draws.
// Rows whose mixture marginal underflows to zero are flagged; they carry a
// uniform placeholder and must not be queried.
struct PredictiveTable {
    std::shared_ptr<const CountClassTable> classes;
    int alphabet = 2;
    std::int64_t horizon = 0;            // N - 1
    std::vector<double> q;               // row-major, classes x alphabet
    std::vector<std::uint8_t> flagged;

    std::size_t num_classes() const { return classes->size(); }

    std::span<const double> row(std::size_t cls) const {
        if (flagged[cls]) throw std::logic_error("queried a flagged predictive row");
        return {q.data() + cls * std::size_t(alphabet), std::size_t(alphabet)};
    }

    bool is_flagged(std::size_t cls) const { return flagged[cls] != 0; }

    // Binary convenience: Q(y = 1 | k ones in the history).
    double q1(std::int64_t k) const {
        if (alphabet != 2) throw std::logic_error("q1() needs a binary table");
        return row(std::size_t(k))[1];
    }
};

// Result of extracting the add-beta factor at one count class.
struct AddBetaResult {
    double beta = 0.0;
    bool singular = false;
};

// beta(P_emp) for every P_emp = k/n, with per-point singularity flags.
struct BetaCurve {
    std::vector<double> p_emp;
    std::vector<double> beta;
    std::vector<std::uint8_t> singular;
};

namespace detail {

// Scaled per-sequence likelihoods for one (grid, horizon): for each grid
// point j and count class c, lik[j][c] = exp(sum_y k_y log phi_y - scale_c)
// where scale_c is the per-class maximum of the log likelihood over j.
// The multinomial coefficient is deliberately absent: it cancels in every
// predictive ratio.
struct ScaledLikelihood {
    std::size_t grid_size = 0;
    std::size_t num_classes = 0;
    std::vector<double> lik;    // row-major, grid x classes
    std::vector<double> scale;  // per class

    const double* row(std::size_t j) const { return lik.data() + j * num_classes; }
};

inline double log_seq_likelihood(const ParamPoint& phi,
                                 std::span<const std::int64_t> counts) {
    double v = 0.0;
    for (std::size_t y = 0; y < counts.size(); ++y) {
        if (counts[y] == 0) continue;
        if (phi.probs[y] == 0.0) return kNegInf;
        v += double(counts[y]) * std::log(phi.probs[y]);
    }
    return v;
}

inline ScaledLikelihood build_scaled_likelihood(const ParamGrid& grid,
                                                const CountClassTable& classes) {
    ScaledLikelihood out;
    out.grid_size = grid.size();
    out.num_classes = classes.size();
    std::vector<double> logs(out.grid_size * out.num_classes);
    out.scale.assign(out.num_classes, kNegInf);
    for (std::size_t j = 0; j < out.grid_size; ++j) {
        double* lr = logs.data() + j * out.num_classes;
        for (std::size_t c = 0; c < out.num_classes; ++c) {
            lr[c] = log_seq_likelihood(grid[j], classes.counts(c));
            if (lr[c] > out.scale[c]) out.scale[c] = lr[c];
        }
    }
    out.lik.resize(logs.size());
    for (std::size_t j = 0; j < out.grid_size; ++j) {
        const double* lr = logs.data() + j * out.num_classes;
        double* er = out.lik.data() + j * out.num_classes;
        for (std::size_t c = 0; c < out.num_classes; ++c)
            er[c] = std::isinf(out.scale[c]) ? 0.0 : std::exp(lr[c] - out.scale[c]);
    }
    return out;
}

// Predictive rows from prior-weighted scaled likelihoods. numer[c*A + y]
// ends up proportional to Q(y | c); a zero row total flags the class.
inline void fill_predictive(const ParamGrid& grid, const Prior& prior,
                            const ScaledLikelihood& sl, PredictiveTable& table) {
    const std::size_t A = std::size_t(table.alphabet);
    const std::size_t C = sl.num_classes;
    std::vector<double> numer(C * A, 0.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double pj = prior.w[j];
        if (pj == 0.0) continue;
        const double* lr = sl.row(j);
        for (std::size_t y = 0; y < A; ++y) {
            double c_y = pj * grid[j].probs[y];
            if (c_y == 0.0) continue;
            double* nr = numer.data() + y;
            for (std::size_t c = 0; c < C; ++c) nr[c * A] += c_y * lr[c];
        }
    }
    table.q.assign(C * A, 0.0);
    table.flagged.assign(C, 0);
    for (std::size_t c = 0; c < C; ++c) {
        double tot = 0.0;
        for (std::size_t y = 0; y < A; ++y) tot += numer[c * A + y];
        if (tot <= 0.0) {
            table.flagged[c] = 1;
            for (std::size_t y = 0; y < A; ++y) table.q[c * A + y] = 1.0 / double(A);
        } else {
            for (std::size_t y = 0; y < A; ++y) table.q[c * A + y] = numer[c * A + y] / tot;
        }
    }
}

}  // namespace detail

// The mixture universal predictor of a given prior, collapsed onto count
// classes: Q_pi(y_N | y^{N-1}) as a table over the sufficient statistic.
inline PredictiveTable predictive_from_prior(const ParamGrid& grid, const Prior& prior,
                                             std::int64_t N) {
    if (prior.size() != grid.size())
        throw std::invalid_argument("prior not aligned with grid");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    PredictiveTable table;
    table.alphabet = grid.alphabet_size();
    table.horizon = N - 1;
    table.classes = std::make_shared<CountClassTable>(table.alphabet, table.horizon);
    auto sl = detail::build_scaled_likelihood(grid, *table.classes);
    detail::fill_predictive(grid, prior, sl, table);
    return table;
}

// log Q_pi(count class) = log sum_j pi_j exp(log_count_weight(phi_j, stat)).
inline double seq_log_marginal(const ParamGrid& grid, const Prior& prior,
                               const SuffStat& stat) {
    if (prior.size() != grid.size())
        throw std::invalid_argument("prior not aligned with grid");
    std::vector<double> terms;
    terms.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (prior.w[j] == 0.0) continue;
        double lw = log_count_weight(grid[j], stat);
        if (std::isinf(lw) && lw < 0.0) continue;
        terms.push_back(std::log(prior.w[j]) + lw);
    }
    if (terms.empty()) return kNegInf;
    return log_sum_exp(terms);
}

// Inverts Q(1|k) = (k + beta)/(n + 2 beta) for the implicit add-beta factor.
// Singular when Q is within 1e-9 of 1/2 (the inversion loses meaning there).
inline AddBetaResult add_beta(const PredictiveTable& table, std::int64_t k) {
    if (table.alphabet != 2) throw std::invalid_argument("add_beta needs a binary table");
    if (k < 0 || k > table.horizon) throw std::invalid_argument("k out of range");
    std::int64_t n = table.horizon;
    if (n == 0) throw std::invalid_argument("add_beta needs horizon >= 1");
    double q = table.q1(k);
    double denom = 1.0 - 2.0 * q;
    if (std::abs(denom) <= 1e-9) return {0.0, true};
    double p_emp = double(k) / double(n);
    return {double(n) * (q - p_emp) / denom, false};
}

// Full beta(P_emp) curve, one entry per count class.
inline BetaCurve beta_curve(const PredictiveTable& table) {
    if (table.alphabet != 2) throw std::invalid_argument("beta_curve needs a binary table");
    std::int64_t n = table.horizon;
    BetaCurve curve;
    curve.p_emp.reserve(std::size_t(n + 1));
    curve.beta.reserve(std::size_t(n + 1));
    curve.singular.reserve(std::size_t(n + 1));
    for (std::int64_t k = 0; k <= n; ++k) {
        auto r = add_beta(table, k);
        curve.p_emp.push_back(double(k) / double(n));
        curve.beta.push_back(r.beta);
        curve.singular.push_back(r.singular ? 1 : 0);
    }
    return curve;
}

}  // namespace ubatch
