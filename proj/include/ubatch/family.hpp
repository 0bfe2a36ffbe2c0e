#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "ubatch/math_util.hpp"

namespace ubatch {

inline constexpr double kProbSumTol = 1e-12;
inline constexpr int kMaxAlphabet = 4;  // K <= 3 multinomial parameters

// Finite observation alphabet. Size 2 is the Bernoulli case; size K+1 hosts
// a K-parameter multinomial family.
struct Alphabet {
    int size = 2;

    explicit Alphabet(int s) : size(s) {
        if (size < 2) throw std::invalid_argument("alphabet size must be >= 2");
        if (size > kMaxAlphabet)
            throw std::invalid_argument("alphabet size capped at 4 (K <= 3)");
    }
};

// One i.i.d. source: a probability vector over the alphabet. Boundary values
// {0,1} are legal; all downstream arithmetic uses the 0*log 0 = 0 convention.
struct ParamPoint {
    std::vector<double> probs;

    ParamPoint() = default;
    explicit ParamPoint(std::vector<double> p) : probs(std::move(p)) { validate(); }

    static ParamPoint bernoulli(double success) {
        return ParamPoint({1.0 - success, success});
    }

    int alphabet_size() const { return int(probs.size()); }
    bool is_bernoulli() const { return probs.size() == 2; }

    // Success probability of a Bernoulli point.
    double success() const {
        if (!is_bernoulli()) throw std::logic_error("success() needs a binary point");
        return probs[1];
    }

    void validate() const {
        if (probs.size() < 2 || probs.size() > kMaxAlphabet)
            throw std::invalid_argument("param point needs 2..4 symbol probabilities");
        double s = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0 && p <= 1.0))
                throw std::invalid_argument("param point probability outside [0,1]");
            s += p;
        }
        if (std::abs(s - 1.0) > kProbSumTol)
            throw std::invalid_argument("param point probabilities must sum to 1");
    }

    bool operator==(const ParamPoint& o) const { return probs == o.probs; }
};

// Discretization of the data-generating family Phi. Bernoulli grids carry
// their range descriptor and are sorted ascending by success probability.
struct ParamGrid {
    std::vector<ParamPoint> points;
    double lo = 0.0;
    double hi = 1.0;

    ParamGrid() = default;
    ParamGrid(std::vector<ParamPoint> pts, double range_lo, double range_hi)
        : points(std::move(pts)), lo(range_lo), hi(range_hi) {
        validate();
    }

    std::size_t size() const { return points.size(); }
    const ParamPoint& operator[](std::size_t i) const { return points[i]; }

    bool is_bernoulli() const {
        for (const auto& p : points)
            if (!p.is_bernoulli()) return false;
        return !points.empty();
    }

    int alphabet_size() const {
        if (points.empty()) throw std::logic_error("empty grid");
        return points.front().alphabet_size();
    }

    void validate() const {
        if (points.empty()) throw std::invalid_argument("grid must be non-empty");
        int a = points.front().alphabet_size();
        for (const auto& p : points) {
            p.validate();
            if (p.alphabet_size() != a)
                throw std::invalid_argument("grid mixes alphabet sizes");
        }
        if (a == 2) {
            // Strict ascending order implies pairwise distinctness.
            for (std::size_t i = 0; i + 1 < points.size(); ++i)
                if (points[i].success() >= points[i + 1].success())
                    throw std::invalid_argument("Bernoulli grid must be sorted ascending");
            for (const auto& p : points)
                if (p.success() < lo - 1e-15 || p.success() > hi + 1e-15)
                    throw std::invalid_argument("grid point outside declared range");
        } else {
            for (std::size_t i = 0; i < points.size(); ++i)
                for (std::size_t k = i + 1; k < points.size(); ++k)
                    if (points[i] == points[k])
                        throw std::invalid_argument("grid points must be pairwise distinct");
        }
    }
};

// Hypothesis class Theta: either a Bernoulli interval [a,b] with analytic
// clamp projection, or an explicit subgrid of points.
struct HypothesisSet {
    enum class Kind { Interval, Subgrid };
    Kind kind = Kind::Interval;
    double a = 0.0;
    double b = 1.0;
    ParamGrid grid;

    static HypothesisSet interval(double a_, double b_) {
        if (!(0.0 <= a_ && a_ <= b_ && b_ <= 1.0))
            throw std::invalid_argument("hypothesis interval must satisfy 0 <= a <= b <= 1");
        HypothesisSet h;
        h.kind = Kind::Interval;
        h.a = a_;
        h.b = b_;
        return h;
    }

    static HypothesisSet subgrid(ParamGrid g) {
        HypothesisSet h;
        h.kind = Kind::Subgrid;
        h.grid = std::move(g);
        return h;
    }
};

// Symbol-occurrence counts: the sufficient statistic of an i.i.d. source.
struct SuffStat {
    std::vector<std::int64_t> counts;
    std::int64_t n = 0;

    SuffStat() = default;
    SuffStat(std::vector<std::int64_t> c, std::int64_t total)
        : counts(std::move(c)), n(total) {
        validate();
    }

    static SuffStat binary(std::int64_t zeros, std::int64_t ones) {
        return SuffStat({zeros, ones}, zeros + ones);
    }

    void validate() const {
        if (counts.size() < 2 || counts.size() > kMaxAlphabet)
            throw std::invalid_argument("sufficient statistic needs 2..4 symbol counts");
        std::int64_t s = 0;
        for (auto c : counts) {
            if (c < 0) throw std::invalid_argument("negative count");
            s += c;
        }
        if (s != n) throw std::invalid_argument("counts must sum to n");
    }
};

// M equally spaced Bernoulli points covering [lo, hi], endpoints included.
inline ParamGrid make_uniform_grid(double lo, double hi, std::int64_t M) {
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
        throw std::invalid_argument("grid range must satisfy 0 <= lo <= hi <= 1");
    if (M < 1) throw std::invalid_argument("grid resolution must be >= 1");
    if (lo == hi) {
        if (M != 1) throw std::invalid_argument("degenerate range needs M = 1");
        return ParamGrid({ParamPoint::bernoulli(lo)}, lo, hi);
    }
    if (M < 2) throw std::invalid_argument("non-degenerate range needs M >= 2");
    std::vector<ParamPoint> pts;
    pts.reserve(std::size_t(M));
    for (std::int64_t i = 0; i < M; ++i) {
        double t = double(i) / double(M - 1);
        double p = (i == M - 1) ? hi : lo + t * (hi - lo);
        pts.push_back(ParamPoint::bernoulli(p));
    }
    return ParamGrid(std::move(pts), lo, hi);
}

// log probability that n i.i.d. draws from phi land in the given count class:
// multinomial coefficient times prod_y phi_y^{k_y}, in log domain. Returns
// -inf when a zero-probability symbol has a positive count.
inline double log_count_weight(const ParamPoint& phi, const SuffStat& stat) {
    if (int(stat.counts.size()) != phi.alphabet_size())
        throw std::invalid_argument("count vector does not match alphabet");
    double v = log_multinomial(stat.counts);
    for (std::size_t y = 0; y < stat.counts.size(); ++y) {
        std::int64_t k = stat.counts[y];
        if (k == 0) continue;
        if (phi.probs[y] == 0.0) return kNegInf;
        v += double(k) * std::log(phi.probs[y]);
    }
    return v;
}

// Half-width of the epsilon-shell around an interval endpoint c:
// delta_eps(c) = sqrt(2 c (1-c) eps).
inline double delta_epsilon(double c, double eps) {
    return std::sqrt(2.0 * c * (1.0 - c) * eps);
}

// Theta_eps = [a - delta_eps(a), b + delta_eps(b)] clipped to the Phi range.
inline HypothesisSet theta_epsilon(const HypothesisSet& theta, double eps,
                                   double phi_lo, double phi_hi) {
    if (theta.kind != HypothesisSet::Kind::Interval)
        throw std::invalid_argument("theta_epsilon needs an interval hypothesis set");
    if (eps < 0.0) throw std::invalid_argument("epsilon must be >= 0");
    double lo = std::max(phi_lo, theta.a - delta_epsilon(theta.a, eps));
    double hi = std::min(phi_hi, theta.b + delta_epsilon(theta.b, eps));
    return HypothesisSet::interval(lo, hi);
}

// All count classes over a given alphabet at one horizon, in a fixed
// lexicographic order. For the binary alphabet class index == count of ones.
class CountClassTable {
public:
    CountClassTable(Alphabet alphabet, std::int64_t horizon)
        : CountClassTable(alphabet.size, horizon) {}

    CountClassTable(int alphabet, std::int64_t horizon)
        : alphabet_(alphabet), horizon_(horizon) {
        if (alphabet < 2 || alphabet > kMaxAlphabet)
            throw std::invalid_argument("alphabet size must be in 2..4");
        if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
        std::vector<std::int64_t> cur(std::size_t(alphabet), 0);
        enumerate(cur, 1, horizon);
        for (std::size_t i = 0; i < classes_.size(); ++i) index_[classes_[i]] = i;
        log_coeff_.reserve(classes_.size());
        for (const auto& c : classes_) log_coeff_.push_back(log_multinomial(c));
    }

    std::size_t size() const { return classes_.size(); }
    int alphabet() const { return alphabet_; }
    std::int64_t horizon() const { return horizon_; }
    std::span<const std::int64_t> counts(std::size_t idx) const {
        return classes_[idx];
    }
    double log_coeff(std::size_t idx) const { return log_coeff_[idx]; }

    std::size_t index_of(std::span<const std::int64_t> counts) const {
        auto it = index_.find(std::vector<std::int64_t>(counts.begin(), counts.end()));
        if (it == index_.end()) throw std::invalid_argument("unknown count class");
        return it->second;
    }

    SuffStat stat(std::size_t idx) const {
        return SuffStat(classes_[idx], horizon_);
    }

private:
    // Counts of symbols 1..A-1 run lexicographically; symbol 0 takes the
    // remainder. Binary class index therefore equals the count of ones.
    void enumerate(std::vector<std::int64_t>& cur, int pos, std::int64_t rem) {
        if (pos == alphabet_) {
            cur[0] = rem;
            classes_.push_back(cur);
            return;
        }
        for (std::int64_t k = 0; k <= rem; ++k) {
            cur[std::size_t(pos)] = k;
            enumerate(cur, pos + 1, rem - k);
        }
    }

    int alphabet_;
    std::int64_t horizon_;
    std::vector<std::vector<std::int64_t>> classes_;
    std::vector<double> log_coeff_;
    std::map<std::vector<std::int64_t>, std::size_t> index_;
};

}  // namespace ubatch
