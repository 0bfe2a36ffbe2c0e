#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ubatch/family.hpp"
#include "ubatch/math_util.hpp"

namespace ubatch {

// DMC-style channel: one conditional distribution P(y|x) per input symbol.
struct ChannelParam {
    std::vector<std::vector<double>> rows;  // rows[x][y]

    ChannelParam() = default;
    explicit ChannelParam(std::vector<std::vector<double>> r) : rows(std::move(r)) {
        validate();
    }

    static ChannelParam bsc(double crossover) {
        return ChannelParam({{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}});
    }

    int num_inputs() const { return int(rows.size()); }
    int num_outputs() const { return int(rows.front().size()); }

    ParamPoint row_point(int x) const { return ParamPoint(rows[std::size_t(x)]); }

    void validate() const {
        if (rows.empty()) throw std::invalid_argument("channel needs at least one input row");
        std::size_t y_count = rows.front().size();
        for (const auto& r : rows) {
            if (r.size() != y_count || y_count < 2)
                throw std::invalid_argument("channel rows must share an output alphabet >= 2");
            double s = 0.0;
            for (double p : r) {
                if (!(p >= 0.0 && p <= 1.0))
                    throw std::invalid_argument("channel probability outside [0,1]");
                s += p;
            }
            if (std::abs(s - 1.0) > kProbSumTol)
                throw std::invalid_argument("channel row must sum to 1");
        }
    }
};

using ChannelGrid = std::vector<ChannelParam>;

// Known i.i.d. feature distribution P(x).
struct FeatureDist {
    std::vector<double> p;

    FeatureDist() = default;
    explicit FeatureDist(std::vector<double> probs) : p(std::move(probs)) { validate(); }

    static FeatureDist uniform_binary() { return FeatureDist({0.5, 0.5}); }

    void validate() const {
        if (p.size() < 2) throw std::invalid_argument("feature alphabet must be >= 2");
        double s = 0.0;
        for (double v : p) {
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("feature probability outside [0,1]");
            s += v;
        }
        if (std::abs(s - 1.0) > kProbSumTol)
            throw std::invalid_argument("feature distribution must sum to 1");
    }
};

// Product hypothesis class: one per-row set per input symbol. Non-product
// classes are rejected at construction by design.
struct SupHypothesis {
    std::vector<HypothesisSet> rows;  // rows[x]

    SupHypothesis() = default;
    explicit SupHypothesis(std::vector<HypothesisSet> r) : rows(std::move(r)) {
        if (rows.empty()) throw std::invalid_argument("need one hypothesis set per input");
    }
};

// Sufficient statistic of a supervised training batch: per input symbol, how
// many times it occurred and the per-output counts within those occurrences.
struct SupStat {
    std::vector<std::int64_t> n_x;                   // occurrences of each x
    std::vector<std::vector<std::int64_t>> k_xy;     // k_xy[x][y]

    SupStat() = default;
    SupStat(std::vector<std::int64_t> nx, std::vector<std::vector<std::int64_t>> kxy)
        : n_x(std::move(nx)), k_xy(std::move(kxy)) {
        validate();
    }

    static SupStat from_pairs(const std::vector<int>& xs, const std::vector<int>& ys,
                              int num_inputs, int num_outputs) {
        SupStat s;
        s.n_x.assign(std::size_t(num_inputs), 0);
        s.k_xy.assign(std::size_t(num_inputs),
                      std::vector<std::int64_t>(std::size_t(num_outputs), 0));
        if (xs.size() != ys.size()) throw std::invalid_argument("feature/label length mismatch");
        for (std::size_t i = 0; i < xs.size(); ++i) {
            s.n_x.at(std::size_t(xs[i]))++;
            s.k_xy.at(std::size_t(xs[i])).at(std::size_t(ys[i]))++;
        }
        return s;
    }

    std::int64_t total() const {
        std::int64_t t = 0;
        for (auto v : n_x) t += v;
        return t;
    }

    void validate() const {
        if (n_x.size() != k_xy.size())
            throw std::invalid_argument("per-input count shape mismatch");
        for (std::size_t x = 0; x < n_x.size(); ++x) {
            std::int64_t s = 0;
            for (auto k : k_xy[x]) {
                if (k < 0) throw std::invalid_argument("negative count");
                s += k;
            }
            if (s != n_x[x])
                throw std::invalid_argument("per-output counts must sum to n_x");
        }
    }
};

}  // namespace ubatch
