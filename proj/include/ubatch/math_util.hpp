#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#if defined(__SSE2__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#endif

namespace ubatch {

// Scoped flush-to-zero / denormals-are-zero mode. The scaled likelihood
// matrices are dense with values spanning hundreds of orders of magnitude;
// letting the tail underflow to exact zero instead of subnormals keeps the
// hot loops out of the microcode-assist path. Entries this small are below
// every tolerance in the project.
class DenormalFlushGuard {
public:
    DenormalFlushGuard() {
#if defined(__SSE2__)
        csr_ = _mm_getcsr();
        _MM_SET_FLUSH_ZERO_MODE(_MM_FLUSH_ZERO_ON);
        _MM_SET_DENORMALS_ZERO_MODE(_MM_DENORMALS_ZERO_ON);
#endif
    }
    ~DenormalFlushGuard() {
#if defined(__SSE2__)
        _mm_setcsr(csr_);
#endif
    }
    DenormalFlushGuard(const DenormalFlushGuard&) = delete;
    DenormalFlushGuard& operator=(const DenormalFlushGuard&) = delete;

private:
#if defined(__SSE2__)
    unsigned csr_ = 0;
#endif
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Divergences that are mathematically infinite are carried as this finite
// sentinel inside solver arithmetic; outputs convert it back to infinity.
inline constexpr double kSaturatedDivergence = 1e12;

// Prior weights below this are zeroed and the prior renormalized.
inline constexpr double kWeightFloor = 1e-300;

inline double saturate_divergence(double d) {
    return std::isinf(d) ? kSaturatedDivergence : std::min(d, kSaturatedDivergence);
}

inline double unsaturate_divergence(double d) {
    return d >= kSaturatedDivergence ? kInf : d;
}

// x*log(x/y) with the 0*log 0 = 0 convention; +inf when y = 0 < x.
inline double xlog_ratio(double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return kInf;
    return x * std::log(x / y);
}

// x*log(x), 0 at x = 0.
inline double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

inline double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return kNegInf;
    return std::lgamma(double(n + 1)) - std::lgamma(double(k + 1)) -
           std::lgamma(double(n - k + 1));
}

// log of the multinomial coefficient n! / prod(counts!), n = sum(counts).
inline double log_multinomial(std::span<const std::int64_t> counts) {
    std::int64_t n = 0;
    for (auto c : counts) n += c;
    double v = std::lgamma(double(n + 1));
    for (auto c : counts) v -= std::lgamma(double(c + 1));
    return v;
}

inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (std::isinf(m) && m < 0) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

// Fixed output format used by every CSV/summary writer: up to 12 significant
// digits, locale-independent, so identical runs produce identical bytes.
inline std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v,
                             std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

inline std::string format_value(std::int64_t v) { return std::to_string(v); }

}  // namespace ubatch
