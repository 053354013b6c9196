#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace catastrophe {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// Natural logarithm of a probability. -inf encodes probability zero.
class LogProb {
  public:
    constexpr LogProb() = default;

    /// Accepts values up to a 1e-12 slack above zero; anything larger is not
    /// the logarithm of a probability.
    static LogProb from_log(double value) {
        if (std::isnan(value) || value > 1e-12) {
            throw std::domain_error("LogProb: value is not the log of a probability");
        }
        return LogProb(value);
    }
    static LogProb from_probability(double p) { return from_log(std::log(p)); }
    static constexpr LogProb zero() { return LogProb(kNegInf); }
    static constexpr LogProb one() { return LogProb(0.0); }

    constexpr double value() const { return value_; }
    double probability() const { return std::exp(value_); }
    constexpr bool is_zero() const { return value_ == kNegInf; }

    friend constexpr bool operator==(LogProb, LogProb) = default;
    friend constexpr auto operator<=>(LogProb a, LogProb b) { return a.value_ <=> b.value_; }

  private:
    constexpr explicit LogProb(double v) : value_(v) {}
    double value_ = kNegInf;
};

/// Logarithm of an upper bound on a probability. Unlike LogProb it may be
/// positive (a vacuous bound) or +inf.
struct LogBound {
    double value = kPosInf;

    bool dominates(LogProb p) const { return p.value() <= value; }
};

/// ln(e^a + e^b), exact at infinities.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

/// ln(1 - e^a) for a <= 0.
inline double log1m_exp(double a) {
    if (a > 0) throw std::domain_error("log1m_exp: argument must be nonpositive");
    if (a > -0.6931471805599453) return std::log(-std::expm1(a));
    return std::log1p(-std::exp(a));
}

/// ln(sum_i e^{v_i}) over a span.
inline double log_sum_exp(std::span<const double> values) {
    double hi = kNegInf;
    for (double v : values) hi = std::max(hi, v);
    if (hi == kNegInf || hi == kPosInf) return hi;
    double s = 0.0;
    for (double v : values) s += std::exp(v - hi);
    return hi + std::log(s);
}

}  // namespace catastrophe
