#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "catastrophe/log_prob.hpp"
#include "catastrophe/params.hpp"

namespace catastrophe {

/// A value in [0, +inf]. Infinity is an explicit state rather than an
/// overflowed double, because rate functions are infinite on x < 0.
class ExtendedReal {
  public:
    static ExtendedReal finite(double v);
    static constexpr ExtendedReal infinity() { return ExtendedReal(kPosInf, true); }

    constexpr bool is_infinite() const { return infinite_; }
    /// Throws std::domain_error when infinite.
    double value() const;
    /// +inf as a double when infinite.
    constexpr double to_double() const { return value_; }

    friend constexpr bool operator==(ExtendedReal, ExtendedReal) = default;

  private:
    constexpr ExtendedReal(double v, bool inf) : value_(v), infinite_(inf) {}
    double value_;
    bool infinite_;
};

enum class Regime { Sublinear, Linear, Superlinear };

std::string to_string(Regime regime);

/// Space scale phi(T) = b * T^a. a < 1 is the moderate-deviation regime,
/// a = 1 the classical one with k = b, a > 1 the superlarge one.
class ScalingSpec {
  public:
    ScalingSpec(double b, double a);

    double b() const { return b_; }
    double a() const { return a_; }
    Regime regime() const;
    /// Limit of phi(T)/T in the linear regime; throws otherwise.
    double k() const;
    double phi(double T) const;

    friend bool operator==(const ScalingSpec&, const ScalingSpec&) = default;

  private:
    double b_;
    double a_;
};

/// Moderate deviations: x ln((lambda+mu)/lambda) on x >= 0.
ExtendedReal rate_I1(double x, const ModelParams& params);

/// Large deviations with phi(T)/T -> k: linear below alpha/k, then
/// x ln(k x (lambda+mu) / (alpha lambda)) - x + alpha/k.
ExtendedReal rate_Jk(double x, const ModelParams& params, double k);

/// Superlarge deviations: x on x >= 0.
ExtendedReal rate_I2(double x);

/// Rate of the up-jump count over a terminal window of length c phi(T):
/// x ln(x (lambda+mu) / (alpha lambda c)) - x + alpha lambda c / (lambda+mu).
ExtendedReal rate_poisson_window(double x, const ModelParams& params, double c);

/// The rate function that governs a scaling spec.
class RegimeRateFunction {
  public:
    RegimeRateFunction(const ScalingSpec& spec, const ModelParams& params);

    Regime regime() const { return regime_; }
    ExtendedReal operator()(double x) const;

  private:
    Regime regime_;
    ModelParams params_;
    double k_ = 0.0;
};

/// phi(T) for the sublinear and linear regimes; phi(T) ln(phi(T)/T) for the
/// superlinear one (throws std::domain_error unless phi(T) > T).
double normalizer_psi(const ScalingSpec& spec, double T);

/// ln of the Poisson lower-tail bound P(X <= z) <= exp(-beta (1-u) - z ln u)
/// for X ~ Poisson(beta), u in [0, 1). +inf at u = 0.
LogBound poisson_lower_tail_bound(double beta, double z, double u);

/// ln of the bound on P(sum of floor(v phiT) uniform{1..floor(delta phiT)}
/// draws <= 2 a phiT), namely -floor(v phiT) ln floor(delta phiT) + 2 a phiT.
LogBound catastrophe_sum_bound(double a, double v, double delta, double phiT);

/// Exact ln P(S <= threshold) where S is a sum of `count` independent
/// uniform{1..size} variables; dynamic programming over partial sums.
LogProb uniform_sum_log_cdf(std::uint64_t count, std::uint64_t size, double threshold);

}  // namespace catastrophe
