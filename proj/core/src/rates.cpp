#include "catastrophe/rates.hpp"

#include <stdexcept>
#include <vector>

namespace catastrophe {

ExtendedReal ExtendedReal::finite(double v) {
    if (std::isnan(v) || std::isinf(v)) throw std::domain_error("ExtendedReal::finite: value is not finite");
    return ExtendedReal(v, false);
}

double ExtendedReal::value() const {
    if (infinite_) throw std::domain_error("ExtendedReal: value is +inf");
    return value_;
}

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::Sublinear: return "sublinear";
        case Regime::Linear: return "linear";
        case Regime::Superlinear: return "superlinear";
    }
    return "unknown";
}

ScalingSpec::ScalingSpec(double b, double a) : b_(b), a_(a) {
    if (!(b > 0.0) || std::isinf(b)) throw std::invalid_argument("scaling b must be positive and finite");
    if (!(a > 0.0) || std::isinf(a)) throw std::invalid_argument("scaling a must be positive and finite");
}

Regime ScalingSpec::regime() const {
    if (a_ < 1.0) return Regime::Sublinear;
    if (a_ == 1.0) return Regime::Linear;
    return Regime::Superlinear;
}

double ScalingSpec::k() const {
    if (regime() != Regime::Linear) throw std::logic_error("ScalingSpec::k: only defined in the linear regime");
    return b_;
}

double ScalingSpec::phi(double T) const {
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
    return a_ == 1.0 ? b_ * T : b_ * std::pow(T, a_);
}

namespace {

double log_growth_ratio(const ModelParams& p) { return std::log((p.lambda() + p.mu()) / p.lambda()); }

}  // namespace

ExtendedReal rate_I1(double x, const ModelParams& params) {
    if (x < 0.0) return ExtendedReal::infinity();
    return ExtendedReal::finite(x * log_growth_ratio(params));
}

ExtendedReal rate_Jk(double x, const ModelParams& params, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("rate_Jk: k must be positive");
    if (x < 0.0) return ExtendedReal::infinity();
    const double kink = params.alpha() / k;
    if (x < kink) return ExtendedReal::finite(x * log_growth_ratio(params));
    const double lam = params.lambda();
    const double sum = lam + params.mu();
    return ExtendedReal::finite(x * std::log(k * x * sum / (params.alpha() * lam)) - x + kink);
}

ExtendedReal rate_I2(double x) {
    if (x < 0.0) return ExtendedReal::infinity();
    return ExtendedReal::finite(x);
}

ExtendedReal rate_poisson_window(double x, const ModelParams& params, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("rate_poisson_window: c must be positive");
    if (x < 0.0) return ExtendedReal::infinity();
    const double mean = params.rate_up() * c;
    if (x == 0.0) return ExtendedReal::finite(mean);  // x ln x -> 0
    return ExtendedReal::finite(x * std::log(x / mean) - x + mean);
}

RegimeRateFunction::RegimeRateFunction(const ScalingSpec& spec, const ModelParams& params)
    : regime_(spec.regime()), params_(params) {
    if (regime_ == Regime::Linear) k_ = spec.k();
}

ExtendedReal RegimeRateFunction::operator()(double x) const {
    switch (regime_) {
        case Regime::Sublinear: return rate_I1(x, params_);
        case Regime::Linear: return rate_Jk(x, params_, k_);
        case Regime::Superlinear: return rate_I2(x);
    }
    throw std::logic_error("unreachable");
}

double normalizer_psi(const ScalingSpec& spec, double T) {
    const double phi = spec.phi(T);
    if (spec.regime() != Regime::Superlinear) return phi;
    if (!(phi > T)) {
        throw std::domain_error("normalizer_psi: superlinear scale needs phi(T) > T (T=" + std::to_string(T) + ")");
    }
    return phi * std::log(phi / T);
}

LogBound poisson_lower_tail_bound(double beta, double z, double u) {
    if (!(beta > 0.0)) throw std::invalid_argument("poisson_lower_tail_bound: beta must be positive");
    if (!(z > 0.0)) throw std::invalid_argument("poisson_lower_tail_bound: z must be positive");
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("poisson_lower_tail_bound: u must lie in [0, 1)");
    if (u == 0.0) return LogBound{kPosInf};
    return LogBound{-beta * (1.0 - u) - z * std::log(u)};
}

LogBound catastrophe_sum_bound(double a, double v, double delta, double phiT) {
    if (!(phiT > 0.0)) throw std::invalid_argument("catastrophe_sum_bound: phiT must be positive");
    const double draws = std::floor(v * phiT);
    const double size = std::floor(delta * phiT);
    if (!(draws >= 1.0)) throw std::invalid_argument("catastrophe_sum_bound: floor(v*phiT) must be >= 1");
    if (!(size >= 1.0)) throw std::invalid_argument("catastrophe_sum_bound: floor(delta*phiT) must be >= 1");
    return LogBound{-draws * std::log(size) + 2.0 * a * phiT};
}

LogProb uniform_sum_log_cdf(std::uint64_t count, std::uint64_t size, double threshold) {
    if (size == 0) throw std::invalid_argument("uniform_sum_log_cdf: size must be positive");
    if (threshold < static_cast<double>(count)) return LogProb::zero();
    const double max_sum = static_cast<double>(count) * static_cast<double>(size);
    if (threshold >= max_sum) return LogProb::one();
    const auto cap = static_cast<std::size_t>(std::floor(threshold));

    // dist[s] = P(partial sum = s) / exp(log_scale), restricted to s <= cap
    std::vector<double> dist(cap + 1, 0.0);
    std::vector<double> next(cap + 1, 0.0);
    dist[0] = 1.0;
    double log_scale = 0.0;
    const double inv = 1.0 / static_cast<double>(size);
    for (std::uint64_t step = 0; step < count; ++step) {
        // next[s] = inv * sum_{r=1..size} dist[s-r], via a sliding window
        double window = 0.0;
        double hi = 0.0;
        for (std::size_t s = 0; s <= cap; ++s) {
            if (s >= 1) window += dist[s - 1];
            if (s >= size + 1) window -= dist[s - size - 1];
            next[s] = window > 0.0 ? window * inv : 0.0;
            hi = std::max(hi, next[s]);
        }
        if (hi == 0.0) return LogProb::zero();
        for (double& x : next) x /= hi;
        log_scale += std::log(hi);
        std::swap(dist, next);
    }
    double total = 0.0;
    for (double x : dist) total += x;
    return LogProb::from_log(std::min(0.0, std::log(total) + log_scale));
}

}  // namespace catastrophe
