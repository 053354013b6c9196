#include "catastrophe/poisson.hpp"

#include <cmath>
#include <stdexcept>

#include "catastrophe/log_prob.hpp"

namespace catastrophe::poisson {

namespace {

void check_mean(double mean) {
    if (!(mean >= 0.0) || std::isinf(mean)) throw std::invalid_argument("poisson: mean must be finite and >= 0");
}

constexpr double kRelativeCutoff = 1e-18;

// Sum of the pmf ratios starting from k (term 1) moving up; the ratio
// mean/(j+1) decreases, so the remainder after a term is at most
// term * r / (1 - r).
double log_upward_sum(double mean, std::uint64_t k) {
    double sum = 1.0;
    double term = 1.0;
    for (std::uint64_t j = k;; ++j) {
        const double r = mean / static_cast<double>(j + 1);
        term *= r;
        sum += term;
        const double r_next = mean / static_cast<double>(j + 2);
        if (term * r_next / (1.0 - r_next) < kRelativeCutoff * sum) break;
    }
    return std::log(sum);
}

// Same, moving down from k: ratio j/mean.
double log_downward_sum(double mean, std::uint64_t k) {
    double sum = 1.0;
    double term = 1.0;
    for (std::uint64_t j = k; j > 0; --j) {
        term *= static_cast<double>(j) / mean;
        sum += term;
        const double r_next = static_cast<double>(j - 1) / mean;
        if (term * r_next / (1.0 - r_next) < kRelativeCutoff * sum) break;
    }
    return std::log(sum);
}

}  // namespace

double log_pmf(double mean, std::uint64_t k) {
    check_mean(mean);
    if (mean == 0.0) return k == 0 ? 0.0 : kNegInf;
    const double kd = static_cast<double>(k);
    return -mean + kd * std::log(mean) - std::lgamma(kd + 1.0);
}

double log_upper_tail(double mean, std::uint64_t k) {
    check_mean(mean);
    if (k == 0) return 0.0;
    if (mean == 0.0) return kNegInf;
    if (static_cast<double>(k) > mean) return log_pmf(mean, k) + log_upward_sum(mean, k);
    return log1m_exp(log_lower_tail(mean, k - 1));
}

double log_lower_tail(double mean, std::uint64_t k) {
    check_mean(mean);
    if (mean == 0.0) return 0.0;
    if (static_cast<double>(k) < mean) return log_pmf(mean, k) + log_downward_sum(mean, k);
    return log1m_exp(std::min(0.0, log_upper_tail(mean, k + 1)));
}

double log_chernoff_upper(double mean, double k) {
    check_mean(mean);
    if (k <= mean) return 0.0;
    if (mean == 0.0) return kNegInf;
    return -(k * std::log(k / mean) - k + mean);
}

std::uint64_t series_length(double mean, double log_tol) {
    check_mean(mean);
    if (mean == 0.0) return 0;
    auto n = static_cast<std::uint64_t>(std::max(0.0, std::ceil(mean) - 1.0));
    while (true) {
        const double ratio = mean / static_cast<double>(n + 2);
        const double bound = log_pmf(mean, n + 1) - std::log1p(-ratio);
        if (bound <= log_tol) return n;
        ++n;
    }
}

}  // namespace catastrophe::poisson
