#pragma once

#include <cstdint>

namespace catastrophe::poisson {

/// ln P(X = k) for X ~ Poisson(mean); mean >= 0.
double log_pmf(double mean, std::uint64_t k);

/// ln P(X >= k). Summed in log space, so values far below the double range
/// (e.g. -1e4) are returned accurately.
double log_upper_tail(double mean, std::uint64_t k);

/// ln P(X <= k).
double log_lower_tail(double mean, std::uint64_t k);

/// Chernoff bound ln P(X >= k) <= -(k ln(k/mean) - k + mean) for k > mean;
/// 0 otherwise.
double log_chernoff_upper(double mean, double k);

/// Smallest n such that a certified bound on P(X > n) is <= e^{log_tol}.
/// Uses P(X > n) <= pmf(n+1) / (1 - mean/(n+2)) for n+2 > mean.
std::uint64_t series_length(double mean, double log_tol);

}  // namespace catastrophe::poisson
