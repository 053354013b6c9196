#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "catastrophe/exact.hpp"
#include "catastrophe/log_prob.hpp"
#include "catastrophe/params.hpp"
#include "catastrophe/rates.hpp"

namespace catastrophe {

/// ceil(x phi(T)), the integer form of the event {xi(T)/phi(T) >= x}.
/// Products within 1e-9 (relative) of an integer snap to it before rounding.
State tail_threshold(const ScalingSpec& spec, double x, double T);

struct RateCurvePoint {
    double T;
    double psi;
    State threshold;
    std::size_t n_states;
    double log_tail;  // ln P(xi(T) >= threshold)
    double normalized;  // -log_tail / psi
    /// ln(truncation mass / tail probability): how far the solver's lost mass
    /// could move log_tail, in relative terms.
    double truncation_certificate;
    /// |total reconstructed mass + truncation mass - 1|
    double mass_balance_error;
};

struct ExperimentResult {
    ScalingSpec spec;
    ModelParams params;
    double x;
    double tol;
    double reference_rate;
    std::vector<RateCurvePoint> points;
};

/// Exact normalized log tails -ln P(xi(T) >= x phi(T)) / psi(T) along a grid
/// of increasing horizons, each certified to relative accuracy `tol`: the
/// state space is widened until the lost mass is below tol times a proven
/// lower bound on the tail. Grid points are independent and may run on
/// `workers` threads; the output does not depend on the worker count.
ExperimentResult empirical_rate_curve(const ModelParams& params, const ScalingSpec& spec, double x,
                                      std::span<const double> T_grid, double tol = 1e-12, unsigned workers = 1);

/// Least-squares fit of normalized(T) = rate + slope / psi(T). Heuristic:
/// nothing guarantees the correction is of order 1/psi.
struct RateFit {
    double rate;
    double slope;
};
RateFit fit_inverse_psi(const ExperimentResult& result);

struct Sandwich {
    LogProb lower;
    LogBound upper;
    double window;  // length of the terminal window used by the lower bound
    State threshold;
};

/// Bounds on ln P(xi(T) >= ceil(x phi(T))) for the process started at 0.
///
/// Lower: no catastrophe and enough up-jumps in the terminal window of
/// length min(x phi(T) / alpha, T), evaluated exactly.
/// Upper: Chernoff bound on the up-jump count, using
/// xi(T) <= 1 + (up-jumps in [0, T]) (a reflection at 0 adds at most one).
Sandwich ldp_sandwich(const ModelParams& params, const ScalingSpec& spec, double x, double T);

struct IsOptions {
    /// false runs plain Monte Carlo (unit likelihood ratio).
    bool tilt = true;
    /// Start the window from the exact law at T - window instead of
    /// simulating [0, T - window].
    bool inject_exact = true;
    unsigned workers = 1;
};

struct IsEstimate {
    LogProb estimate;
    double rel_std_err;
    std::size_t hits;
    double window;
    double theta;  // up-jump tilt: the window's up rate is rate_up * e^theta
};

/// Importance-sampling estimate of P(xi(T) >= ceil(x phi(T))). On the
/// terminal window the process is exponentially tilted: up-jumps run at
/// x phi(T) / window (never below rate_up), catastrophes at state s are
/// thinned by the mean of rho^d over d = 1..s and their sizes tilted toward
/// small drops, rho = rate_up / tilted up rate. Likelihood ratios are exact
/// and accumulated in log space. Throws for n < 100.
IsEstimate is_estimate_tail(const ModelParams& params, const ScalingSpec& spec, double x, double T, std::size_t n,
                            std::uint64_t seed, const IsOptions& options = {});

/// Fraction of n paths from 0 whose supremum over [0, T] exceeds eps phi(T).
/// Sublinear specs only.
double lln_sup_check(const ModelParams& params, const ScalingSpec& spec, double T, double eps, std::size_t n,
                     std::uint64_t seed, unsigned workers = 1);

nlohmann::json to_json(const ExperimentResult& result);
/// Columns: T,psi,log_tail,normalized,reference (17 significant digits).
void write_curve_csv(std::ostream& out, const ExperimentResult& result);

}  // namespace catastrophe
