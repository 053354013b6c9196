#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "catastrophe/log_prob.hpp"
#include "catastrophe/params.hpp"

namespace catastrophe {

/// Probability vector over states {0, ..., N} kept as weights times a common
/// factor: P(state j) = weights[j] * exp(log_scale). Mass lost to the state
/// truncation or to the clipped Poisson series is tracked (in log form) as
/// truncation mass, so the stored entries are a lower bound on the true
/// distribution and sum(P) + truncation_mass = 1.
class DistributionVector {
  public:
    DistributionVector(std::vector<double> weights, double log_scale, double log_truncation_mass = kNegInf,
                       double log_certified_bound = kNegInf);

    static DistributionVector point_mass(std::size_t n_states, State at);

    std::span<const double> weights() const { return weights_; }
    std::size_t n_states() const { return weights_.size(); }
    State max_state() const { return weights_.size() - 1; }
    double log_scale() const { return log_scale_; }

    double log_truncation_mass() const { return log_truncation_mass_; }
    double truncation_mass() const { return std::exp(log_truncation_mass_); }
    /// A priori bound on truncation_mass from the Poisson event count; -inf
    /// when none was computed.
    double log_certified_bound() const { return log_certified_bound_; }

    double probability(State j) const;
    double log_probability(State j) const;
    /// sum(P) + truncation_mass, which is 1 up to rounding.
    double total_mass() const;

  private:
    std::vector<double> weights_;
    double log_scale_;
    double log_truncation_mass_;
    double log_certified_bound_;
};

class TruncationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SolverOptions {
    /// Natural log of the admissible truncation mass (series clipping plus
    /// state-space leakage).
    double log_tol = -27.631021115928547;  // ln(1e-12)
    /// Force a renormalization of the propagated vector every this many
    /// steps; 0 renormalizes only when its maximum leaves [1e-100, 1e100].
    std::size_t renorm_every = 0;

    static SolverOptions with_tol(double tol);
};

/// One embedded-chain step applied to a distribution. Mass pushed above the
/// last state is added to the truncation mass. O(N) via a suffix sum.
DistributionVector pushforward_step(const DistributionVector& dist, const ModelParams& params);

/// Raw kernel behind pushforward_step: `in` and `out` have equal size, only
/// in[0, active) may be nonzero. Writes out[0, new_active) and returns
/// {leaked weight, new_active}; entries of `out` at or beyond new_active are
/// left untouched and must already be zero.
struct PushforwardResult {
    double leaked;
    std::size_t active;
};
PushforwardResult pushforward_kernel(std::span<const double> in, std::span<double> out, std::size_t active,
                                     double p_up, std::span<const double> reciprocals);

/// ceil(threshold + alpha t + 8 sqrt(alpha t)), at least threshold + 1.
std::size_t default_state_count(const ModelParams& params, double t, State threshold);

/// Law of the process at time t started from init, on states
/// {0, ..., n_states-1}, by uniformization at rate alpha. Throws
/// TruncationError when the tracked truncation mass exceeds the tolerance.
DistributionVector transient_distribution(const ModelParams& params, double t, State init, std::size_t n_states,
                                          const SolverOptions& options = {});
DistributionVector transient_distribution(const ModelParams& params, double t, State init, std::size_t n_states,
                                          double tol);

/// ln P(state >= m), summed from the far end of the vector down to m.
/// Throws std::out_of_range for m > max_state().
LogProb tail_probability(const DistributionVector& dist, State m);

/// ln P(Poisson(alpha t) >= n_states - init): the chance that the path can
/// reach state n_states at all, since each event raises the state by at
/// most one.
LogBound truncation_error_bound(const ModelParams& params, double t, std::size_t n_states, State init);

/// CSV archive: comment header lines with log_scale, truncation_mass and
/// certified bound, then "state,weight" rows at 17 significant digits.
void write_distribution_csv(std::ostream& out, const DistributionVector& dist);
DistributionVector read_distribution_csv(std::istream& in);

}  // namespace catastrophe
