#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "catastrophe/params.hpp"
#include "catastrophe/random.hpp"
#include "catastrophe/trajectory.hpp"

namespace catastrophe {

struct CoupledEvent {
    double time;
    State state_x;
    State state_y;

    friend bool operator==(const CoupledEvent&, const CoupledEvent&) = default;
};

/// Two copies of the process started at x0 and y0, driven by one pair of
/// up-jump / catastrophe clocks. Every event moves both coordinates.
class CoupledTrajectory {
  public:
    CoupledTrajectory(State x0, State y0, double horizon, std::vector<CoupledEvent> events)
        : x0_(x0), y0_(y0), horizon_(horizon), events_(std::move(events)) {}

    State x0() const { return x0_; }
    State y0() const { return y0_; }
    double horizon() const { return horizon_; }
    const std::vector<CoupledEvent>& events() const { return events_; }

    Trajectory marginal_x() const;
    Trajectory marginal_y() const;

    friend bool operator==(const CoupledTrajectory&, const CoupledTrajectory&) = default;

  private:
    State x0_;
    State y0_;
    double horizon_;
    std::vector<CoupledEvent> events_;
};

/// Splits an index zeta in {1, ..., x*y} into the pair
/// (floor((zeta-1)/y) + 1, floor((zeta-1)/x) + 1). When zeta is uniform the
/// two components are uniform on {1..x} and {1..y}.
std::pair<State, State> split_coupled_index(State zeta, State x, State y);

/// Joint catastrophe sizes for coordinates at x >= 1 and y >= 1. If x >= y
/// then 0 <= first - second <= x - y. Throws std::invalid_argument when either
/// state is 0 and std::overflow_error when x*y does not fit in 64 bits.
std::pair<State, State> coupled_catastrophe(State x, State y, RandomStream& rng);

CoupledTrajectory simulate_coupled(const ModelParams& params, State x0, State y0, double horizon,
                                   RandomStream& rng);
CoupledTrajectory simulate_coupled(const ModelParams& params, State x0, State y0, double horizon,
                                   std::uint64_t seed);

/// max |state_x - state_y| over the initial pair and all events.
State max_discrepancy(const CoupledTrajectory& path);

}  // namespace catastrophe
