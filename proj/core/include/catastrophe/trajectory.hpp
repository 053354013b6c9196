#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catastrophe/params.hpp"

namespace catastrophe {

struct JumpEvent {
    double time;
    State state;  // state entered at `time`

    friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

/// Piecewise-constant sample path on [0, horizon].
class Trajectory {
  public:
    Trajectory(State initial_state, double horizon, std::vector<JumpEvent> events)
        : initial_state_(initial_state), horizon_(horizon), events_(std::move(events)) {}

    State initial_state() const { return initial_state_; }
    double horizon() const { return horizon_; }
    const std::vector<JumpEvent>& events() const { return events_; }

    State terminal_state() const { return events_.empty() ? initial_state_ : events_.back().state; }
    /// Right-continuous value at time t in [0, horizon].
    State state_at(double t) const;
    /// Exact supremum over [0, horizon].
    State max_state() const;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;

  private:
    State initial_state_;
    double horizon_;
    std::vector<JumpEvent> events_;
};

/// Checks the path invariants: strictly increasing times within the horizon,
/// and every jump is +1, a drop of at most the pre-jump state, or 0 -> 1.
/// Returns a description of the first violation, if any.
std::optional<std::string> check_path(const Trajectory& path);

/// Whether a single transition prev -> next is structurally admissible.
bool is_admissible_jump(State prev, State next);

}  // namespace catastrophe
