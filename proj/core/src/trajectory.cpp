#include "catastrophe/trajectory.hpp"

#include <algorithm>
#include <sstream>

namespace catastrophe {

State Trajectory::state_at(double t) const {
    auto it = std::upper_bound(events_.begin(), events_.end(), t,
                               [](double time, const JumpEvent& e) { return time < e.time; });
    return it == events_.begin() ? initial_state_ : std::prev(it)->state;
}

State Trajectory::max_state() const {
    State hi = initial_state_;
    for (const auto& e : events_) hi = std::max(hi, e.state);
    return hi;
}

bool is_admissible_jump(State prev, State next) {
    if (next == prev + 1) return true;
    return prev > 0 && next < prev;
}

std::optional<std::string> check_path(const Trajectory& path) {
    State prev = path.initial_state();
    double last_time = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < path.events().size(); ++i) {
        const auto& e = path.events()[i];
        std::ostringstream msg;
        if (e.time < 0.0 || e.time > path.horizon()) {
            msg << "event " << i << " at time " << e.time << " lies outside [0, " << path.horizon() << "]";
            return msg.str();
        }
        if (!first && !(e.time > last_time)) {
            msg << "event " << i << " time " << e.time << " does not increase";
            return msg.str();
        }
        if (!is_admissible_jump(prev, e.state)) {
            msg << "event " << i << " jumps " << prev << " -> " << e.state;
            return msg.str();
        }
        prev = e.state;
        last_time = e.time;
        first = false;
    }
    return std::nullopt;
}

}  // namespace catastrophe
