#include "catastrophe/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "catastrophe/process.hpp"

namespace catastrophe {

namespace {

State abs_diff(State a, State b) { return a > b ? a - b : b - a; }

Trajectory project(const CoupledTrajectory& path, bool x) {
    std::vector<JumpEvent> events;
    events.reserve(path.events().size());
    for (const auto& e : path.events()) events.push_back({e.time, x ? e.state_x : e.state_y});
    return Trajectory(x ? path.x0() : path.y0(), path.horizon(), std::move(events));
}

}  // namespace

Trajectory CoupledTrajectory::marginal_x() const { return project(*this, true); }
Trajectory CoupledTrajectory::marginal_y() const { return project(*this, false); }

std::pair<State, State> split_coupled_index(State zeta, State x, State y) {
    if (x == 0 || y == 0) throw std::invalid_argument("split_coupled_index: states must be positive");
    return {(zeta - 1) / y + 1, (zeta - 1) / x + 1};
}

std::pair<State, State> coupled_catastrophe(State x, State y, RandomStream& rng) {
    if (x == 0 || y == 0) {
        throw std::invalid_argument("coupled_catastrophe: both states must be positive; use independent draws at 0");
    }
    State product = 0;
    if (__builtin_mul_overflow(x, y, &product)) {
        throw std::overflow_error("coupled_catastrophe: x*y exceeds the 64-bit range");
    }
    const State zeta = rng.below(product) + 1;
    return split_coupled_index(zeta, x, y);
}

CoupledTrajectory simulate_coupled(const ModelParams& params, State x0, State y0, double horizon,
                                   RandomStream& rng) {
    if (!(horizon > 0.0) || std::isinf(horizon)) {
        throw std::invalid_argument("horizon must be positive and finite");
    }
    const double rate_up = params.rate_up();
    const double rate_cat = params.rate_catastrophe();
    State x = x0;
    State y = y0;
    std::vector<CoupledEvent> events;
    double next_up = rng.exponential(rate_up);
    double next_cat = rng.exponential(rate_cat);
    while (true) {
        const bool up = next_up <= next_cat;
        const double t = up ? next_up : next_cat;
        if (t > horizon) break;
        if (up) {
            ++x;
            ++y;
            next_up += rng.exponential(rate_up);
        } else {
            if (x > 0 && y > 0) {
                const auto [dx, dy] = coupled_catastrophe(x, y, rng);
                x -= dx;
                y -= dy;
            } else {
                // At least one coordinate sits at 0 and reflects; the other
                // draws on its own, x first.
                const std::int64_t dx = sample_catastrophe(x, rng);
                const std::int64_t dy = sample_catastrophe(y, rng);
                x = static_cast<State>(static_cast<std::int64_t>(x) - dx);
                y = static_cast<State>(static_cast<std::int64_t>(y) - dy);
            }
            next_cat += rng.exponential(rate_cat);
        }
        events.push_back({t, x, y});
    }
    return CoupledTrajectory(x0, y0, horizon, std::move(events));
}

CoupledTrajectory simulate_coupled(const ModelParams& params, State x0, State y0, double horizon,
                                   std::uint64_t seed) {
    RandomStream rng(seed);
    return simulate_coupled(params, x0, y0, horizon, rng);
}

State max_discrepancy(const CoupledTrajectory& path) {
    State hi = abs_diff(path.x0(), path.y0());
    for (const auto& e : path.events()) hi = std::max(hi, abs_diff(e.state_x, e.state_y));
    return hi;
}

}  // namespace catastrophe
