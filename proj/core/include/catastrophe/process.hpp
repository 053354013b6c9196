#pragma once

#include <cstdint>
#include <type_traits>
#include <utility>
#include <vector>

#include "catastrophe/params.hpp"
#include "catastrophe/random.hpp"
#include "catastrophe/trajectory.hpp"

namespace catastrophe {

/// One step of the embedded jump chain: 0 -> 1 surely; from i >= 1 go to
/// i+1 with probability p_up, else to a uniform point of {0, ..., i-1}.
State embedded_step(const ModelParams& params, State state, RandomStream& rng);

/// Catastrophe size for a population of m: uniform on {1, ..., m} for
/// m >= 1, and -1 for m = 0 (a catastrophe clock tick at 0 reflects to 1).
std::int64_t sample_catastrophe(State m, RandomStream& rng);

namespace detail {

/// Calls on_jump(time, state); a visitor returning bool stops the walk on
/// false.
template <class OnJump>
bool notify(OnJump& on_jump, double time, State state) {
    if constexpr (std::is_same_v<std::invoke_result_t<OnJump&, double, State>, bool>) {
        return on_jump(time, state);
    } else {
        on_jump(time, state);
        return true;
    }
}

}  // namespace detail

/// Streaming form of simulate_embedded: a single Poisson(alpha) clock,
/// exponential inter-arrivals, one embedded_step per tick. Returns the
/// state at the horizon (or at the stop, if the visitor stopped the walk).
template <class OnJump>
State fold_embedded(const ModelParams& params, double horizon, State init, RandomStream& rng,
                    OnJump&& on_jump) {
    State state = init;
    double t = rng.exponential(params.alpha());
    while (t <= horizon) {
        state = embedded_step(params, state, rng);
        if (!detail::notify(on_jump, t, state)) break;
        t += rng.exponential(params.alpha());
    }
    return state;
}

/// Streaming form of simulate_decomposed: independent up-jump and
/// catastrophe clocks, each with its own exponential inter-arrivals, merged
/// in time order.
template <class OnJump>
State fold_decomposed(const ModelParams& params, double horizon, State init, RandomStream& rng,
                      OnJump&& on_jump) {
    const double rate_up = params.rate_up();
    const double rate_cat = params.rate_catastrophe();
    State state = init;
    double next_up = rng.exponential(rate_up);
    double next_cat = rng.exponential(rate_cat);
    while (true) {
        const bool up = next_up <= next_cat;
        const double t = up ? next_up : next_cat;
        if (t > horizon) break;
        if (up) {
            state += 1;
            next_up += rng.exponential(rate_up);
        } else {
            const std::int64_t size = sample_catastrophe(state, rng);
            state = static_cast<State>(static_cast<std::int64_t>(state) - size);
            next_cat += rng.exponential(rate_cat);
        }
        if (!detail::notify(on_jump, t, state)) break;
    }
    return state;
}

Trajectory simulate_embedded(const ModelParams& params, double horizon, State init, RandomStream& rng);
Trajectory simulate_embedded(const ModelParams& params, double horizon, State init, std::uint64_t seed);

Trajectory simulate_decomposed(const ModelParams& params, double horizon, State init, RandomStream& rng);
Trajectory simulate_decomposed(const ModelParams& params, double horizon, State init, std::uint64_t seed);

enum class Sampler { Embedded, Decomposed };

/// Terminal states of `replicas` independent paths; replica i draws from
/// RandomStream(seed, i), so the result does not depend on evaluation order.
std::vector<State> sample_terminal_states(const ModelParams& params, Sampler sampler, double horizon, State init,
                                          std::uint64_t seed, std::size_t replicas);

}  // namespace catastrophe
