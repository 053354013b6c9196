#include "catastrophe/process.hpp"

#include <cmath>
#include <stdexcept>

namespace catastrophe {

State embedded_step(const ModelParams& params, State state, RandomStream& rng) {
    if (state == 0) return 1;
    if (rng.bernoulli(params.p_up())) return state + 1;
    return rng.below(state);
}

std::int64_t sample_catastrophe(State m, RandomStream& rng) {
    if (m == 0) return -1;
    return static_cast<std::int64_t>(rng.below(m)) + 1;
}

namespace {

void check_horizon(double horizon) {
    if (!(horizon > 0.0) || std::isinf(horizon)) {
        throw std::invalid_argument("horizon must be positive and finite");
    }
}

}  // namespace

Trajectory simulate_embedded(const ModelParams& params, double horizon, State init, RandomStream& rng) {
    check_horizon(horizon);
    std::vector<JumpEvent> events;
    fold_embedded(params, horizon, init, rng, [&](double t, State s) { events.push_back({t, s}); });
    return Trajectory(init, horizon, std::move(events));
}

Trajectory simulate_embedded(const ModelParams& params, double horizon, State init, std::uint64_t seed) {
    RandomStream rng(seed);
    return simulate_embedded(params, horizon, init, rng);
}

Trajectory simulate_decomposed(const ModelParams& params, double horizon, State init, RandomStream& rng) {
    check_horizon(horizon);
    std::vector<JumpEvent> events;
    fold_decomposed(params, horizon, init, rng, [&](double t, State s) { events.push_back({t, s}); });
    return Trajectory(init, horizon, std::move(events));
}

Trajectory simulate_decomposed(const ModelParams& params, double horizon, State init, std::uint64_t seed) {
    RandomStream rng(seed);
    return simulate_decomposed(params, horizon, init, rng);
}

std::vector<State> sample_terminal_states(const ModelParams& params, Sampler sampler, double horizon, State init,
                                          std::uint64_t seed, std::size_t replicas) {
    check_horizon(horizon);
    std::vector<State> out(replicas);
    auto ignore = [](double, State) {};
    for (std::size_t i = 0; i < replicas; ++i) {
        RandomStream rng(seed, i);
        out[i] = sampler == Sampler::Embedded ? fold_embedded(params, horizon, init, rng, ignore)
                                              : fold_decomposed(params, horizon, init, rng, ignore);
    }
    return out;
}

}  // namespace catastrophe
