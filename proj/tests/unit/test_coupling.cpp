#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "catastrophe/coupling.hpp"
#include "catastrophe/exact.hpp"
#include "catastrophe/process.hpp"
#include "stats.hpp"

using namespace catastrophe;

namespace {

const ModelParams kUnit = validate_params(1.0, 1.0, 1.0);

State gap(State a, State b) { return a > b ? a - b : b - a; }

}  // namespace

TEST(CoupledIndex, WorkedExample) {
    const auto [a, b] = split_coupled_index(4, 2, 3);
    EXPECT_EQ(a, 2u);
    EXPECT_EQ(b, 2u);
}

TEST(CoupledIndex, EqualSizesCoincide) {
    for (State z = 1; z <= 25; ++z) {
        const auto [a, b] = split_coupled_index(z, 5, 5);
        EXPECT_EQ(a, b);
    }
}

TEST(CoupledIndex, ExhaustiveMarginalsAndOrder) {
    for (State x = 1; x <= 12; ++x) {
        for (State y = 1; y <= 12; ++y) {
            std::vector<int> cx(x + 1, 0), cy(y + 1, 0);
            for (State z = 1; z <= x * y; ++z) {
                const auto [a, b] = split_coupled_index(z, x, y);
                ASSERT_GE(a, 1u);
                ASSERT_LE(a, x);
                ASSERT_GE(b, 1u);
                ASSERT_LE(b, y);
                ++cx[a];
                ++cy[b];
                if (x >= y) {
                    ASSERT_GE(a, b);
                    ASSERT_LE(a - b, x - y);
                } else {
                    ASSERT_GE(b, a);
                    ASSERT_LE(b - a, y - x);
                }
            }
            for (State i = 1; i <= x; ++i) ASSERT_EQ(cx[i], static_cast<int>(y));
            for (State i = 1; i <= y; ++i) ASSERT_EQ(cy[i], static_cast<int>(x));
        }
    }
}

TEST(CoupledCatastrophe, MarginalFrequencies) {
    RandomStream rng(3);
    const int n = 100000;
    std::vector<double> fx(3, 0.0), fy(4, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto [a, b] = coupled_catastrophe(2, 3, rng);
        fx[a] += 1.0 / n;
        fy[b] += 1.0 / n;
    }
    for (int i = 1; i <= 2; ++i) EXPECT_NEAR(fx[i], 0.5, 0.005);
    for (int i = 1; i <= 3; ++i) EXPECT_NEAR(fy[i], 1.0 / 3.0, 0.005);
}

TEST(CoupledCatastrophe, RejectsZeroAndOverflow) {
    RandomStream rng(1);
    EXPECT_THROW(coupled_catastrophe(0, 3, rng), std::invalid_argument);
    EXPECT_THROW(coupled_catastrophe(3, 0, rng), std::invalid_argument);
    const State big = State{1} << 40;
    EXPECT_THROW(coupled_catastrophe(big, big, rng), std::overflow_error);
}

TEST(SimulateCoupled, EqualStartsStayTogether) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto path = simulate_coupled(kUnit, 4, 4, 20.0, seed);
        for (const auto& e : path.events()) ASSERT_EQ(e.state_x, e.state_y);
        EXPECT_EQ(max_discrepancy(path), 0u);
    }
}

TEST(SimulateCoupled, MarginalsAreValidPaths) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const auto path = simulate_coupled(kUnit, 0, 5, 10.0, seed);
        ASSERT_FALSE(check_path(path.marginal_x()).has_value());
        ASSERT_FALSE(check_path(path.marginal_y()).has_value());
    }
}

TEST(SimulateCoupled, DiscrepancyNeverExceedsInitialGap) {
    for (auto [x0, y0] : {std::pair<State, State>{0, 5}, {5, 0}, {2, 9}, {7, 3}}) {
        for (std::size_t i = 0; i < 20000; ++i) {
            RandomStream rng(41, i);
            const auto path = simulate_coupled(kUnit, x0, y0, 10.0, rng);
            ASSERT_LE(max_discrepancy(path), gap(x0, y0));
        }
    }
}

TEST(SimulateCoupled, MarginalsMatchUncoupledLaw) {
    const std::size_t n = 50000;
    std::vector<State> xs, ys;
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream rng(77, i);
        const auto path = simulate_coupled(kUnit, 0, 5, 10.0, rng);
        xs.push_back(path.marginal_x().terminal_state());
        ys.push_back(path.marginal_y().terminal_state());
    }
    for (auto [samples, start] : {std::pair{&xs, State{0}}, std::pair{&ys, State{5}}}) {
        const auto dist = transient_distribution(kUnit, 10.0, start, default_state_count(kUnit, 10.0, start), 1e-12);
        std::vector<double> pmf;
        for (State j = 0; j <= dist.max_state(); ++j) pmf.push_back(dist.probability(j));
        EXPECT_GT(stats::chi_squared_gof(*samples, pmf).p_value, 1e-3) << "start " << start;
    }
}

TEST(MaxDiscrepancy, HandBuiltPaths) {
    EXPECT_EQ(max_discrepancy(CoupledTrajectory(1, 3, 1.0, {{0.3, 2, 4}})), 2u);
    EXPECT_EQ(max_discrepancy(CoupledTrajectory(4, 4, 1.0, {})), 0u);
    EXPECT_EQ(max_discrepancy(CoupledTrajectory(0, 5, 1.0, {{0.1, 1, 6}, {0.2, 0, 1}})), 5u);
}

TEST(SimulateCoupled, Reproducible) {
    EXPECT_EQ(simulate_coupled(kUnit, 1, 6, 15.0, 5), simulate_coupled(kUnit, 1, 6, 15.0, 5));
}

TEST(MonotoneDomination, ExactGrid) {
    for (State x : {0u, 1u, 2u}) {
        for (State y : {3u, 5u}) {
            for (double t : {1.0, 5.0, 20.0}) {
                const std::size_t n = default_state_count(kUnit, t, 40);
                const auto dx = transient_distribution(kUnit, t, x, n, 1e-12);
                const auto dy = transient_distribution(kUnit, t, y, n, 1e-12);
                for (State z = 0; z <= 30; ++z) {
                    const double py = tail_probability(dy, z + 1).probability();
                    const std::int64_t shifted = static_cast<std::int64_t>(z) - static_cast<std::int64_t>(y - x);
                    const double px = shifted < 0 ? 1.0 : tail_probability(dx, shifted + 1).probability();
                    ASSERT_LE(py, px + 1e-12) << "x=" << x << " y=" << y << " t=" << t << " z=" << z;
                }
            }
        }
    }
}
