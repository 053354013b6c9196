#include "catastrophe/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "catastrophe/poisson.hpp"
#include "catastrophe/process.hpp"
#include "catastrophe/random.hpp"

namespace catastrophe {

namespace {

/// Runs body(i) for i in [0, count) on up to `workers` threads. Results must
/// be written by index; the first exception is rethrown.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void check_x_T(double x, double T) {
    if (!(x > 0.0) || std::isinf(x)) throw std::invalid_argument("x must be positive and finite");
    if (!(T > 0.0) || std::isinf(T)) throw std::invalid_argument("T must be positive and finite");
}

double window_length(const ModelParams& params, const ScalingSpec& spec, double x, double T) {
    return std::min(x / params.alpha() * spec.phi(T), T);
}

// Exponentially tilted dynamics on the terminal window. With
// rho = r_up / q_up, catastrophes at state s >= 1 occur at rate
// r_cat * mean(rho^d, d = 1..s) with size law proportional to rho^d, and
// reflections at 0 at rate r_cat / rho. rho = 1 is the untilted process.
class WindowProposal {
  public:
    WindowProposal(double r_up, double r_cat, double q_up)
        : r_cat_(r_cat), q_up_(q_up), rho_(r_up / q_up), log_rho_(std::log(rho_)) {}

    double up_rate() const { return q_up_; }
    double rho() const { return rho_; }

    double catastrophe_rate(State s) const {
        if (s == 0) return r_cat_ / rho_;
        if (rho_ == 1.0) return r_cat_;
        const double n = static_cast<double>(s);
        return r_cat_ * rho_ * -std::expm1(n * log_rho_) / (n * (1.0 - rho_));
    }

    // Size in {1..s}, P(d) proportional to rho^d.
    State sample_size(State s, RandomStream& rng) const {
        if (rho_ == 1.0) return rng.below(s) + 1;
        const double n = static_cast<double>(s);
        const double u = rng.uniform_open0();
        const double d = std::ceil(std::log1p(u * std::expm1(n * log_rho_)) / log_rho_);
        return static_cast<State>(std::clamp(d, 1.0, n));
    }

    // ln of (true intensity of this move) / (proposal intensity of this move).
    double log_ratio_up() const { return log_rho_; }
    double log_ratio_catastrophe(State s, State d) const {
        if (s == 0) return log_rho_;
        return std::log(r_cat_ / static_cast<double>(s)) -
               std::log(catastrophe_rate(s)) - log_size_pmf(s, d);
    }

  private:
    double log_size_pmf(State s, State d) const {
        if (rho_ == 1.0) return -std::log(static_cast<double>(s));
        const double n = static_cast<double>(s);
        // rho^d (1 - rho) / (rho (1 - rho^s))
        return (static_cast<double>(d) - 1.0) * log_rho_ + std::log(-std::expm1(log_rho_)) -
               std::log(-std::expm1(n * log_rho_));
    }

    double r_cat_;
    double q_up_;
    double rho_;
    double log_rho_;
};

struct WindowRun {
    State state;
    double log_ratio;
};

WindowRun run_window(State state, double length, double r_total, const WindowProposal& q, RandomStream& rng) {
    WindowRun run{state, 0.0};
    double t = 0.0;
    while (true) {
        const double cat = q.catastrophe_rate(run.state);
        const double total = q.up_rate() + cat;
        const double dt = rng.exponential(total);
        if (t + dt > length) {
            run.log_ratio -= (r_total - total) * (length - t);
            break;
        }
        t += dt;
        run.log_ratio -= (r_total - total) * dt;
        if (rng.uniform01() * total < q.up_rate()) {
            ++run.state;
            run.log_ratio += q.log_ratio_up();
        } else if (run.state == 0) {
            run.state = 1;
            run.log_ratio += q.log_ratio_catastrophe(0, 0);
        } else {
            const State d = q.sample_size(run.state, rng);
            run.log_ratio += q.log_ratio_catastrophe(run.state, d);
            run.state -= d;
        }
    }
    return run;
}

}  // namespace

State tail_threshold(const ScalingSpec& spec, double x, double T) {
    check_x_T(x, T);
    const double target = x * spec.phi(T);
    const double snapped = std::round(target);
    if (std::abs(target - snapped) <= 1e-9 * std::max(1.0, target)) return static_cast<State>(std::max(0.0, snapped));
    return static_cast<State>(std::ceil(target));
}

Sandwich ldp_sandwich(const ModelParams& params, const ScalingSpec& spec, double x, double T) {
    check_x_T(x, T);
    const State m = tail_threshold(spec, x, T);
    const double window = window_length(params, spec, x, T);
    const double lower = poisson::log_upper_tail(params.rate_up() * window, m) - params.rate_catastrophe() * window;
    const double upper =
        m == 0 ? 0.0 : poisson::log_chernoff_upper(params.rate_up() * T, static_cast<double>(m - 1));
    return Sandwich{LogProb::from_log(std::min(0.0, lower)), LogBound{upper}, window, m};
}

ExperimentResult empirical_rate_curve(const ModelParams& params, const ScalingSpec& spec, double x,
                                      std::span<const double> T_grid, double tol, unsigned workers) {
    if (T_grid.empty()) throw std::invalid_argument("empirical_rate_curve: empty T grid");
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("empirical_rate_curve: tol must lie in (0, 1)");
    for (std::size_t i = 0; i < T_grid.size(); ++i) {
        check_x_T(x, T_grid[i]);
        if (i > 0 && !(T_grid[i] > T_grid[i - 1])) throw std::invalid_argument("empirical_rate_curve: T grid must increase");
    }
    const RegimeRateFunction rate(spec, params);
    ExperimentResult result{spec, params, x, tol, rate(x).to_double(), {}};
    result.points.resize(T_grid.size());

    parallel_for(T_grid.size(), workers, [&](std::size_t i) {
        const double T = T_grid[i];
        const double psi = normalizer_psi(spec, T);
        const Sandwich bounds = ldp_sandwich(params, spec, x, T);
        const State m = bounds.threshold;
        SolverOptions options;
        options.log_tol = std::log(tol) + bounds.lower.value();

        const std::size_t cap = 4 * default_state_count(params, T, m);
        std::size_t n_states = std::max<std::size_t>(m + 1, static_cast<std::size_t>(1.25 * static_cast<double>(m)) + 32);
        std::optional<DistributionVector> dist;
        while (!dist) {
            try {
                dist = transient_distribution(params, T, 0, n_states, options);
            } catch (const TruncationError& e) {
                if (n_states >= cap) {
                    std::ostringstream msg;
                    msg << "empirical_rate_curve: T=" << T << ": " << e.what();
                    throw TruncationError(msg.str());
                }
                n_states = std::min(2 * n_states, cap);
            }
        }
        const LogProb tail = tail_probability(*dist, m);
        RateCurvePoint& p = result.points[i];
        p.T = T;
        p.psi = psi;
        p.threshold = m;
        p.n_states = n_states;
        p.log_tail = tail.value();
        p.normalized = -tail.value() / psi;
        p.truncation_certificate = dist->log_truncation_mass() - tail.value();
        p.mass_balance_error = std::abs(dist->total_mass() - 1.0);
    });
    return result;
}

RateFit fit_inverse_psi(const ExperimentResult& result) {
    const auto& pts = result.points;
    if (pts.size() < 2) throw std::invalid_argument("fit_inverse_psi: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        const double u = 1.0 / p.psi;
        sx += u;
        sy += p.normalized;
        sxx += u * u;
        sxy += u * p.normalized;
    }
    const double n = static_cast<double>(pts.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::domain_error("fit_inverse_psi: degenerate grid");
    const double slope = (n * sxy - sx * sy) / denom;
    return RateFit{(sy - slope * sx) / n, slope};
}

IsEstimate is_estimate_tail(const ModelParams& params, const ScalingSpec& spec, double x, double T, std::size_t n,
                            std::uint64_t seed, const IsOptions& options) {
    check_x_T(x, T);
    if (n < 100) throw std::invalid_argument("is_estimate_tail: n must be at least 100");
    const Sandwich bounds = ldp_sandwich(params, spec, x, T);
    const State m = bounds.threshold;
    const double window = bounds.window;
    const double start = std::max(0.0, T - window);

    // Tilt only when the target lies above the typical up-jump count.
    const double r_up = params.rate_up();
    const double q_up = options.tilt && window > 0.0 ? std::max(r_up, x * spec.phi(T) / window) : r_up;
    const WindowProposal proposal(r_up, params.rate_catastrophe(), q_up);

    // Law at the start of the window, as a cumulative table over states.
    std::vector<double> start_cdf;
    if (options.inject_exact && start > 0.0) {
        SolverOptions solver;
        solver.log_tol = std::log(1e-12) + bounds.lower.value();
        const auto dist = transient_distribution(params, start, 0, default_state_count(params, start, m), solver);
        const auto w = dist.weights();
        start_cdf.resize(w.size());
        double run = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) start_cdf[j] = run += w[j];
        for (double& c : start_cdf) c /= run;
    }

    std::vector<double> log_weights(n, kNegInf);
    parallel_for(n, options.workers, [&](std::size_t i) {
        RandomStream rng(seed, i);
        State s = 0;
        if (!start_cdf.empty()) {
            const double u = rng.uniform01();
            s = static_cast<State>(std::upper_bound(start_cdf.begin(), start_cdf.end(), u) - start_cdf.begin());
            s = std::min<State>(s, start_cdf.size() - 1);
        } else if (start > 0.0) {
            s = fold_decomposed(params, start, 0, rng, [](double, State) {});
        }
        const WindowRun run = run_window(s, window, params.alpha(), proposal, rng);
        if (run.state >= m) log_weights[i] = run.log_ratio;
    });

    std::size_t hits = 0;
    std::vector<double> doubled(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (log_weights[i] != kNegInf) ++hits;
        doubled[i] = 2.0 * log_weights[i];
    }
    IsEstimate est{LogProb::zero(), kPosInf, hits, window, std::log(q_up / r_up)};
    if (hits == 0) return est;
    const double log_n = std::log(static_cast<double>(n));
    const double log_mean = log_sum_exp(log_weights) - log_n;
    const double log_second = log_sum_exp(doubled) - log_n;
    const double rel_var = std::max(0.0, std::expm1(log_second - 2.0 * log_mean));
    est.estimate = LogProb::from_log(std::min(0.0, log_mean));
    est.rel_std_err = std::sqrt(rel_var / static_cast<double>(n));
    return est;
}

double lln_sup_check(const ModelParams& params, const ScalingSpec& spec, double T, double eps, std::size_t n,
                     std::uint64_t seed, unsigned workers) {
    if (spec.regime() != Regime::Sublinear) throw std::invalid_argument("lln_sup_check: scaling must be sublinear");
    if (!(T > 0.0) || std::isinf(T)) throw std::invalid_argument("T must be positive and finite");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (n == 0) throw std::invalid_argument("n must be positive");
    const double level = eps * spec.phi(T);
    std::vector<unsigned char> exceeded(n, 0);
    parallel_for(n, workers, [&](std::size_t i) {
        RandomStream rng(seed, i);
        bool hit = false;
        fold_embedded(params, T, 0, rng, [&](double, State s) {
            hit = static_cast<double>(s) > level;
            return !hit;
        });
        exceeded[i] = hit;
    });
    std::size_t count = 0;
    for (auto e : exceeded) count += e;
    return static_cast<double>(count) / static_cast<double>(n);
}

}  // namespace catastrophe
