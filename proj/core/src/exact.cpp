#include "catastrophe/exact.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "catastrophe/poisson.hpp"

namespace catastrophe {

namespace {

constexpr double kLow = 1e-100;
constexpr double kHigh = 1e100;
// The accumulated mixture is held with its largest term in [1e100, 1e200],
// leaving roughly 940 nats below the maximum before entries underflow.
constexpr double kAccCeiling = 1e200;
const double kLogAccTarget = std::log(1e100);

std::vector<double> make_reciprocals(std::size_t n) {
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) r[i] = 1.0 / static_cast<double>(i);
    return r;
}

double max_of(std::span<const double> v) {
    double hi = 0.0;
    for (double x : v) hi = std::max(hi, x);
    return hi;
}

void check_time(double t) {
    if (!(t >= 0.0) || std::isinf(t)) throw std::invalid_argument("t must be finite and >= 0");
}

}  // namespace

DistributionVector::DistributionVector(std::vector<double> weights, double log_scale, double log_truncation_mass,
                                       double log_certified_bound)
    : weights_(std::move(weights)),
      log_scale_(log_scale),
      log_truncation_mass_(log_truncation_mass),
      log_certified_bound_(log_certified_bound) {
    if (weights_.empty()) throw std::invalid_argument("DistributionVector: at least one state is required");
    for (double w : weights_) {
        if (!(w >= 0.0) || std::isinf(w)) throw std::invalid_argument("DistributionVector: weights must be finite and >= 0");
    }
}

DistributionVector DistributionVector::point_mass(std::size_t n_states, State at) {
    if (at >= n_states) throw std::out_of_range("point_mass: state outside {0..n_states-1}");
    std::vector<double> w(n_states, 0.0);
    w[at] = 1.0;
    return DistributionVector(std::move(w), 0.0);
}

double DistributionVector::probability(State j) const { return std::exp(log_probability(j)); }

double DistributionVector::log_probability(State j) const {
    const double w = weights_.at(j);
    return w > 0.0 ? std::log(w) + log_scale_ : kNegInf;
}

double DistributionVector::total_mass() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    const double log_sum = s > 0.0 ? std::log(s) + log_scale_ : kNegInf;
    return std::exp(log_add(log_sum, log_truncation_mass_));
}

SolverOptions SolverOptions::with_tol(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    SolverOptions o;
    o.log_tol = std::log(tol);
    return o;
}

PushforwardResult pushforward_kernel(std::span<const double> in, std::span<double> out, std::size_t active,
                                     double p_up, std::span<const double> reciprocals) {
    const std::size_t n = in.size();
    const double q = 1.0 - p_up;
    const std::size_t hi = std::min(active + 1, n);
    // suffix = sum_{i > j} in[i] / i
    double suffix = 0.0;
    for (std::size_t j = hi; j-- > 0;) {
        double v = q * suffix;
        if (j >= 2) {
            v += p_up * in[j - 1];
        } else if (j == 1) {
            v += in[0];
        }
        out[j] = v;
        if (j >= 1 && j < active) suffix += in[j] * reciprocals[j];
    }
    double leaked = 0.0;
    if (active == n) leaked = n == 1 ? in[0] : p_up * in[n - 1];
    return {leaked, hi};
}

DistributionVector pushforward_step(const DistributionVector& dist, const ModelParams& params) {
    const auto in = dist.weights();
    std::vector<double> out(in.size(), 0.0);
    const auto recip = make_reciprocals(in.size());
    const auto [leaked, active] = pushforward_kernel(in, out, in.size(), params.p_up(), recip);
    (void)active;
    double log_trunc = dist.log_truncation_mass();
    if (leaked > 0.0) log_trunc = log_add(log_trunc, std::log(leaked) + dist.log_scale());
    return DistributionVector(std::move(out), dist.log_scale(), log_trunc, dist.log_certified_bound());
}

std::size_t default_state_count(const ModelParams& params, double t, State threshold) {
    check_time(t);
    const double a = params.alpha() * t;
    const double n = std::ceil(static_cast<double>(threshold) + a + 8.0 * std::sqrt(a));
    return std::max<std::size_t>(static_cast<std::size_t>(n), threshold + 1);
}

DistributionVector transient_distribution(const ModelParams& params, double t, State init, std::size_t n_states,
                                          const SolverOptions& options) {
    check_time(t);
    if (n_states == 0) throw std::invalid_argument("n_states must be positive");
    if (init >= n_states) throw std::invalid_argument("init must be below n_states");

    const double a = params.alpha() * t;
    const double p_up = params.p_up();
    // Half of the budget goes to clipping the Poisson series.
    const std::uint64_t n_max = poisson::series_length(a, options.log_tol - std::log(2.0));
    const double log_series_rest = poisson::log_upper_tail(a, n_max + 1);

    const auto recip = make_reciprocals(n_states);
    std::vector<double> v(n_states, 0.0);
    std::vector<double> scratch(n_states, 0.0);
    std::vector<double> acc(n_states, 0.0);
    v[init] = 1.0;
    double log_scale_v = 0.0;
    double v_max = 1.0;
    std::size_t active = init + 1;
    double log_lost_v = kNegInf;  // mass of the chain lost above the top state so far

    bool acc_started = false;
    double log_scale_acc = 0.0;
    double log_trunc = log_series_rest;

    // ln P(Poisson(a) = n), carried in extended precision: over ~1e5 terms the
    // double recursion drifts by ~1e-10 in total mass.
    long double log_wl = -a;
    const long double log_al = a > 0.0 ? std::log(static_cast<long double>(a)) : 0.0L;
    for (std::uint64_t n = 0;; ++n) {
        if (n > 0) log_wl += log_al - std::log(static_cast<long double>(n));
        const double log_w = static_cast<double>(log_wl);

        if (v_max > 0.0) {
            const double log_term = log_w + log_scale_v;
            if (!acc_started) {
                log_scale_acc = log_term + std::log(v_max) - kLogAccTarget;
                acc_started = true;
            }
            double coeff = std::exp(log_term - log_scale_acc);
            if (coeff * v_max > kAccCeiling) {
                const double new_scale = log_term + std::log(v_max) - kLogAccTarget;
                const double shrink = std::exp(log_scale_acc - new_scale);
                for (double& x : acc) x *= shrink;
                log_scale_acc = new_scale;
                coeff = std::exp(log_term - log_scale_acc);
            }
            if (coeff > 0.0) {
                for (std::size_t j = 0; j < active; ++j) acc[j] += coeff * v[j];
            }
        }
        log_trunc = log_add(log_trunc, log_w + log_lost_v);

        if (n == n_max) break;

        const auto step = pushforward_kernel(v, scratch, active, p_up, recip);
        if (step.leaked > 0.0) log_lost_v = log_add(log_lost_v, std::log(step.leaked) + log_scale_v);
        std::swap(v, scratch);
        active = step.active;

        v_max = max_of(std::span<const double>(v).first(active));
        const bool forced = options.renorm_every > 0 && (n + 1) % options.renorm_every == 0;
        if (v_max > 0.0 && (forced || v_max < kLow || v_max > kHigh)) {
            const double inv = 1.0 / v_max;
            for (std::size_t j = 0; j < active; ++j) v[j] *= inv;
            log_scale_v += std::log(v_max);
            v_max = 1.0;
        }
    }

    if (log_trunc > options.log_tol) {
        std::ostringstream msg;
        msg << "truncation mass exp(" << log_trunc << ") exceeds tolerance exp(" << options.log_tol << ") at t=" << t
            << " with " << n_states << " states";
        throw TruncationError(msg.str());
    }
    const double log_certified = log_add(truncation_error_bound(params, t, n_states, init).value, log_series_rest);
    return DistributionVector(std::move(acc), log_scale_acc, log_trunc, log_certified);
}

DistributionVector transient_distribution(const ModelParams& params, double t, State init, std::size_t n_states,
                                          double tol) {
    return transient_distribution(params, t, init, n_states, SolverOptions::with_tol(tol));
}

LogProb tail_probability(const DistributionVector& dist, State m) {
    if (m > dist.max_state()) throw std::out_of_range("tail_probability: threshold above the top state");
    const auto w = dist.weights();
    double sum = 0.0;
    for (std::size_t j = w.size(); j-- > m;) sum += w[j];
    if (sum == 0.0) return LogProb::zero();
    return LogProb::from_log(std::min(0.0, std::log(sum) + dist.log_scale()));
}

LogBound truncation_error_bound(const ModelParams& params, double t, std::size_t n_states, State init) {
    check_time(t);
    if (n_states <= init) return LogBound{0.0};
    return LogBound{poisson::log_upper_tail(params.alpha() * t, n_states - init)};
}

void write_distribution_csv(std::ostream& out, const DistributionVector& dist) {
    const auto old_precision = out.precision(17);
    out << "# log_scale=" << dist.log_scale() << '\n';
    out << "# truncation_mass=" << dist.truncation_mass() << '\n';
    out << "# log_truncation_mass=" << dist.log_truncation_mass() << '\n';
    out << "# log_certified_bound=" << dist.log_certified_bound() << '\n';
    out << "state,weight\n";
    const auto w = dist.weights();
    for (std::size_t j = 0; j < w.size(); ++j) out << j << ',' << w[j] << '\n';
    out.precision(old_precision);
}

DistributionVector read_distribution_csv(std::istream& in) {
    double log_scale = 0.0;
    double log_trunc = kNegInf;
    double log_cert = kNegInf;
    std::vector<double> weights;
    std::string line;
    bool header_seen = false;
    auto parse = [](const std::string& s) {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::runtime_error("read_distribution_csv: bad number '" + s + "'");
        return v;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            if (key == "log_scale") log_scale = parse(value);
            if (key == "log_truncation_mass") log_trunc = parse(value);
            if (key == "log_certified_bound") log_cert = parse(value);
            continue;
        }
        if (!header_seen) {
            if (line != "state,weight") throw std::runtime_error("read_distribution_csv: missing header");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("read_distribution_csv: malformed row");
        const auto state = static_cast<std::size_t>(std::stoull(line.substr(0, comma)));
        if (state != weights.size()) throw std::runtime_error("read_distribution_csv: states out of order");
        weights.push_back(parse(line.substr(comma + 1)));
    }
    return DistributionVector(std::move(weights), log_scale, log_trunc, log_cert);
}

}  // namespace catastrophe
