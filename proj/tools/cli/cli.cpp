#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "catastrophe/coupling.hpp"
#include "catastrophe/exact.hpp"
#include "catastrophe/lab.hpp"
#include "catastrophe/poisson.hpp"
#include "catastrophe/process.hpp"
#include "catastrophe/rates.hpp"

namespace catastrophe::cli {

namespace {

using nlohmann::json;

constexpr const char* kUsageLine =
    "usage: catastrophe [--config FILE] [--seed N] [--output PATH] [--format csv|json] [--tol X] "
    "<simulate|exact|rate|bounds|couple|verify> [options]";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// {"seed": 3, "exact": {"t": 5}}: scalars set global options, an object
// selects a subcommand and sets its options.
class JsonConfig : public CLI::Config {
  public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!doc.is_object()) throw UsageError("config must be a JSON object");
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : doc.items()) {
            if (value.is_object()) {
                items.push_back({{key}, "++", {}});
                for (const auto& [name, inner] : value.items()) items.push_back({{key}, name, inputs(key + "." + name, inner)});
                items.push_back({{key}, "--", {}});
            } else {
                items.push_back({{}, key, inputs(key, value)});
            }
        }
        return items;
    }

  private:
    static std::string scalar(const std::string& name, const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw UsageError("config field '" + name + "' must be a string, number, boolean or array of those");
    }
    static std::vector<std::string> inputs(const std::string& name, const json& v) {
        if (!v.is_array()) return {scalar(name, v)};
        std::vector<std::string> out;
        for (const auto& e : v) out.push_back(scalar(name, e));
        return out;
    }
};

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

json number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

json echo_value(const std::string& s) {
    try {
        json j = json::parse(s);
        if (j.is_number() || j.is_boolean()) return j;
    } catch (const json::exception&) {
    }
    return s;
}

json echo_options(const CLI::App& app) {
    json obj = json::object();
    for (const CLI::Option* opt : app.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help" || name == "config" || name == "output") continue;
        std::vector<std::string> values = opt->results();
        if (opt->count() == 0) {
            const std::string d = opt->get_default_str();
            if (d.empty()) continue;
            values = {d};
        }
        if (opt->get_items_expected_max() > 1) {
            json arr = json::array();
            for (const auto& v : values) arr.push_back(echo_value(v));
            obj[name] = std::move(arr);
        } else if (!values.empty()) {
            obj[name] = echo_value(values.back());
        }
    }
    return obj;
}

struct Globals {
    double lambda = 1.0;
    double mu = 1.0;
    double alpha = 1.0;
    std::uint64_t seed = 1;
    std::string output;
    std::string format = "csv";
    double tol = 1e-12;
};

struct Output {
    std::string csv;
    json data;
};

struct SimulateArgs {
    double horizon = 0.0;
    State init = 0;
    std::string sampler = "embedded";
    std::size_t replicas = 1;
};

struct ExactArgs {
    double t = 0.0;
    State init = 0;
    std::size_t n_states = 0;
    std::optional<State> tail;
    std::uint64_t renorm_every = 0;
};

struct RateArgs {
    std::string which;
    double k = 1.0;
    double c = 1.0;
    std::string x_grid;
};

struct BoundsArgs {
    std::string bound;
    double beta = 1.0;
    double z = 0.5;
    double u = 0.5;
    double a = 0.1;
    double v = 1.0;
    double delta = 1.0;
    double phi = 10.0;
};

struct CoupleArgs {
    State x0 = 0;
    State y0 = 0;
    double horizon = 0.0;
    std::size_t replicas = 1;
};

struct VerifyArgs {
    std::string check;
    double b = 1.0;
    double a = 1.0;
    double x = 1.0;
    std::vector<double> T;
    std::size_t n = 10000;
    double eps = 1.0;
    unsigned workers = 1;
    bool tilt = true;
    bool inject_exact = true;
};

Output do_simulate(const Globals& g, const ModelParams& params, const SimulateArgs& a) {
    const Sampler sampler = a.sampler == "embedded" ? Sampler::Embedded : Sampler::Decomposed;
    Output o;
    if (a.replicas == 1) {
        const Trajectory path = sampler == Sampler::Embedded ? simulate_embedded(params, a.horizon, a.init, g.seed)
                                                             : simulate_decomposed(params, a.horizon, a.init, g.seed);
        o.csv = "time,state\n0," + std::to_string(path.initial_state()) + "\n";
        json events = json::array();
        for (const auto& e : path.events()) {
            o.csv += fmt(e.time) + "," + std::to_string(e.state) + "\n";
            events.push_back({e.time, e.state});
        }
        o.data = {{"initial_state", path.initial_state()},
                  {"horizon", path.horizon()},
                  {"terminal_state", path.terminal_state()},
                  {"events", std::move(events)}};
        return o;
    }
    const auto states = sample_terminal_states(params, sampler, a.horizon, a.init, g.seed, a.replicas);
    std::map<State, std::size_t> histogram;
    for (State s : states) ++histogram[s];
    o.csv = "state,count\n";
    json rows = json::array();
    for (const auto& [s, c] : histogram) {
        o.csv += std::to_string(s) + "," + std::to_string(c) + "\n";
        rows.push_back({{"state", s}, {"count", c}});
    }
    o.data = {{"replicas", a.replicas}, {"histogram", std::move(rows)}};
    return o;
}

Output do_exact(const Globals& g, const ModelParams& params, const ExactArgs& a) {
    const State top = std::max(a.init, a.tail.value_or(0));
    SolverOptions options = SolverOptions::with_tol(g.tol);
    options.renorm_every = a.renorm_every;
    const auto solve = [&]() {
        if (a.n_states > 0) return transient_distribution(params, a.t, a.init, a.n_states, options);
        // the default is a starting point; widen until the certificate holds
        std::size_t n = default_state_count(params, a.t, top);
        for (;;) {
            try {
                return transient_distribution(params, a.t, a.init, n, options);
            } catch (const TruncationError&) {
                if (n > (std::size_t{1} << 24)) throw;
                n *= 2;
            }
        }
    };
    const DistributionVector dist = solve();

    Output o;
    json weights = json::array();
    for (double w : dist.weights()) weights.push_back(w);
    o.data = {{"n_states", dist.n_states()},
              {"log_scale", dist.log_scale()},
              {"log_truncation_mass", number(dist.log_truncation_mass())},
              {"log_certified_bound", number(dist.log_certified_bound())},
              {"weights", std::move(weights)}};
    if (a.tail) {
        const LogProb tail = tail_probability(dist, *a.tail);
        o.csv = "threshold,log_tail,log_truncation_mass,log_certified_bound\n" + std::to_string(*a.tail) + "," +
                fmt(tail.value()) + "," + fmt(dist.log_truncation_mass()) + "," + fmt(dist.log_certified_bound()) +
                "\n";
        o.data["tail"] = {{"threshold", *a.tail}, {"log_tail", number(tail.value())}};
    } else {
        std::ostringstream s;
        write_distribution_csv(s, dist);
        o.csv = s.str();
    }
    return o;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, ':')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw UsageError("x-grid must be start:stop:step, got '" + spec + "'");
        parts.push_back(v);
    }
    if (parts.size() != 3) throw UsageError("x-grid must be start:stop:step, got '" + spec + "'");
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0) || !(stop >= start) || !std::isfinite(stop)) throw UsageError("x-grid needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 10'000'000) throw UsageError("x-grid has too many points");
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
    return grid;
}

Output do_rate(const ModelParams& params, const RateArgs& a) {
    Output o;
    o.csv = "x,rate\n";
    json rows = json::array();
    for (double x : parse_grid(a.x_grid)) {
        ExtendedReal r = ExtendedReal::infinity();
        if (a.which == "I1") r = rate_I1(x, params);
        if (a.which == "Jk") r = rate_Jk(x, params, a.k);
        if (a.which == "I2") r = rate_I2(x);
        if (a.which == "window") r = rate_poisson_window(x, params, a.c);
        o.csv += fmt(x) + "," + fmt(r.to_double()) + "\n";
        rows.push_back({{"x", x}, {"rate", number(r.to_double())}});
    }
    o.data = {{"which", a.which}, {"points", std::move(rows)}};
    return o;
}

Output do_bounds(const BoundsArgs& a) {
    Output o;
    if (a.bound == "poisson-lower") {
        const LogBound bound = poisson_lower_tail_bound(a.beta, a.z, a.u);
        const double exact = poisson::log_lower_tail(a.beta, static_cast<std::uint64_t>(std::floor(a.z)));
        o.csv = "beta,z,u,log_bound,log_exact\n" + fmt(a.beta) + "," + fmt(a.z) + "," + fmt(a.u) + "," +
                fmt(bound.value) + "," + fmt(exact) + "\n";
        o.data = {{"bound", a.bound}, {"log_bound", number(bound.value)}, {"log_exact", number(exact)}};
    } else {
        const LogBound bound = catastrophe_sum_bound(a.a, a.v, a.delta, a.phi);
        const auto count = static_cast<std::uint64_t>(std::floor(a.v * a.phi));
        const auto size = static_cast<std::uint64_t>(std::floor(a.delta * a.phi));
        const LogProb exact = uniform_sum_log_cdf(count, size, 2.0 * a.a * a.phi);
        o.csv = "a,v,delta,phi,log_bound,log_exact\n" + fmt(a.a) + "," + fmt(a.v) + "," + fmt(a.delta) + "," +
                fmt(a.phi) + "," + fmt(bound.value) + "," + fmt(exact.value()) + "\n";
        o.data = {{"bound", a.bound}, {"log_bound", number(bound.value)}, {"log_exact", number(exact.value())}};
    }
    return o;
}

Output do_couple(const Globals& g, const ModelParams& params, const CoupleArgs& a) {
    Output o;
    o.csv = "replica,max_discrepancy,initial_gap,terminal_x,terminal_y\n";
    const State gap = a.x0 > a.y0 ? a.x0 - a.y0 : a.y0 - a.x0;
    std::size_t violations = 0;
    State worst = 0;
    json rows = json::array();
    for (std::size_t i = 0; i < a.replicas; ++i) {
        RandomStream rng(g.seed, i);
        const CoupledTrajectory path = simulate_coupled(params, a.x0, a.y0, a.horizon, rng);
        const State d = max_discrepancy(path);
        worst = std::max(worst, d);
        if (d > gap) ++violations;
        const State tx = path.events().empty() ? a.x0 : path.events().back().state_x;
        const State ty = path.events().empty() ? a.y0 : path.events().back().state_y;
        o.csv += std::to_string(i) + "," + std::to_string(d) + "," + std::to_string(gap) + "," + std::to_string(tx) +
                 "," + std::to_string(ty) + "\n";
        json row = {{"replica", i}, {"max_discrepancy", d}, {"terminal_x", tx}, {"terminal_y", ty}};
        if (a.replicas == 1) {
            json events = json::array();
            for (const auto& e : path.events()) events.push_back({e.time, e.state_x, e.state_y});
            row["events"] = std::move(events);
        }
        rows.push_back(std::move(row));
    }
    o.data = {{"initial_gap", gap}, {"worst_discrepancy", worst}, {"violations", violations}, {"paths", std::move(rows)}};
    return o;
}

Output do_verify(const Globals& g, const ModelParams& params, const VerifyArgs& a) {
    const ScalingSpec spec(a.b, a.a);
    Output o;
    if (a.check == "curve" || a.check == "sandwich") {
        const ExperimentResult result = empirical_rate_curve(params, spec, a.x, a.T, g.tol, a.workers);
        if (a.check == "curve") {
            std::ostringstream s;
            write_curve_csv(s, result);
            o.csv = s.str();
            o.data = to_json(result);
            if (result.points.size() >= 2) {
                const RateFit fit = fit_inverse_psi(result);
                o.data["fit"] = {{"rate", fit.rate}, {"slope", fit.slope}, {"heuristic", true}};
            }
            return o;
        }
        o.csv = "T,threshold,window,lower,exact,upper,inside\n";
        json rows = json::array();
        for (const auto& p : result.points) {
            const Sandwich sw = ldp_sandwich(params, spec, a.x, p.T);
            const bool inside = sw.lower.value() <= p.log_tail && p.log_tail <= sw.upper.value;
            o.csv += fmt(p.T) + "," + std::to_string(sw.threshold) + "," + fmt(sw.window) + "," +
                     fmt(sw.lower.value()) + "," + fmt(p.log_tail) + "," + fmt(sw.upper.value) + "," +
                     (inside ? "1" : "0") + "\n";
            rows.push_back({{"T", p.T},
                            {"threshold", sw.threshold},
                            {"window", sw.window},
                            {"lower", number(sw.lower.value())},
                            {"exact", number(p.log_tail)},
                            {"upper", number(sw.upper.value)},
                            {"inside", inside}});
        }
        o.data = {{"points", std::move(rows)}};
        return o;
    }
    if (a.check == "is") {
        IsOptions options;
        options.tilt = a.tilt;
        options.inject_exact = a.inject_exact;
        options.workers = a.workers;
        o.csv = "T,threshold,log_estimate,rel_std_err,hits,theta\n";
        json rows = json::array();
        for (double T : a.T) {
            const IsEstimate e = is_estimate_tail(params, spec, a.x, T, a.n, g.seed, options);
            const State m = tail_threshold(spec, a.x, T);
            o.csv += fmt(T) + "," + std::to_string(m) + "," + fmt(e.estimate.value()) + "," + fmt(e.rel_std_err) + "," +
                     std::to_string(e.hits) + "," + fmt(e.theta) + "\n";
            rows.push_back({{"T", T},
                            {"threshold", m},
                            {"log_estimate", number(e.estimate.value())},
                            {"rel_std_err", number(e.rel_std_err)},
                            {"hits", e.hits},
                            {"theta", e.theta}});
        }
        o.data = {{"points", std::move(rows)}};
        return o;
    }
    o.csv = "T,eps,n,fraction\n";
    json rows = json::array();
    for (double T : a.T) {
        const double f = lln_sup_check(params, spec, T, a.eps, a.n, g.seed, a.workers);
        o.csv += fmt(T) + "," + fmt(a.eps) + "," + std::to_string(a.n) + "," + fmt(f) + "\n";
        rows.push_back({{"T", T}, {"fraction", f}});
    }
    o.data = {{"points", std::move(rows)}};
    return o;
}

void emit(const Globals& g, const std::string& command, const Output& result, const json& config, std::ostream& out) {
    std::string body;
    if (g.format == "json") {
        body = json{{"config", config}, {"result", result.data}}.dump(2) + "\n";
    } else {
        body = result.csv;
    }
    const char* dir = std::getenv("CATASTROPHE_OUTPUT_DIR");
    std::filesystem::path path;
    if (!g.output.empty()) {
        path = g.output;
        if (path.is_relative() && dir != nullptr && *dir != '\0') path = std::filesystem::path(dir) / path;
    } else if (dir != nullptr && *dir != '\0') {
        path = std::filesystem::path(dir) / (command + "." + g.format);
    } else {
        out << body;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open output file '" + path.string() + "'");
    file << body;
    file.flush();
    if (!file) throw IoError("failed writing output file '" + path.string() + "'");
}

std::string escape(const std::string& s) {
    std::string r;
    for (char c : s) {
        if (c == '"' || c == '\\') r += '\\';
        if (c == '\n') {
            r += "\\n";
            continue;
        }
        r += c;
    }
    return r;
}

int fail(std::ostream& err, int code, const char* kind, const std::string& message) {
    err << "error code=" << code << " kind=" << kind << " message=\"" << escape(message) << "\"\n";
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Poisson process with uniform catastrophes: simulation, exact transient laws, rate functions",
                 "catastrophe"};
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.option_defaults()->always_capture_default();
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file; command-line flags take precedence");

    Globals g;
    app.add_option("--lambda", g.lambda, "regular-growth weight");
    app.add_option("--mu", g.mu, "catastrophe weight");
    app.add_option("--alpha", g.alpha, "event rate");
    app.add_option("--seed", g.seed, "64-bit seed");
    app.add_option("--output", g.output, "output file (relative paths resolve under CATASTROPHE_OUTPUT_DIR)");
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tol", g.tol, "solver tolerance");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "sample a trajectory, or a terminal-state histogram");
    simulate->add_option("--horizon", sim.horizon)->required();
    simulate->add_option("--init", sim.init);
    simulate->add_option("--sampler", sim.sampler)->check(CLI::IsMember({"embedded", "decomposed"}));
    simulate->add_option("--replicas", sim.replicas)->check(CLI::PositiveNumber);

    ExactArgs ex;
    auto* exact = app.add_subcommand("exact", "transient distribution or tail probability by uniformization");
    exact->add_option("--t", ex.t)->required();
    exact->add_option("--init", ex.init);
    exact->add_option("--n-states", ex.n_states, "0 starts from t and the largest queried state and widens as needed");
    exact->add_option("--tail", ex.tail, "report ln P(xi(t) >= m) instead of the distribution");
    exact->add_option("--renorm-every", ex.renorm_every, "extra renormalization cadence (0 = only when needed)");

    RateArgs ra;
    auto* rate = app.add_subcommand("rate", "tabulate a rate function");
    rate->add_option("--which", ra.which)->required()->check(CLI::IsMember({"I1", "Jk", "I2", "window"}));
    rate->add_option("--k", ra.k);
    rate->add_option("--c", ra.c);
    rate->add_option("--x-grid", ra.x_grid, "start:stop:step")->required();

    BoundsArgs bo;
    auto* bounds = app.add_subcommand("bounds", "evaluate a tail bound next to the exact value");
    bounds->add_option("--bound", bo.bound)->required()->check(CLI::IsMember({"poisson-lower", "catastrophe-sum"}));
    bounds->add_option("--beta", bo.beta);
    bounds->add_option("--z", bo.z);
    bounds->add_option("--u", bo.u);
    bounds->add_option("--a", bo.a);
    bounds->add_option("--v", bo.v);
    bounds->add_option("--delta", bo.delta);
    bounds->add_option("--phi", bo.phi);

    CoupleArgs co;
    auto* couple = app.add_subcommand("couple", "coupled paths from two starting states");
    couple->add_option("--x0", co.x0)->required();
    couple->add_option("--y0", co.y0)->required();
    couple->add_option("--horizon", co.horizon)->required();
    couple->add_option("--replicas", co.replicas)->check(CLI::PositiveNumber);

    VerifyArgs ve;
    auto* verify = app.add_subcommand("verify", "numerical checks of the limit theorems");
    verify->add_option("--check", ve.check)->required()->check(CLI::IsMember({"curve", "sandwich", "is", "lln"}));
    verify->add_option("--b", ve.b, "phi(T) = b T^a");
    verify->add_option("--a", ve.a, "phi(T) = b T^a");
    verify->add_option("--x", ve.x);
    verify->add_option("--T", ve.T, "horizons")->required()->expected(1, -1);
    verify->add_option("--n", ve.n, "replicas");
    verify->add_option("--eps", ve.eps);
    verify->add_option("--workers", ve.workers)->check(CLI::PositiveNumber);
    verify->add_option("--tilt", ve.tilt);
    verify->add_option("--inject-exact", ve.inject_exact);

    for (auto* sub : app.get_subcommands({})) sub->configurable();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::FileError& e) {
        return fail(err, kIo, "io", e.what());
    } catch (const CLI::ConfigError& e) {
        std::string message = e.what();
        const std::string prefix = "INI was not able to parse ";
        if (message.rfind(prefix, 0) == 0) message = "unknown config field '" + message.substr(prefix.size()) + "'";
        fail(err, kUsage, "config", message);
        err << kUsageLine << "\n";
        return kUsage;
    } catch (const CLI::ParseError& e) {
        fail(err, kUsage, "usage", e.what());
        err << kUsageLine << "\n";
        return kUsage;
    } catch (const UsageError& e) {
        fail(err, kUsage, "config", e.what());
        err << kUsageLine << "\n";
        return kUsage;
    }

    std::set<std::string> chosen;
    for (auto* sub : app.get_subcommands({})) {
        if (sub->parsed()) chosen.insert(sub->get_name());
    }
    if (chosen.size() != 1) {
        fail(err, kUsage, "usage", "exactly one subcommand is required");
        err << kUsageLine << "\n";
        return kUsage;
    }
    const std::string command = *chosen.begin();
    const CLI::App* sub = app.get_subcommand(command);

    try {
        const ModelParams params = validate_params(g.lambda, g.mu, g.alpha);
        if (!(g.tol > 0.0 && g.tol < 1.0)) throw UsageError("tol must lie in (0, 1)");
        json config = echo_options(app);
        config[command] = echo_options(*sub);

        Output result;
        if (command == "simulate") result = do_simulate(g, params, sim);
        if (command == "exact") result = do_exact(g, params, ex);
        if (command == "rate") result = do_rate(params, ra);
        if (command == "bounds") result = do_bounds(bo);
        if (command == "couple") result = do_couple(g, params, co);
        if (command == "verify") result = do_verify(g, params, ve);
        emit(g, command, result, config, out);
    } catch (const TruncationError& e) {
        return fail(err, kTruncation, "truncation", e.what());
    } catch (const IoError& e) {
        return fail(err, kIo, "io", e.what());
    } catch (const UsageError& e) {
        return fail(err, kUsage, "config", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(err, kUsage, "config", e.what());
    } catch (const std::domain_error& e) {
        return fail(err, kUsage, "config", e.what());
    } catch (const std::out_of_range& e) {
        return fail(err, kUsage, "config", e.what());
    } catch (const std::exception& e) {
        return fail(err, kInternal, "internal", e.what());
    }
    return kOk;
}

}  // namespace catastrophe::cli
