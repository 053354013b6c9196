#include <cmath>
#include <iomanip>
#include <ostream>

#include <nlohmann/json.hpp>

#include "catastrophe/lab.hpp"

namespace catastrophe {

namespace {

// JSON has no infinities; they are written as strings.
nlohmann::json number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

}  // namespace

nlohmann::json to_json(const ExperimentResult& result) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : result.points) {
        points.push_back({
            {"T", p.T},
            {"psi", p.psi},
            {"threshold", p.threshold},
            {"n_states", p.n_states},
            {"log_tail", number(p.log_tail)},
            {"normalized", number(p.normalized)},
            {"truncation_certificate", number(p.truncation_certificate)},
            {"mass_balance_error", p.mass_balance_error},
        });
    }
    return {
        {"params", {{"lambda", result.params.lambda()}, {"mu", result.params.mu()}, {"alpha", result.params.alpha()}}},
        {"scaling", {{"b", result.spec.b()}, {"a", result.spec.a()}, {"regime", to_string(result.spec.regime())}}},
        {"x", result.x},
        {"tol", result.tol},
        {"reference_rate", number(result.reference_rate)},
        {"points", std::move(points)},
    };
}

void write_curve_csv(std::ostream& out, const ExperimentResult& result) {
    const auto old_precision = out.precision(17);
    out << "T,psi,log_tail,normalized,reference\n";
    for (const auto& p : result.points) {
        out << p.T << ',' << p.psi << ',' << p.log_tail << ',' << p.normalized << ',' << result.reference_rate << '\n';
    }
    out.precision(old_precision);
}

}  // namespace catastrophe
