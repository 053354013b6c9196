#include "catastrophe/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace catastrophe {

namespace {

void check_rate(const char* name, double value) {
    if (std::isnan(value) || std::isinf(value)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
    if (!(value > 0.0)) {
        throw std::invalid_argument(std::string(name) + " must be positive");
    }
}

}  // namespace

ModelParams validate_params(double lambda, double mu, double alpha) {
    check_rate("lambda", lambda);
    check_rate("mu", mu);
    check_rate("alpha", alpha);
    return ModelParams(lambda, mu, alpha);
}

}  // namespace catastrophe
