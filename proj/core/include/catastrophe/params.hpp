#pragma once

#include <cstdint>

namespace catastrophe {

using State = std::uint64_t;

/// Rates of the Poisson process with uniform catastrophes.
///
/// Events arrive at total rate alpha. Each event is an up-jump with
/// probability lambda / (lambda + mu), otherwise a catastrophe that resets
/// the state to a uniform point of {0, ..., i-1}. Equivalently, up-jumps and
/// catastrophes are independent Poisson streams with rates rate_up() and
/// rate_catastrophe(), which sum to alpha.
///
/// Instances only come out of validate_params, so every field is positive
/// and finite.
class ModelParams {
  public:
    double lambda() const { return lambda_; }
    double mu() const { return mu_; }
    double alpha() const { return alpha_; }

    double p_up() const { return lambda_ / (lambda_ + mu_); }
    double p_catastrophe() const { return mu_ / (lambda_ + mu_); }
    double rate_up() const { return alpha_ * p_up(); }
    double rate_catastrophe() const { return alpha_ * p_catastrophe(); }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

  private:
    friend ModelParams validate_params(double lambda, double mu, double alpha);
    ModelParams(double lambda, double mu, double alpha) : lambda_(lambda), mu_(mu), alpha_(alpha) {}

    double lambda_;
    double mu_;
    double alpha_;
};

/// Throws std::invalid_argument naming the first offending field, e.g.
/// "lambda must be positive" or "alpha must be finite".
ModelParams validate_params(double lambda, double mu, double alpha);

}  // namespace catastrophe
