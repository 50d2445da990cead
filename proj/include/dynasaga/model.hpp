#pragma once

#include <optional>

#include "dynasaga/types.hpp"

namespace dynasaga {

enum class LossKind { LeastSquares, LogisticL2 };

// Loss family for ERM over a sample.
//   least-squares : f(w) = (<a,w> - y)^2                     (lambda unused, 0)
//   logistic-l2   : f(w) = log(1 + exp(-y <a,w>)) + (lambda/2) ||w||^2
// Both are generalized linear: grad f(w) = s(<a,w>, y) * a + lambda * w with a
// scalar s, which the SAGA gradient table exploits.
struct LossModel {
  LossKind kind = LossKind::LeastSquares;
  Scalar lambda = 0.0;
};

struct ProblemConstants {
  Scalar L = 0.0;      // smoothness (per-sample Lipschitz gradient constant)
  Scalar mu = 0.0;     // strong convexity of the empirical risk
  Scalar kappa = 1.0;  // L / mu
};

Scalar loss_value(const LossModel& model, const Vector& w, const Sample& s);

// Derivative of the data term with respect to the margin <a,w>; the gradient
// is scalar * a + lambda * w.
Scalar loss_scalar(const LossModel& model, const Vector& w, const Sample& s);

Vector loss_gradient(const LossModel& model, const Vector& w, const Sample& s);

// Mean loss over the first m samples.
Scalar empirical_risk(const LossModel& model, const Vector& w, const Dataset& data, Index m);

Vector full_gradient(const LossModel& model, const Vector& w, const Dataset& data, Index m);

// Smoothness / strong-convexity constants over the first m samples.
// Least squares: L = 2 max_i ||a_i||^2, mu = lambda_min((2/m) A^T A); pass
// mu_hint to skip the eigenvalue computation (synthetic data with known
// covariance). Logistic-l2: L = 0.25 max_i ||a_i||^2 + lambda, mu = lambda.
ProblemConstants constants(const LossModel& model, const Dataset& data, Index m,
                           std::optional<Scalar> mu_hint = std::nullopt);

}  // namespace dynasaga
