#include "dynasaga/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace dynasaga {

namespace {

void check_dim(const Vector& w, const Sample& s) {
  if (!s.idx.empty() && s.idx.back() >= w.size())
    throw data_error("sample feature index exceeds weight dimension");
}

inline Scalar sigmoid(Scalar z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + exp(z)) without overflow
inline Scalar log1pexp(Scalar z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

Scalar loss_value(const LossModel& model, const Vector& w, const Sample& s) {
  check_dim(w, s);
  const Scalar t = s.dot(w);
  switch (model.kind) {
    case LossKind::LeastSquares: {
      const Scalar r = t - s.label;
      return r * r;
    }
    case LossKind::LogisticL2:
      return log1pexp(-s.label * t) + 0.5 * model.lambda * w.squaredNorm();
  }
  throw error("unreachable loss kind");
}

Scalar loss_scalar(const LossModel& model, const Vector& w, const Sample& s) {
  check_dim(w, s);
  const Scalar t = s.dot(w);
  switch (model.kind) {
    case LossKind::LeastSquares:
      return 2.0 * (t - s.label);
    case LossKind::LogisticL2:
      return -s.label * sigmoid(-s.label * t);
  }
  throw error("unreachable loss kind");
}

Vector loss_gradient(const LossModel& model, const Vector& w, const Sample& s) {
  const Scalar c = loss_scalar(model, w, s);
  if (model.kind == LossKind::LogisticL2 && model.lambda != 0.0) {
    Vector g = model.lambda * w;
    s.add_scaled(c, g);
    return g;
  }
  // sparse fast path: only the touched coordinates are nonzero
  Vector g = Vector::Zero(w.size());
  s.add_scaled(c, g);
  return g;
}

Scalar empirical_risk(const LossModel& model, const Vector& w, const Dataset& data, Index m) {
  if (m < 1 || m > data.size()) throw data_error("empirical_risk: m out of range");
  Scalar acc = 0.0;
  if (model.kind == LossKind::LogisticL2) {
    for (Index i = 0; i < m; ++i) {
      const Sample& s = data[i];
      check_dim(w, s);
      acc += log1pexp(-s.label * s.dot(w));
    }
    return acc / static_cast<Scalar>(m) + 0.5 * model.lambda * w.squaredNorm();
  }
  for (Index i = 0; i < m; ++i) acc += loss_value(model, w, data[i]);
  return acc / static_cast<Scalar>(m);
}

Vector full_gradient(const LossModel& model, const Vector& w, const Dataset& data, Index m) {
  if (m < 1 || m > data.size()) throw data_error("full_gradient: m out of range");
  Vector g = Vector::Zero(w.size());
  const Scalar inv_m = 1.0 / static_cast<Scalar>(m);
  for (Index i = 0; i < m; ++i)
    data[i].add_scaled(inv_m * loss_scalar(model, w, data[i]), g);
  if (model.kind == LossKind::LogisticL2 && model.lambda != 0.0) g += model.lambda * w;
  return g;
}

ProblemConstants constants(const LossModel& model, const Dataset& data, Index m,
                           std::optional<Scalar> mu_hint) {
  if (m < 1 || m > data.size()) throw data_error("constants: m out of range");
  Scalar max_sq = 0.0;
  for (Index i = 0; i < m; ++i) max_sq = std::max(max_sq, data[i].squared_norm());

  ProblemConstants pc;
  if (model.kind == LossKind::LogisticL2) {
    if (model.lambda <= 0.0)
      throw numerical_error("logistic-l2 requires lambda > 0 for strong convexity");
    pc.L = 0.25 * max_sq + model.lambda;
    pc.mu = model.lambda;
  } else {
    pc.L = 2.0 * max_sq;
    if (mu_hint) {
      pc.mu = *mu_hint;
    } else {
      const Index d = data.dim;
      // Hessian of the empirical risk is (2/m) A^T A. Exact smallest
      // eigenvalue for moderate d; shifted power iteration above that.
      Matrix H = Matrix::Zero(d, d);
      for (Index i = 0; i < m; ++i) {
        const Sample& s = data[i];
        for (std::size_t a = 0; a < s.idx.size(); ++a)
          for (std::size_t b = 0; b < s.idx.size(); ++b)
            H(s.idx[a], s.idx[b]) += s.val[a] * s.val[b];
      }
      H *= 2.0 / static_cast<Scalar>(m);
      if (d <= 512) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
        pc.mu = eig.eigenvalues().minCoeff();
      } else {
        auto power_iter = [&](const Matrix& B) {
          Vector v = Vector::Ones(d).normalized();
          Scalar lam = 0.0;
          for (int it = 0; it < 1000; ++it) {
            Vector u = B * v;
            const Scalar nl = u.norm();
            if (nl == 0.0) return 0.0;
            u /= nl;
            if (std::abs(nl - lam) <= 1e-12 * std::max(1.0, nl)) return nl;
            lam = nl;
            v = u;
          }
          return lam;
        };
        const Scalar lmax = power_iter(H);
        const Scalar shifted = power_iter(Matrix(lmax * Matrix::Identity(d, d) - H));
        pc.mu = lmax - shifted;
      }
    }
    if (pc.mu <= 0.0)
      throw numerical_error("empirical risk is not strongly convex (mu <= 0)");
  }
  pc.kappa = pc.L / pc.mu;
  return pc;
}

}  // namespace dynasaga
