#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace dynasaga {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Error hierarchy; the CLI maps these onto exit codes.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct config_error : error {  // usage / configuration problems -> exit 1
  using error::error;
};
struct data_error : error {  // parse failures, dimension mismatches -> exit 2
  using error::error;
};
struct numerical_error : error {  // reference optimum not converged etc. -> exit 3
  using error::error;
};

// One observation: sparse feature vector plus a label. Feature indices are
// 0-based internally (the LIBSVM format is 1-based on disk) and strictly
// increasing; zero values are never stored.
struct Sample {
  std::vector<Index> idx;
  std::vector<Scalar> val;
  Scalar label = 0.0;

  Index nnz() const { return static_cast<Index>(idx.size()); }

  Scalar dot(const Vector& w) const {
    Scalar s = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) s += val[k] * w[idx[k]];
    return s;
  }

  // out += c * features
  void add_scaled(Scalar c, Vector& out) const {
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] += c * val[k];
  }

  Scalar squared_norm() const {
    Scalar s = 0.0;
    for (Scalar v : val) s += v * v;
    return s;
  }
};

// Ordered, immutable-after-construction collection of samples. The prefix of
// length m is the active sub-sample at effective size m.
struct Dataset {
  std::vector<Sample> samples;
  Index dim = 0;

  Index size() const { return static_cast<Index>(samples.size()); }
  const Sample& operator[](Index i) const { return samples[static_cast<std::size_t>(i)]; }
};

}  // namespace dynasaga
