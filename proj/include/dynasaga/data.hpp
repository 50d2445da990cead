#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>

#include "dynasaga/types.hpp"

namespace dynasaga {

enum class LabelMode { Classification, Regression };

// LIBSVM text format: one sample per line, `label idx:val idx:val ...` with
// strictly increasing 1-based indices; `#` starts a comment. Classification
// mode maps labels to ±1 (any label <= 0, or equal to the second distinct
// label seen, becomes -1); regression mode keeps labels verbatim.
Dataset parse_libsvm(std::istream& in, LabelMode mode = LabelMode::Classification);
Dataset load_libsvm(const std::string& path, LabelMode mode = LabelMode::Classification);

void serialize_libsvm(const Dataset& data, std::ostream& out);
void save_libsvm(const Dataset& data, const std::string& path);

// Synthetic regression: x_i ~ N(0, Sigma) with Sigma diagonal, linearly
// spaced from 1 down to min_eig; y_i = <x_i, w*> + eps, eps ~ N(0, sigma^2).
struct SyntheticConfig {
  Index n = 0;
  Index d = 0;
  Scalar sigma_noise = 0.0;
  Scalar min_eig = 1.0;  // smallest covariance eigenvalue; design kappa = 1/min_eig
  std::uint64_t seed = 0;
  std::optional<Vector> w_star;  // drawn uniform on the unit sphere if absent
};

std::vector<Scalar> diag_covariance(Index d, Scalar min_eig);

std::pair<Dataset, Vector> generate_regression(const SyntheticConfig& cfg);

// Replace labels by their sign (for classification surrogates of the
// regression generator).
Dataset with_sign_labels(Dataset data);

struct SplitSpec {
  Scalar train_fraction = 0.9;
  std::uint64_t seed = 0;
};

// Seeded uniform permutation; first ceil(fraction * n) samples go to train.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

}  // namespace dynasaga
