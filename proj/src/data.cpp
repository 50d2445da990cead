#include "dynasaga/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dynasaga/rng.hpp"

namespace dynasaga {

namespace {

[[noreturn]] void parse_fail(long line_no, const std::string& what) {
  throw data_error("libsvm parse error at line " + std::to_string(line_no) + ": " + what);
}

Scalar parse_real(const std::string& tok, long line_no) {
  try {
    std::size_t pos = 0;
    const Scalar v = std::stod(tok, &pos);
    if (pos != tok.size()) parse_fail(line_no, "trailing characters in '" + tok + "'");
    return v;
  } catch (const std::invalid_argument&) {
    parse_fail(line_no, "malformed number '" + tok + "'");
  } catch (const std::out_of_range&) {
    parse_fail(line_no, "number out of range '" + tok + "'");
  }
}

}  // namespace

Dataset parse_libsvm(std::istream& in, LabelMode mode) {
  Dataset data;
  std::vector<Scalar> raw_labels;
  std::string line;
  long line_no = 0;
  Index max_index = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank / comment-only line

    Sample s;
    raw_labels.push_back(parse_real(tok, line_no));
    Index prev = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) parse_fail(line_no, "expected idx:val, got '" + tok + "'");
      const std::string idx_part = tok.substr(0, colon);
      long idx = 0;
      const auto [p, ec] = std::from_chars(idx_part.data(), idx_part.data() + idx_part.size(), idx);
      if (ec != std::errc() || p != idx_part.data() + idx_part.size())
        parse_fail(line_no, "malformed index '" + idx_part + "'");
      if (idx < 1) parse_fail(line_no, "feature index " + std::to_string(idx) + " < 1");
      if (idx <= prev)
        parse_fail(line_no, "non-increasing feature index " + std::to_string(idx));
      const Scalar v = parse_real(tok.substr(colon + 1), line_no);
      if (v != 0.0) {
        s.idx.push_back(static_cast<Index>(idx - 1));
        s.val.push_back(v);
      }
      prev = static_cast<Index>(idx);
      max_index = std::max(max_index, static_cast<Index>(idx));
    }
    data.samples.push_back(std::move(s));
  }

  if (mode == LabelMode::Classification) {
    // first distinct label -> +1 (unless <= 0); second distinct -> -1
    bool have_first = false, have_second = false;
    Scalar first = 0.0, second = 0.0;
    for (Scalar y : raw_labels) {
      if (!have_first) {
        first = y;
        have_first = true;
      } else if (!have_second && y != first) {
        second = y;
        have_second = true;
      }
    }
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      const Scalar y = raw_labels[i];
      data.samples[i].label = (y <= 0.0 || (have_second && y == second)) ? -1.0 : 1.0;
    }
  } else {
    for (std::size_t i = 0; i < raw_labels.size(); ++i) data.samples[i].label = raw_labels[i];
  }

  data.dim = max_index;
  return data;
}

Dataset load_libsvm(const std::string& path, LabelMode mode) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open dataset file: " + path);
  return parse_libsvm(in, mode);
}

void serialize_libsvm(const Dataset& data, std::ostream& out) {
  char buf[64];
  for (const Sample& s : data.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g", s.label);
    out << buf;
    for (std::size_t k = 0; k < s.idx.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", s.val[k]);
      out << ' ' << (s.idx[k] + 1) << ':' << buf;
    }
    out << '\n';
  }
}

void save_libsvm(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open output file: " + path);
  serialize_libsvm(data, out);
}

std::vector<Scalar> diag_covariance(Index d, Scalar min_eig) {
  if (d < 1) throw config_error("diag_covariance: d must be >= 1");
  if (!(min_eig > 0.0 && min_eig <= 1.0))
    throw config_error("diag_covariance: min_eig must be in (0, 1]");
  std::vector<Scalar> eig(static_cast<std::size_t>(d));
  if (d == 1) {
    eig[0] = 1.0;
    return eig;
  }
  for (Index j = 0; j < d; ++j)
    eig[static_cast<std::size_t>(j)] =
        1.0 + (min_eig - 1.0) * static_cast<Scalar>(j) / static_cast<Scalar>(d - 1);
  return eig;
}

std::pair<Dataset, Vector> generate_regression(const SyntheticConfig& cfg) {
  if (cfg.n < 1 || cfg.d < 1) throw config_error("generate_regression: n and d must be >= 1");
  if (cfg.sigma_noise < 0.0) throw config_error("generate_regression: sigma_noise must be >= 0");
  const auto eig = diag_covariance(cfg.d, cfg.min_eig);
  std::vector<Scalar> sd(eig.size());
  for (std::size_t j = 0; j < eig.size(); ++j) sd[j] = std::sqrt(eig[j]);

  Rng rng(cfg.seed);
  Vector w_star;
  if (cfg.w_star) {
    if (cfg.w_star->size() != cfg.d)
      throw config_error("generate_regression: w_star dimension mismatch");
    w_star = *cfg.w_star;
  } else {
    w_star = rng.unit_sphere(cfg.d);
  }

  Dataset data;
  data.dim = cfg.d;
  data.samples.reserve(static_cast<std::size_t>(cfg.n));
  for (Index i = 0; i < cfg.n; ++i) {
    Sample s;
    s.idx.reserve(static_cast<std::size_t>(cfg.d));
    s.val.reserve(static_cast<std::size_t>(cfg.d));
    Scalar margin = 0.0;
    for (Index j = 0; j < cfg.d; ++j) {
      const Scalar x = sd[static_cast<std::size_t>(j)] * rng.gaussian();
      if (x != 0.0) {
        s.idx.push_back(j);
        s.val.push_back(x);
        margin += x * w_star[j];
      }
    }
    const Scalar noise = cfg.sigma_noise > 0.0 ? cfg.sigma_noise * rng.gaussian() : 0.0;
    s.label = margin + noise;
    data.samples.push_back(std::move(s));
  }
  return {std::move(data), std::move(w_star)};
}

Dataset with_sign_labels(Dataset data) {
  for (Sample& s : data.samples) s.label = s.label >= 0.0 ? 1.0 : -1.0;
  return data;
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  const Index n = data.size();
  if (n < 2) throw config_error("split: need at least 2 samples");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw config_error("split: train_fraction must be in (0, 1)");
  const Index n_train =
      static_cast<Index>(std::ceil(spec.train_fraction * static_cast<Scalar>(n)));
  if (n_train < 1 || n_train >= n)
    throw config_error("split: a side would be empty");

  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  Rng rng(spec.seed);
  for (Index i = n - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[rng.uniform_index(static_cast<std::uint64_t>(i) + 1)]);

  Dataset train, test;
  train.dim = test.dim = data.dim;
  train.samples.reserve(static_cast<std::size_t>(n_train));
  test.samples.reserve(static_cast<std::size_t>(n - n_train));
  for (Index i = 0; i < n; ++i) {
    const Sample& s = data[perm[static_cast<std::size_t>(i)]];
    (i < n_train ? train : test).samples.push_back(s);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace dynasaga
