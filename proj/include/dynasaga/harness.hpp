#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynasaga/analysis.hpp"
#include "dynasaga/data.hpp"
#include "dynasaga/optim.hpp"

namespace dynasaga {

struct MethodSpec {
  enum Algo { SagaFixed, DynaLinear, DynaAlternating, Sgd, Ssvrg, MixedSgdSvrg };
  std::string name;
  Algo algo = SagaFixed;
  Index fixed_m = 0;            // SagaFixed: 0 -> full train size
  bool fixed_opt_size = false;  // SagaFixed at the optimal size from the V(m) bound
  std::optional<EtaRule> eta;   // defaults per algo when absent
  std::string schedule_spec;    // DynaLinear with an explicit `--schedule` spec
};

// Method names accepted by the CLI / config:
//   saga | saga-opt | dynasaga-linear | dynasaga-alternating | dynasaga:<sched>
//   sgd | sgd-0.05 | sgd-0.005 | ssvrg | sgd-svrg
MethodSpec parse_method(const std::string& name);

struct ExperimentConfig {
  // source: a LIBSVM file, or the synthetic generator when data_path is empty
  std::string data_path;
  SyntheticConfig synth;        // synth.seed is derived from master_seed
  bool synth_binarize = false;  // sign labels (classification surrogate)

  LossKind loss = LossKind::LogisticL2;
  Scalar lambda = -1.0;      // explicit regularizer; < 0 -> use lambda_exp rule
  Scalar lambda_exp = 0.5;   // lambda = n_train^(-p)
  std::optional<Scalar> mu_hint;

  Scalar train_fraction = 0.9;
  std::vector<MethodSpec> methods;
  long T = 0;  // 0 -> one pass over the training split
  int seeds = 10;
  std::uint64_t master_seed = 1;
  long record_every = 0;
  int record_count = 50;
  int jobs = 1;
  bool half_data = false;        // cap schedules at T/2
  bool lazy_growth = false;      // non-alternating growth evaluates at current w
  bool linear_formula_variant = false;
  Index kappa0 = 0;              // 0 -> ceil(kappa)
  Scalar eta_numerator = 0.3;    // saga-table numerator
  Scalar bound_c_over_d = 1.0;   // C/D for the saga-opt size
};

struct ReportRow {
  std::string method;
  int seed_count = 0;
  long t = 0;
  Index m = 0;
  Scalar emp_mean_log2 = 0.0;
  Scalar emp_std_log2 = 0.0;
  Scalar exp_mean_log2 = 0.0;
  Scalar exp_std_log2 = 0.0;
  // linear-scale seed means, kept for programmatic consumers (not in the CSV)
  Scalar emp_mean = 0.0;
  Scalar exp_mean = 0.0;
};

struct Report {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ReportRow> rows;
};

struct ReferenceOptimum {
  Vector w;
  Scalar residual = 0.0;  // final full-gradient norm
  long steps = 0;
  bool converged = false;
};

// High-precision empirical minimizer: fixed-size SAGA at eta = 0.3/(L + mu n)
// until ||full gradient|| <= tol, checked once per pass, capped at cap_passes
// passes.
ReferenceOptimum reference_optimum(const LossModel& model, const Dataset& train,
                                   const ProblemConstants& pc, std::uint64_t seed,
                                   Scalar tol = 1e-10, long cap_passes = 200);

Report run_experiment(const ExperimentConfig& cfg);

struct SlopeConfig {
  std::vector<Index> sizes;  // empty -> 512..8192 (powers of two)
  enum KappaRule { Sqrt, Pow075 } rule = Sqrt;
  Index d = 10;
  Scalar sigma = 0.35;
  int seeds = 10;
  std::uint64_t master_seed = 1;
  Scalar eta_numerator = 0.17;
  bool linear_formula_variant = false;
};

struct SlopeResult {
  Report report;
  Scalar slope = 0.0;
  std::vector<std::pair<Scalar, Scalar>> points;  // (n, mean suboptimality)
};

// Synthetic convergence-rate measurement: for each n, generate least-squares
// data with covariance endpoints (1, 1/kappa(n)), run the Linear strategy for
// T = n steps, average the final suboptimality over seeds, and fit the log-log
// slope.
SlopeResult slope_experiment(const SlopeConfig& cfg);

std::string csv_string(const Report& report);
void emit_csv(const Report& report, const std::string& path);

}  // namespace dynasaga
