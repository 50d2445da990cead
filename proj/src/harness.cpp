#include "dynasaga/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "dynasaga/rng.hpp"

namespace dynasaga {

namespace {

constexpr Scalar kLogClamp = 1e-300;

Scalar log2_clamped(Scalar x) { return std::log2(std::max(x, kLogClamp)); }

std::string fmt17(Scalar v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

EtaRule default_eta(MethodSpec::Algo algo, Scalar saga_numerator) {
  switch (algo) {
    case MethodSpec::Sgd:
      return EtaRule::decreasing(0.1);
    case MethodSpec::Ssvrg:
    case MethodSpec::MixedSgdSvrg:
      return EtaRule::fixed(1.0 / 90.0);  // 1/(10 b^p) with b = 3, p = 2
    default:
      return EtaRule::saga_table(saga_numerator);
  }
}

}  // namespace

MethodSpec parse_method(const std::string& name) {
  MethodSpec m;
  m.name = name;
  if (name == "saga") {
    m.algo = MethodSpec::SagaFixed;
  } else if (name == "saga-opt") {
    m.algo = MethodSpec::SagaFixed;
    m.fixed_opt_size = true;
  } else if (name == "dynasaga-linear") {
    m.algo = MethodSpec::DynaLinear;
  } else if (name == "dynasaga-alternating") {
    m.algo = MethodSpec::DynaAlternating;
  } else if (name.rfind("dynasaga:", 0) == 0) {
    m.algo = MethodSpec::DynaLinear;
    m.schedule_spec = name.substr(9);
  } else if (name == "sgd") {
    m.algo = MethodSpec::Sgd;
  } else if (name == "sgd-0.05") {
    m.algo = MethodSpec::Sgd;
    m.eta = EtaRule::fixed(0.05);
  } else if (name == "sgd-0.005") {
    m.algo = MethodSpec::Sgd;
    m.eta = EtaRule::fixed(0.005);
  } else if (name == "ssvrg") {
    m.algo = MethodSpec::Ssvrg;
  } else if (name == "sgd-svrg") {
    m.algo = MethodSpec::MixedSgdSvrg;
  } else {
    throw config_error("unknown method: " + name);
  }
  return m;
}

ReferenceOptimum reference_optimum(const LossModel& model, const Dataset& train,
                                   const ProblemConstants& pc, std::uint64_t seed, Scalar tol,
                                   long cap_passes) {
  const Index n = train.size();
  const Scalar eta = 0.3 / (pc.L + pc.mu * static_cast<Scalar>(n));
  Rng rng(seed);
  SagaState st = saga_init(model, train, Vector::Zero(train.dim), n);

  ReferenceOptimum ref;
  ref.residual = full_gradient(model, st.w, train, n).norm();
  for (long pass = 0; pass < cap_passes && ref.residual > tol; ++pass) {
    for (Index k = 0; k < n; ++k) {
      const Index i = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
      saga_step(st, model, train, i, eta);
    }
    ref.steps += n;
    ref.residual = full_gradient(model, st.w, train, n).norm();
  }
  ref.w = st.w;
  ref.converged = ref.residual <= tol;
  return ref;
}

namespace {

struct RunResult {
  std::vector<RiskPoint> points;
  std::string failure;  // empty on success
};

struct Task {
  std::size_t method_idx;
  int seed_idx;
};

// One (method, seed) run.
RunResult execute_run(const ExperimentConfig& cfg, const MethodSpec& method, int seed_idx,
                      const LossModel& model, const Dataset& train, const Dataset& test,
                      const ProblemConstants& pc, const Vector& w_star, long T, Index cap,
                      Index kappa0, Index opt_m) {
  RunResult out;
  try {
    RunConfig rc;
    rc.T = T;
    rc.eta = method.eta ? *method.eta : default_eta(method.algo, cfg.eta_numerator);
    rc.seed = derive_seed(cfg.master_seed, method.name, static_cast<std::uint64_t>(seed_idx));
    rc.record_every = cfg.record_every;
    rc.record_count = cfg.record_count;
    rc.lazy_growth = cfg.lazy_growth;
    rc.consts = pc;

    Trajectory traj;
    switch (method.algo) {
      case MethodSpec::SagaFixed: {
        Index m = method.fixed_opt_size ? opt_m : (method.fixed_m > 0 ? method.fixed_m : cap);
        m = std::clamp<Index>(m, 1, cap);
        traj = dynasaga_run(model, train, Schedule::fixed(m), rc);
        break;
      }
      case MethodSpec::DynaLinear: {
        Schedule sched = method.schedule_spec.empty()
                             ? Schedule::linear(kappa0, cap, cfg.linear_formula_variant)
                             : parse_schedule_spec(method.schedule_spec, kappa0, cap);
        traj = dynasaga_run(model, train, sched, rc);
        break;
      }
      case MethodSpec::DynaAlternating:
        traj = dynasaga_run(model, train, Schedule::alternating(kappa0, cap), rc);
        break;
      case MethodSpec::Sgd:
        traj = sgd_run(model, train, rc);
        break;
      case MethodSpec::Ssvrg:
      case MethodSpec::MixedSgdSvrg: {
        SsvrgParams sp;
        sp.sgd_first_stage = method.algo == MethodSpec::MixedSgdSvrg;
        traj = ssvrg_run(model, train, rc, sp);
        break;
      }
    }
    out.points = trajectory_risks(traj, model, train, test, w_star);
  } catch (const std::exception& e) {
    out.failure = e.what();
  }
  return out;
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
  if (cfg.methods.empty()) throw config_error("run_experiment: at least one method required");
  if (cfg.seeds < 1) throw config_error("run_experiment: seeds must be >= 1");

  // data
  Dataset full;
  std::string source;
  if (!cfg.data_path.empty()) {
    full = load_libsvm(cfg.data_path, cfg.loss == LossKind::LeastSquares
                                          ? LabelMode::Regression
                                          : LabelMode::Classification);
    source = cfg.data_path;
  } else {
    SyntheticConfig sc = cfg.synth;
    if (sc.n < 2) throw config_error("run_experiment: synthetic n must be >= 2");
    sc.seed = derive_seed(cfg.master_seed, "data", 0);
    auto [data, w_true] = generate_regression(sc);
    full = cfg.synth_binarize ? with_sign_labels(std::move(data)) : std::move(data);
    source = "synthetic";
  }

  auto [train, test] = split(full, {cfg.train_fraction, derive_seed(cfg.master_seed, "split", 0)});
  const Index n_train = train.size();

  LossModel model;
  model.kind = cfg.loss;
  if (cfg.loss == LossKind::LogisticL2)
    model.lambda = cfg.lambda >= 0.0
                       ? cfg.lambda
                       : std::pow(static_cast<Scalar>(n_train), -cfg.lambda_exp);

  const ProblemConstants pc = constants(model, train, n_train, cfg.mu_hint);
  const long T = cfg.T > 0 ? cfg.T : static_cast<long>(n_train);
  const Index cap = cfg.half_data
                        ? std::max<Index>(1, std::min<Index>(n_train, static_cast<Index>(T / 2)))
                        : n_train;
  const Index kappa0 =
      cfg.kappa0 > 0 ? std::min(cfg.kappa0, cap)
                     : std::clamp<Index>(static_cast<Index>(std::ceil(pc.kappa)), 1, cap);

  const auto ref =
      reference_optimum(model, train, pc, derive_seed(cfg.master_seed, "reference", 0));

  BoundConfig bc;
  bc.kappa = pc.kappa;
  bc.C = cfg.bound_c_over_d;
  const Index opt_m = optimal_fixed_size(cap, bc);

  // (method, seed) runs on a small worker pool; results are keyed, so the
  // completion order never affects the report.
  std::vector<Task> tasks;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
    for (int si = 0; si < cfg.seeds; ++si) tasks.push_back({mi, si});
  std::vector<RunResult> results(tasks.size());

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (std::size_t k = 0; k < tasks.size(); ++k)
      results[k] = execute_run(cfg, cfg.methods[tasks[k].method_idx], tasks[k].seed_idx, model,
                               train, test, pc, ref.w, T, cap, kappa0, opt_m);
  } else {
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t k = cursor.fetch_add(1);
        if (k >= tasks.size()) return;
        results[k] = execute_run(cfg, cfg.methods[tasks[k].method_idx], tasks[k].seed_idx, model,
                                 train, test, pc, ref.w, T, cap, kappa0, opt_m);
      }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Report rep;
  rep.metadata = {
      {"dataset", source},
      {"n_train", std::to_string(n_train)},
      {"n_test", std::to_string(test.size())},
      {"dim", std::to_string(full.dim)},
      {"loss", cfg.loss == LossKind::LeastSquares ? "least-squares" : "logistic-l2"},
      {"lambda", fmt17(model.lambda)},
      {"L", fmt17(pc.L)},
      {"mu", fmt17(pc.mu)},
      {"kappa", fmt17(pc.kappa)},
      {"kappa0", std::to_string(kappa0)},
      {"T", std::to_string(T)},
      {"one_pass_t", std::to_string(n_train)},
      {"seeds", std::to_string(cfg.seeds)},
      {"master_seed", std::to_string(cfg.master_seed)},
      {"half_data", cfg.half_data ? "1" : "0"},
      {"schedule_cap", std::to_string(cap)},
      {"reference_residual", fmt17(ref.residual)},
      {"reference_steps", std::to_string(ref.steps)},
  };
  if (!ref.converged)
    rep.metadata.emplace_back("warning", "reference optimum hit the iteration cap");

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    // collect successful seeds for this method
    std::vector<const std::vector<RiskPoint>*> ok;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      if (tasks[k].method_idx != mi) continue;
      if (results[k].failure.empty()) {
        ok.push_back(&results[k].points);
      } else {
        rep.metadata.emplace_back(
            "run_failure",
            cfg.methods[mi].name + " seed " + std::to_string(tasks[k].seed_idx) + ": " +
                results[k].failure);
      }
    }
    if (ok.empty()) continue;
    const std::size_t n_snaps = ok.front()->size();
    for (const auto* pts : ok)
      if (pts->size() != n_snaps)
        throw error("snapshot grids differ across seeds for method " + cfg.methods[mi].name);

    for (std::size_t s = 0; s < n_snaps; ++s) {
      ReportRow row;
      row.method = cfg.methods[mi].name;
      row.seed_count = static_cast<int>(ok.size());
      row.t = ok.front()->at(s).t;
      row.m = ok.front()->at(s).m;
      Scalar emp_sum = 0.0, exp_sum = 0.0;
      std::vector<Scalar> emp_logs, exp_logs;
      for (const auto* pts : ok) {
        const RiskPoint& p = pts->at(s);
        if (p.t != row.t) throw error("snapshot time mismatch across seeds");
        emp_sum += p.emp;
        exp_sum += p.expd;
        emp_logs.push_back(log2_clamped(p.emp));
        exp_logs.push_back(log2_clamped(p.expd));
      }
      const Scalar r = static_cast<Scalar>(ok.size());
      auto sample_std = [&](const std::vector<Scalar>& xs) {
        if (xs.size() < 2) return 0.0;
        Scalar mean = 0.0;
        for (Scalar x : xs) mean += x;
        mean /= static_cast<Scalar>(xs.size());
        Scalar ss = 0.0;
        for (Scalar x : xs) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / static_cast<Scalar>(xs.size() - 1));
      };
      row.emp_mean = emp_sum / r;
      row.exp_mean = exp_sum / r;
      row.emp_mean_log2 = log2_clamped(row.emp_mean);
      row.exp_mean_log2 = log2_clamped(row.exp_mean);
      row.emp_std_log2 = sample_std(emp_logs);
      row.exp_std_log2 = sample_std(exp_logs);
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

SlopeResult slope_experiment(const SlopeConfig& cfg) {
  std::vector<Index> sizes = cfg.sizes;
  if (sizes.empty()) sizes = {512, 1024, 2048, 4096, 8192};
  if (sizes.size() < 3) throw config_error("slope_experiment: need at least 3 sizes");
  if (cfg.seeds < 1) throw config_error("slope_experiment: seeds must be >= 1");

  SlopeResult res;
  res.report.metadata = {
      {"experiment", "slopes"},
      {"kappa_rule", cfg.rule == SlopeConfig::Sqrt ? "sqrt" : "n075"},
      {"d", std::to_string(cfg.d)},
      {"sigma", fmt17(cfg.sigma)},
      {"seeds", std::to_string(cfg.seeds)},
      {"master_seed", std::to_string(cfg.master_seed)},
      {"eta_numerator", fmt17(cfg.eta_numerator)},
  };

  const LossModel model{LossKind::LeastSquares, 0.0};
  for (const Index n : sizes) {
    const Scalar kappa_design = cfg.rule == SlopeConfig::Sqrt
                                    ? std::sqrt(static_cast<Scalar>(n))
                                    : std::pow(static_cast<Scalar>(n), 0.75);
    const Index kappa0 =
        std::clamp<Index>(static_cast<Index>(std::ceil(kappa_design)), 1, n);

    std::vector<Scalar> subs, logs;
    for (int seed = 0; seed < cfg.seeds; ++seed) {
      const std::uint64_t tag = static_cast<std::uint64_t>(n) * 10007u + static_cast<std::uint64_t>(seed);
      SyntheticConfig sc;
      sc.n = n;
      sc.d = cfg.d;
      sc.sigma_noise = cfg.sigma;
      sc.min_eig = 1.0 / kappa_design;
      sc.seed = derive_seed(cfg.master_seed, "slope-data", tag);
      auto [data, w_true] = generate_regression(sc);

      const ProblemConstants pc = constants(model, data, n);
      const auto ref = reference_optimum(model, data, pc,
                                         derive_seed(cfg.master_seed, "slope-reference", tag));

      RunConfig rc;
      rc.T = static_cast<long>(n);
      rc.eta = EtaRule::saga_table(cfg.eta_numerator);
      rc.seed = derive_seed(cfg.master_seed, "slope-run", tag);
      rc.record_every = rc.T;  // only the final iterate matters here
      rc.consts = pc;
      const Trajectory traj = dynasaga_run(
          model, data, Schedule::linear(kappa0, n, cfg.linear_formula_variant), rc);
      const auto pts = trajectory_risks(traj, model, data, {}, ref.w);
      subs.push_back(pts.back().emp);
      logs.push_back(log2_clamped(pts.back().emp));
    }
    Scalar mean = 0.0;
    for (Scalar s : subs) mean += s;
    mean /= static_cast<Scalar>(subs.size());
    res.points.emplace_back(static_cast<Scalar>(n), mean);

    ReportRow row;
    row.method = "dynasaga-linear";
    row.seed_count = cfg.seeds;
    row.t = static_cast<long>(n);
    row.m = linear_size(static_cast<long>(n), kappa0, n, cfg.linear_formula_variant);
    row.emp_mean = mean;
    row.emp_mean_log2 = log2_clamped(mean);
    Scalar lmean = 0.0;
    for (Scalar l : logs) lmean += l;
    lmean /= static_cast<Scalar>(logs.size());
    Scalar ss = 0.0;
    for (Scalar l : logs) ss += (l - lmean) * (l - lmean);
    row.emp_std_log2 = logs.size() > 1 ? std::sqrt(ss / static_cast<Scalar>(logs.size() - 1)) : 0.0;
    row.exp_mean = std::numeric_limits<Scalar>::quiet_NaN();
    row.exp_mean_log2 = std::numeric_limits<Scalar>::quiet_NaN();
    row.exp_std_log2 = std::numeric_limits<Scalar>::quiet_NaN();
    res.report.rows.push_back(std::move(row));
  }

  res.slope = slope_estimate(res.points);
  res.report.metadata.emplace_back("slope", fmt17(res.slope));
  return res;
}

std::string csv_string(const Report& report) {
  std::ostringstream out;
  for (const auto& [k, v] : report.metadata) out << "# " << k << " = " << v << "\n";
  out << "method,seed_count,t,m,emp_subopt_log2_mean,emp_subopt_log2_std,"
         "exp_subopt_log2_mean,exp_subopt_log2_std\n";
  for (const ReportRow& r : report.rows) {
    out << r.method << ',' << r.seed_count << ',' << r.t << ',' << r.m << ','
        << fmt17(r.emp_mean_log2) << ',' << fmt17(r.emp_std_log2) << ','
        << fmt17(r.exp_mean_log2) << ',' << fmt17(r.exp_std_log2) << "\n";
  }
  return out.str();
}

void emit_csv(const Report& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open report output: " + path);
  out << csv_string(report);
  if (!out) throw data_error("write failed: " + path);
}

}  // namespace dynasaga
