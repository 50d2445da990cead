#include "dynasaga/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dynasaga/rng.hpp"

namespace dynasaga {

SagaState saga_init(const LossModel& model, const Dataset& data, const Vector& w0, Index m0) {
  const Index n = data.size();
  if (m0 < 1 || m0 > n) throw data_error("saga_init: initial prefix out of range");
  if (w0.size() != data.dim) throw data_error("saga_init: w0 dimension mismatch");
  SagaState st;
  st.w = w0;
  st.alpha.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    st.alpha[static_cast<std::size_t>(i)] = loss_scalar(model, w0, data[i]);
  st.grad_sum = Vector::Zero(data.dim);
  for (Index i = 0; i < m0; ++i)
    data[i].add_scaled(st.alpha[static_cast<std::size_t>(i)], st.grad_sum);
  st.m = m0;
  return st;
}

void saga_step(SagaState& state, const LossModel& model, const Dataset& data, Index i,
               Scalar eta) {
  if (i < 0 || i >= state.m) throw error("saga_step: index outside the active prefix");
  const Sample& s = data[i];
  const Scalar inv_m = 1.0 / static_cast<Scalar>(state.m);
  const Scalar s_new = loss_scalar(model, state.w, s);
  const Scalar diff = s_new - state.alpha[static_cast<std::size_t>(i)];

  // w -= eta * ((g - alpha_i) + grad_sum/m + lambda*w); the lambda*w parts of
  // g and alpha_i cancel, the average's lambda*w is exact at the current w.
  if (model.lambda != 0.0)
    state.w *= (1.0 - eta * model.lambda);
  state.w -= eta * inv_m * state.grad_sum;
  s.add_scaled(-eta * diff, state.w);

  s.add_scaled(diff, state.grad_sum);
  state.alpha[static_cast<std::size_t>(i)] = s_new;

  if (++state.step_count % data.size() == 0) {
    state.grad_sum.setZero();
    for (Index j = 0; j < state.m; ++j)
      data[j].add_scaled(state.alpha[static_cast<std::size_t>(j)], state.grad_sum);
  }
}

void grow_active(SagaState& state, const LossModel& model, const Dataset& data, bool lazy) {
  if (state.m >= data.size()) throw error("grow_active: already at full size");
  const Index i = state.m;
  if (lazy) state.alpha[static_cast<std::size_t>(i)] = loss_scalar(model, state.w, data[i]);
  data[i].add_scaled(state.alpha[static_cast<std::size_t>(i)], state.grad_sum);
  state.m = i + 1;
}

Vector resum_grad(const SagaState& state, const Dataset& data) {
  Vector g = Vector::Zero(state.w.size());
  for (Index j = 0; j < state.m; ++j)
    data[j].add_scaled(state.alpha[static_cast<std::size_t>(j)], g);
  return g;
}

Scalar EtaRule::at(const ProblemConstants& pc, Index m, long t) const {
  switch (kind) {
    case Fixed:
      return value;
    case SagaTable:
      return value / (pc.L + pc.mu * static_cast<Scalar>(m));
    case QuarterL:
      return 1.0 / (4.0 * pc.L);
    case Decreasing:
      return value / (value + pc.mu * static_cast<Scalar>(t));
  }
  throw error("unreachable eta rule");
}

std::vector<long> snapshot_times(long T, long record_every, int count) {
  std::vector<long> times;
  if (record_every > 0) {
    for (long t = record_every; t < T; t += record_every) times.push_back(t);
  } else {
    count = std::max(count, 2);
    const Scalar lo = 0.0, hi = std::log(static_cast<Scalar>(T));
    for (int k = 0; k < count; ++k) {
      const Scalar u = static_cast<Scalar>(k) / static_cast<Scalar>(count - 1);
      times.push_back(static_cast<long>(std::llround(std::exp(lo + u * (hi - lo)))));
    }
  }
  times.push_back(T);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  while (!times.empty() && times.front() < 1) times.erase(times.begin());
  return times;
}

namespace {

struct Recorder {
  std::vector<long> times;
  std::size_t next = 0;
  Trajectory traj;

  Recorder(long T, const RunConfig& cfg) : times(snapshot_times(T, cfg.record_every, cfg.record_count)) {}

  void maybe(long t, Index m, const Vector& w) {
    if (next < times.size() && t >= times[next]) {
      traj.snapshots.push_back({t, m, w});
      while (next < times.size() && times[next] <= t) ++next;
    }
  }
};

Vector start_point(const RunConfig& cfg, Index d) {
  if (cfg.w0.size() == 0) return Vector::Zero(d);
  if (cfg.w0.size() != d) throw config_error("w0 dimension mismatch");
  return cfg.w0;
}

}  // namespace

Trajectory dynasaga_run(const LossModel& model, const Dataset& data, const Schedule& schedule,
                        const RunConfig& cfg) {
  const Index n = data.size();
  if (schedule.cap > n) throw config_error("schedule cap exceeds dataset size");
  if (cfg.T < 1) throw config_error("T must be >= 1");
  Rng rng(cfg.seed);
  Recorder rec(cfg.T, cfg);

  const Index m0 = schedule.kind == Schedule::Fixed ? schedule.size_at(1)
                                                    : std::min(schedule.kappa0, schedule.cap);
  SagaState st = saga_init(model, data, start_point(cfg, data.dim), m0);

  for (long t = 1; t <= cfg.T; ++t) {
    Index pick;
    if (schedule.kind == Schedule::Alternating) {
      auto [new_m, action] = alternating_action(t, st.m, schedule.kappa0, schedule.cap);
      if (new_m > st.m) grow_active(st, model, data, /*lazy=*/true);
      pick = action.kind == SampleAction::ForcedIndex
                 ? action.index
                 : static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(st.m)));
    } else {
      const Index target = schedule.size_at(t);
      while (st.m < target) grow_active(st, model, data, cfg.lazy_growth);
      pick = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(st.m)));
    }
    saga_step(st, model, data, pick, cfg.eta.at(cfg.consts, st.m, t));
    rec.maybe(t, st.m, st.w);
  }
  return std::move(rec.traj);
}

Trajectory sgd_run(const LossModel& model, const Dataset& data, const RunConfig& cfg) {
  const Index n = data.size();
  if (cfg.T < 1) throw config_error("T must be >= 1");
  Rng rng(cfg.seed);
  Recorder rec(cfg.T, cfg);
  Vector w = start_point(cfg, data.dim);

  for (long t = 1; t <= cfg.T; ++t) {
    const Index i = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    const Scalar eta = cfg.eta.at(cfg.consts, n, t);
    const Scalar c = loss_scalar(model, w, data[i]);
    if (model.lambda != 0.0) w *= (1.0 - eta * model.lambda);
    data[i].add_scaled(-eta * c, w);
    rec.maybe(t, n, w);
  }
  return std::move(rec.traj);
}

Trajectory ssvrg_run(const LossModel& model, const Dataset& data, const RunConfig& cfg,
                     const SsvrgParams& params) {
  const Index n = data.size();
  if (cfg.T < 1) throw config_error("T must be >= 1");
  Rng rng(cfg.seed);
  Recorder rec(cfg.T, cfg);
  Vector w = start_point(cfg, data.dim);

  const Scalar eta = 1.0 / (10.0 * std::pow(params.b, params.p));
  const Index k0 = params.k0 > 0 ? params.k0
                                 : std::max<Index>(1, static_cast<Index>(std::ceil(cfg.consts.kappa)));
  const long inner_len = static_cast<long>(std::ceil(cfg.consts.kappa / eta));

  Index pos = 0;
  long t = 0;
  std::vector<Scalar> anchor_scalar;
  for (int stage = 0; pos < n && t < cfg.T; ++stage) {
    Index k = static_cast<Index>(
        std::min<Scalar>(static_cast<Scalar>(k0) * std::pow(params.b, stage),
                         static_cast<Scalar>(n - pos)));
    k = std::max<Index>(k, 1);

    // anchor pass over the fresh batch
    anchor_scalar.assign(static_cast<std::size_t>(k), 0.0);
    Vector anchor_data = Vector::Zero(data.dim);
    for (Index j = 0; j < k; ++j) {
      const Scalar c = loss_scalar(model, w, data[pos + j]);
      anchor_scalar[static_cast<std::size_t>(j)] = c;
      data[pos + j].add_scaled(c / static_cast<Scalar>(k), anchor_data);
    }
    const Vector anchor_w = w;
    t += k;
    rec.maybe(t, k, w);

    const bool plain_sgd = params.sgd_first_stage && stage == 0;
    for (long step = 0; step < inner_len && t < cfg.T; ++step) {
      const Index j = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(k)));
      const Sample& s = data[pos + j];
      const Scalar c = loss_scalar(model, w, s);
      if (model.lambda != 0.0) w *= (1.0 - eta * model.lambda);
      if (plain_sgd) {
        s.add_scaled(-eta * c, w);
      } else {
        w -= eta * anchor_data;
        s.add_scaled(-eta * (c - anchor_scalar[static_cast<std::size_t>(j)]), w);
      }
      ++t;
      rec.maybe(t, k, w);
    }
    pos += k;
  }
  return std::move(rec.traj);
}

std::vector<RiskPoint> trajectory_risks(const Trajectory& traj, const LossModel& model,
                                        const Dataset& train, const Dataset& test,
                                        const Vector& w_star_ref) {
  const Scalar r_train_star = empirical_risk(model, w_star_ref, train, train.size());
  const Scalar r_test_star =
      test.size() > 0 ? empirical_risk(model, w_star_ref, test, test.size())
                      : std::numeric_limits<Scalar>::quiet_NaN();

  std::vector<RiskPoint> out;
  out.reserve(traj.snapshots.size());
  for (const auto& snap : traj.snapshots) {
    RiskPoint p;
    p.t = snap.t;
    p.m = snap.m;
    p.emp = empirical_risk(model, snap.w, train, train.size()) - r_train_star;
    if (p.emp < -1e-9)
      throw numerical_error("empirical suboptimality below -1e-9: reference optimum not converged");
    p.expd = test.size() > 0
                 ? empirical_risk(model, snap.w, test, test.size()) - r_test_star
                 : std::numeric_limits<Scalar>::quiet_NaN();
    out.push_back(p);
  }
  return out;
}

}  // namespace dynasaga
