#pragma once

#include <cstdint>
#include <vector>

#include "dynasaga/model.hpp"
#include "dynasaga/schedules.hpp"
#include "dynasaga/types.hpp"

namespace dynasaga {

// SAGA state with a growable gradient memory. Both loss families are
// generalized linear, so the stored gradient of sample i is alpha[i] * a_i
// plus the (state-free) regularizer term lambda * w, reconstructed on the
// fly; only the scalar alpha[i] is kept. grad_sum accumulates the data part
// sum_{j < m} alpha[j] * a_j and is recomputed from scratch every n steps to
// bound float drift.
struct SagaState {
  Vector w;
  std::vector<Scalar> alpha;  // loss scalars, one per sample (all n)
  Vector grad_sum;            // data-term sum over the active prefix
  Index m = 0;                // active prefix length
  long step_count = 0;
};

// Stored gradients for all n samples evaluated at w0; grad_sum over the
// initial prefix of length m0.
SagaState saga_init(const LossModel& model, const Dataset& data, const Vector& w0, Index m0);

// One SAGA update on index i (0-based, i < m):
//   w <- w - eta * (g - alpha_i + A), A = grad_sum/m + lambda*w
// then the table and grad_sum absorb the fresh gradient.
void saga_step(SagaState& state, const LossModel& model, const Dataset& data, Index i, Scalar eta);

// Activate sample m. Default: its stored gradient stays the one from
// saga_init (evaluated at w0). Lazy: re-evaluate at the current iterate.
void grow_active(SagaState& state, const LossModel& model, const Dataset& data, bool lazy = false);

// Exact re-summation of the active stored gradients (drift oracle).
Vector resum_grad(const SagaState& state, const Dataset& data);

struct EtaRule {
  enum Kind { Fixed, SagaTable, QuarterL, Decreasing };
  Kind kind = SagaTable;
  Scalar value = 0.3;  // Fixed: eta itself; SagaTable: numerator; Decreasing: C0

  Scalar at(const ProblemConstants& pc, Index m, long t) const;

  static EtaRule fixed(Scalar eta) { return {Fixed, eta}; }
  static EtaRule saga_table(Scalar numerator = 0.3) { return {SagaTable, numerator}; }
  static EtaRule quarter_l() { return {QuarterL, 0.0}; }
  static EtaRule decreasing(Scalar c0 = 0.1) { return {Decreasing, c0}; }
};

struct RunConfig {
  long T = 0;
  EtaRule eta;
  std::uint64_t seed = 0;
  long record_every = 0;   // snapshot stride; 0 -> record_count log-spaced snapshots
  int record_count = 50;
  bool lazy_growth = false;
  Vector w0;               // empty -> zeros
  ProblemConstants consts;
};

struct Trajectory {
  struct Snapshot {
    long t = 0;
    Index m = 0;
    Vector w;
  };
  std::vector<Snapshot> snapshots;
};

// Snapshot times in [1, T]: multiples of record_every, or `count` log-spaced
// points; T is always included.
std::vector<long> snapshot_times(long T, long record_every, int count);

// dynaSAGA: at each t the active prefix follows the schedule; the sampled
// index is uniform over the prefix, or the fresh index when the Alternating
// rule forces it. Alternating growth always stores the fresh sample's
// gradient at the current iterate (the forced step is then exactly an
// average-gradient step); other schedules grow per cfg.lazy_growth.
Trajectory dynasaga_run(const LossModel& model, const Dataset& data, const Schedule& schedule,
                        const RunConfig& cfg);

// Plain SGD over all n samples; decreasing step C0/(C0 + mu t) by default.
Trajectory sgd_run(const LossModel& model, const Dataset& data, const RunConfig& cfg);

// Streaming SVRG over the prefix stream: stages of geometrically growing
// batch size k0 * b^s, anchored full gradient per stage, fixed inner step
// eta = 1/(10 b^p), inner length ceil(kappa/eta). The trajectory's t axis
// counts stochastic gradient evaluations. sgd_first_stage runs the first
// stage as plain SGD steps (the mixed SGD/SVRG baseline).
struct SsvrgParams {
  Scalar b = 3.0;
  Scalar p = 2.0;
  Index k0 = 0;  // 0 -> ceil(kappa)
  bool sgd_first_stage = false;
};

Trajectory ssvrg_run(const LossModel& model, const Dataset& data, const RunConfig& cfg,
                     const SsvrgParams& params);

struct RiskPoint {
  long t = 0;
  Index m = 0;
  Scalar emp = 0.0;   // R_train(w_t) - R_train(w*)
  Scalar expd = 0.0;  // R_test(w_t) - R_test(w*); NaN when test is empty
};

// Suboptimality readouts against the reference optimum w_star_ref. Throws
// numerical_error if any empirical suboptimality falls below -1e-9 (the
// reference optimum cannot have been converged).
std::vector<RiskPoint> trajectory_risks(const Trajectory& traj, const LossModel& model,
                                        const Dataset& train, const Dataset& test,
                                        const Vector& w_star_ref);

}  // namespace dynasaga
