#pragma once

#include <vector>

#include "dynasaga/types.hpp"

namespace dynasaga {

// Constants of the bound machinery: statistical accuracy H(m) = D * m^(-alpha),
// C >= D an upper bound on the rate constant, xi the initial error, kappa the
// condition number.
struct BoundConfig {
  Scalar D = 1.0;
  Scalar alpha_exp = 1.0;
  Scalar C = 1.0;
  Scalar xi = 1.0;
  Scalar kappa = 1.0;
};

// H(m) = D * m^(-alpha)
Scalar statistical_bound(Index m, const BoundConfig& cfg);

// Geometric per-step contraction at effective size m; saturates at 1 - 1/kappa
// below m = kappa.
Scalar contraction_rate(Index m, const BoundConfig& cfg);

// Cost of enlarging the sample from m to n: ((n - m)/n) * H(m).
Scalar switching_cost(Index m, Index n, const BoundConfig& cfg);

// V(m) = D/m + C exp(-n/m), the fixed-size suboptimality bound.
Scalar fixed_size_bound(Index m, Index n, const BoundConfig& cfg);

// Minimizer of V over [kappa, n]: round(max(kappa, n / (ln n + ln(C/D)))),
// clamped to [1, n]; n when the log denominator is nonpositive.
Index optimal_fixed_size(Index n, const BoundConfig& cfg);

// xi = 4 (L/mu) * [R(w0) - R(w*)]
Scalar initial_error_xi(Scalar L, Scalar mu, Scalar risk_gap);

// Instance constant of the geometric rate:
//   C_S = L [ ||w0 - w*||^2 + n/(mu n + L) (R(w0) - <grad R(w*), w0 - w*> - R*) ]
Scalar saga_rate_constant(Scalar L, Scalar mu, Index n, Scalar dist_sq, Scalar risk_w0,
                          Scalar grad_star_dot_diff, Scalar risk_star);

// Closed-form schedule bounds: two passes reaching size n, and one pass on
// even n.
Scalar two_pass_bound(Index n, const BoundConfig& cfg);
Scalar one_pass_bound(Index n, const BoundConfig& cfg);

// Upper-bound recursion table
//   U(t,m) = min{ rho_m U(t-1,m), min_{m'<m} [U(t,m') + switching_cost(m',m)] }
// with U(0,m) = xi, over t = 0..T and m = m_lo..n. Records which branch won
// so the optimal size path can be extracted.
struct URecursionTable {
  long T = 0;
  Index m_lo = 1;
  Index n = 0;
  std::vector<Scalar> u;       // (T+1) x (n - m_lo + 1), row-major in t
  std::vector<Index> from;     // 0: stay branch; otherwise source size of the switch

  Scalar at(long t, Index m) const { return u[static_cast<std::size_t>(t) * width() + col(m)]; }
  Index branch(long t, Index m) const {
    return from[static_cast<std::size_t>(t) * width() + col(m)];
  }
  std::size_t width() const { return static_cast<std::size_t>(n - m_lo + 1); }
  std::size_t col(Index m) const { return static_cast<std::size_t>(m - m_lo); }
};

struct UDpOptions {
  Index m_lo = 1;
  bool enable_switching = true;
  std::size_t max_entries = 1u << 25;  // memory guard
};

URecursionTable u_recursion_dp(long T, Index n, const BoundConfig& cfg, UDpOptions opts = {});

// Optimal size path ending at (T, n): pairs (t, m) from t = 0 upward.
std::vector<std::pair<long, Index>> extract_u_path(const URecursionTable& table);

// U(2n, n) along the Linear schedule policy, for every n in [kappa0, n_max]:
// warm start 2*kappa0 contractions at kappa0, then switch m-1 -> m followed by
// two contractions at m. Entry k of the result is the value for n = kappa0+k.
std::vector<Scalar> linear_path_u(Index n_max, const BoundConfig& cfg, Index kappa0);

// Schedule as iteration counts per size: t_m for m = m0 .. m0+len-1.
struct ScheduleVector {
  Index m0 = 1;
  std::vector<long> t_m;

  long total() const;
  Index top() const { return m0 + static_cast<Index>(t_m.size()) - 1; }
};

// Expected-suboptimality recursion value of a schedule:
//   A(ts^q) = rho_q^{t_q} (A(ts^p) + switching_cost(p, q)) over successive
// support sizes p < q, base A = xi * rho_{m0}^{t_{m0}}, final size = top().
Scalar schedule_cost(const ScheduleVector& sched, const BoundConfig& cfg);

// The Linear strategy as a schedule vector: 2*kappa0 steps at kappa0, then
// two per size up to n (total 2n when m0 = kappa0).
ScheduleVector linear_schedule_vector(Index n, Index kappa0);

// Exact minimizer of schedule_cost over { t_m >= 0, sum t_m = T } for sizes
// m0..n, requiring H(m) = D/m (alpha == 1) so unit-step switching costs
// telescope exactly. DP over (size, remaining budget); n <= 128 guard.
ScheduleVector optimal_schedule_bruteforce(Index n, long T, const BoundConfig& cfg, Index m0);

// Least-squares slope of -log2(suboptimality) against log2(n).
Scalar slope_estimate(const std::vector<std::pair<Scalar, Scalar>>& points);

}  // namespace dynasaga
