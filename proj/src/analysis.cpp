#include "dynasaga/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dynasaga {

Scalar statistical_bound(Index m, const BoundConfig& cfg) {
  if (m < 1) throw config_error("statistical_bound: m must be >= 1");
  return cfg.D * std::pow(static_cast<Scalar>(m), -cfg.alpha_exp);
}

Scalar contraction_rate(Index m, const BoundConfig& cfg) {
  return 1.0 - std::min(1.0 / static_cast<Scalar>(m), 1.0 / cfg.kappa);
}

Scalar switching_cost(Index m, Index n, const BoundConfig& cfg) {
  return (static_cast<Scalar>(n - m) / static_cast<Scalar>(n)) * statistical_bound(m, cfg);
}

Scalar fixed_size_bound(Index m, Index n, const BoundConfig& cfg) {
  if (m < 1 || m > n) throw config_error("fixed_size_bound: need 0 < m <= n");
  return cfg.D / static_cast<Scalar>(m) +
         cfg.C * std::exp(-static_cast<Scalar>(n) / static_cast<Scalar>(m));
}

Index optimal_fixed_size(Index n, const BoundConfig& cfg) {
  if (n < 1) throw config_error("optimal_fixed_size: n must be >= 1");
  const Scalar denom = std::log(static_cast<Scalar>(n)) + std::log(cfg.C / cfg.D);
  if (denom <= 0.0) return n;
  const Scalar interior = static_cast<Scalar>(n) / denom;
  const Scalar m = std::max(cfg.kappa, interior);
  return std::clamp<Index>(static_cast<Index>(std::llround(m)), 1, n);
}

Scalar initial_error_xi(Scalar L, Scalar mu, Scalar risk_gap) {
  if (risk_gap < 0.0) throw config_error("initial_error_xi: risk gap must be >= 0");
  return 4.0 * (L / mu) * risk_gap;
}

Scalar saga_rate_constant(Scalar L, Scalar mu, Index n, Scalar dist_sq, Scalar risk_w0,
                          Scalar grad_star_dot_diff, Scalar risk_star) {
  const Scalar nn = static_cast<Scalar>(n);
  return L * (dist_sq + nn / (mu * nn + L) * (risk_w0 - grad_star_dot_diff - risk_star));
}

Scalar two_pass_bound(Index n, const BoundConfig& cfg) {
  const Scalar r = cfg.kappa / static_cast<Scalar>(n);
  return statistical_bound(n, cfg) + 0.5 * cfg.xi * r * r;
}

Scalar one_pass_bound(Index n, const BoundConfig& cfg) {
  const Scalar r = cfg.kappa / static_cast<Scalar>(n);
  return 3.0 * std::pow(2.0, cfg.alpha_exp - 1.0) * statistical_bound(n, cfg) +
         2.0 * cfg.xi * r * r;
}

URecursionTable u_recursion_dp(long T, Index n, const BoundConfig& cfg, UDpOptions opts) {
  if (T < 0 || n < 1 || opts.m_lo < 1 || opts.m_lo > n)
    throw config_error("u_recursion_dp: bad T/n/m_lo");
  URecursionTable tab;
  tab.T = T;
  tab.m_lo = opts.m_lo;
  tab.n = n;
  const std::size_t width = tab.width();
  const std::size_t entries = static_cast<std::size_t>(T + 1) * width;
  if (entries > opts.max_entries)
    throw config_error("u_recursion_dp: table too large; use a coarser instance");
  tab.u.assign(entries, 0.0);
  tab.from.assign(entries, 0);

  for (std::size_t c = 0; c < width; ++c) tab.u[c] = cfg.xi;

  std::vector<Scalar> rho(width), h(width);
  for (std::size_t c = 0; c < width; ++c) {
    const Index m = opts.m_lo + static_cast<Index>(c);
    rho[c] = contraction_rate(m, cfg);
    h[c] = statistical_bound(m, cfg);
  }

  const bool alpha_one = cfg.alpha_exp == 1.0;
  for (long t = 1; t <= T; ++t) {
    const std::size_t row = static_cast<std::size_t>(t) * width;
    const std::size_t prev = row - width;
    // stay branch first, then switches from sizes already settled at this t
    Scalar best_a = 0.0;  // prefix min of U(t,m') + H(m') (alpha == 1 shortcut)
    Index best_src = 0;
    for (std::size_t c = 0; c < width; ++c) {
      const Index m = opts.m_lo + static_cast<Index>(c);
      Scalar v = rho[c] * tab.u[prev + c];
      Index from = 0;
      if (opts.enable_switching && c > 0) {
        if (alpha_one) {
          // (1 - m'/m) D/m' = [U + H](m') - H(m): a prefix minimum suffices
          const Scalar cand = best_a - h[c];
          if (cand < v) {
            v = cand;
            from = best_src;
          }
        } else {
          for (std::size_t cc = 0; cc < c; ++cc) {
            const Index src = opts.m_lo + static_cast<Index>(cc);
            const Scalar cand =
                tab.u[row + cc] +
                (static_cast<Scalar>(m - src) / static_cast<Scalar>(m)) * h[cc];
            if (cand < v) {
              v = cand;
              from = src;
            }
          }
        }
      }
      tab.u[row + c] = v;
      tab.from[row + c] = from;
      if (alpha_one) {
        const Scalar a = v + h[c];
        if (c == 0 || a < best_a) {
          best_a = a;
          best_src = opts.m_lo + static_cast<Index>(c);
        }
      }
    }
  }
  return tab;
}

std::vector<std::pair<long, Index>> extract_u_path(const URecursionTable& table) {
  std::vector<std::pair<long, Index>> path;
  long t = table.T;
  Index m = table.n;
  path.emplace_back(t, m);
  while (t > 0) {
    const Index src = table.branch(t, m);
    if (src == 0) {
      --t;  // stay branch consumed one iteration
    } else {
      m = src;  // switch branch, same t
    }
    path.emplace_back(t, m);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<Scalar> linear_path_u(Index n_max, const BoundConfig& cfg, Index kappa0) {
  if (kappa0 < 1 || kappa0 > n_max) throw config_error("linear_path_u: bad kappa0/n_max");
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(n_max - kappa0 + 1));
  Scalar u = cfg.xi * std::pow(contraction_rate(kappa0, cfg), 2.0 * static_cast<Scalar>(kappa0));
  out.push_back(u);
  for (Index m = kappa0 + 1; m <= n_max; ++m) {
    const Scalar rho = contraction_rate(m, cfg);
    u = rho * rho * (u + switching_cost(m - 1, m, cfg));
    out.push_back(u);
  }
  return out;
}

long ScheduleVector::total() const {
  return std::accumulate(t_m.begin(), t_m.end(), 0L);
}

Scalar schedule_cost(const ScheduleVector& sched, const BoundConfig& cfg) {
  if (sched.t_m.empty()) throw config_error("schedule_cost: empty schedule");
  Scalar a = cfg.xi * std::pow(contraction_rate(sched.m0, cfg), static_cast<Scalar>(sched.t_m[0]));
  Index prev = sched.m0;
  const Index top = sched.top();
  for (Index m = sched.m0 + 1; m <= top; ++m) {
    const long tm = sched.t_m[static_cast<std::size_t>(m - sched.m0)];
    if (tm == 0 && m < top) continue;  // skipped sizes fold into one switch
    a = std::pow(contraction_rate(m, cfg), static_cast<Scalar>(tm)) *
        (a + switching_cost(prev, m, cfg));
    prev = m;
  }
  return a;
}

ScheduleVector linear_schedule_vector(Index n, Index kappa0) {
  if (kappa0 < 1 || kappa0 > n) throw config_error("linear_schedule_vector: bad kappa0/n");
  ScheduleVector sv;
  sv.m0 = kappa0;
  sv.t_m.assign(static_cast<std::size_t>(n - kappa0 + 1), 2);
  sv.t_m[0] = 2 * static_cast<long>(kappa0);
  return sv;
}

ScheduleVector optimal_schedule_bruteforce(Index n, long T, const BoundConfig& cfg, Index m0) {
  if (n > 128) throw config_error("optimal_schedule_bruteforce: n > 128");
  if (m0 < 1 || m0 > n || T < 0) throw config_error("optimal_schedule_bruteforce: bad m0/T");
  if (cfg.alpha_exp != 1.0)
    throw config_error("optimal_schedule_bruteforce: requires H(m) = D/m (alpha = 1)");

  // With H = D/m the cost of any switch equals the sum of its unit steps, so
  // every schedule evaluates exactly as a chain m0 -> m0+1 -> ... -> n with
  // per-size counts; DP over (size, budget spent).
  const std::size_t B = static_cast<std::size_t>(T) + 1;
  std::vector<Scalar> best(B);
  const Scalar rho0 = contraction_rate(m0, cfg);
  for (std::size_t b = 0; b < B; ++b)
    best[b] = cfg.xi * std::pow(rho0, static_cast<Scalar>(b));

  const std::size_t sizes = static_cast<std::size_t>(n - m0 + 1);
  std::vector<long> choice(sizes * B, 0);
  std::vector<Scalar> next(B);
  for (Index m = m0 + 1; m <= n; ++m) {
    const Scalar sw = switching_cost(m - 1, m, cfg);
    const Scalar rho = contraction_rate(m, cfg);
    const std::size_t crow = static_cast<std::size_t>(m - m0) * B;
    for (std::size_t b = 0; b < B; ++b) {
      Scalar v = best[b] + sw;  // j = 0
      long arg = 0;
      Scalar r = rho;
      for (std::size_t j = 1; j <= b; ++j, r *= rho) {
        const Scalar cand = r * (best[b - j] + sw);
        if (cand < v) {
          v = cand;
          arg = static_cast<long>(j);
        }
      }
      next[b] = v;
      choice[crow + b] = arg;
    }
    best.swap(next);
  }

  ScheduleVector sv;
  sv.m0 = m0;
  sv.t_m.assign(sizes, 0);
  std::size_t b = static_cast<std::size_t>(T);
  for (Index m = n; m > m0; --m) {
    const long j = choice[static_cast<std::size_t>(m - m0) * B + b];
    sv.t_m[static_cast<std::size_t>(m - m0)] = j;
    b -= static_cast<std::size_t>(j);
  }
  sv.t_m[0] = static_cast<long>(b);
  return sv;
}

Scalar slope_estimate(const std::vector<std::pair<Scalar, Scalar>>& points) {
  if (points.size() < 3) throw config_error("slope_estimate: need at least 3 points");
  Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, sub] : points) {
    if (!(n > 0.0) || !(sub > 0.0))
      throw config_error("slope_estimate: points must be positive");
    const Scalar x = std::log2(n);
    const Scalar y = -std::log2(sub);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const Scalar k = static_cast<Scalar>(points.size());
  const Scalar denom = k * sxx - sx * sx;
  if (denom == 0.0) throw config_error("slope_estimate: degenerate abscissae");
  return (k * sxy - sx * sy) / denom;
}

}  // namespace dynasaga
