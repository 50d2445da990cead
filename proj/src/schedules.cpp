#include "dynasaga/schedules.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dynasaga {

Index linear_size(long t, Index kappa0, Index n, bool formula_variant) {
  const Index floor_m = formula_variant ? 2 * kappa0 : kappa0;
  const Index half = static_cast<Index>((t + 1) / 2);  // ceil(t/2)
  return std::min(n, std::max(floor_m, half));
}

Index fixed_size(long /*t*/, Index m) { return m; }

std::pair<Index, SampleAction> alternating_action(long t, Index current_m, Index kappa0, Index n) {
  SampleAction act;
  if (t <= 2 * static_cast<long>(kappa0) || current_m >= n) return {current_m, act};
  const long tau = t - 2 * static_cast<long>(kappa0);
  if (tau % 2 == 1) {
    const Index grown = current_m + 1;
    act.kind = SampleAction::ForcedIndex;
    act.index = grown - 1;  // 0-based index of the fresh sample
    return {grown, act};
  }
  return {current_m, act};
}

Index Schedule::size_at(long t) const {
  switch (kind) {
    case Fixed:
      return std::min(fixed_m, cap);
    case Linear:
      return linear_size(t, kappa0, cap, linear_formula_variant);
    case Alternating: {
      const long warm = 2 * static_cast<long>(kappa0);
      if (t <= warm) return std::min(kappa0, cap);
      const long grown = static_cast<long>(kappa0) + (t - warm + 1) / 2;
      return std::min<Index>(cap, static_cast<Index>(grown));
    }
    case Explicit: {
      Index m = kappa0;
      for (const auto& [bt, bm] : table) {
        if (bt > t) break;
        m = bm;
      }
      return std::min(std::max<Index>(m, 1), cap);
    }
  }
  throw error("unreachable schedule kind");
}

Schedule Schedule::fixed(Index m) {
  Schedule s;
  s.kind = Fixed;
  s.fixed_m = m;
  s.cap = m;
  s.kappa0 = m;
  return s;
}

Schedule Schedule::linear(Index kappa0, Index n, bool formula_variant) {
  Schedule s;
  s.kind = Linear;
  s.kappa0 = std::min(std::max<Index>(kappa0, 1), n);
  s.cap = n;
  s.linear_formula_variant = formula_variant;
  return s;
}

Schedule Schedule::alternating(Index kappa0, Index n) {
  Schedule s;
  s.kind = Alternating;
  s.kappa0 = std::min(std::max<Index>(kappa0, 1), n);
  s.cap = n;
  return s;
}

Schedule Schedule::explicit_table(std::vector<std::pair<long, Index>> table, Index n) {
  if (table.empty()) throw config_error("explicit schedule table is empty");
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].first <= table[i - 1].first)
      throw config_error("explicit schedule: t values must be strictly increasing");
    if (table[i].second < table[i - 1].second)
      throw config_error("explicit schedule: m values must be non-decreasing");
  }
  Schedule s;
  s.kind = Explicit;
  s.table = std::move(table);
  s.kappa0 = std::min(s.table.front().second, n);
  s.cap = n;
  return s;
}

Schedule parse_schedule_spec(const std::string& spec, Index kappa0, Index n) {
  if (spec == "linear") return Schedule::linear(kappa0, n);
  if (spec == "linear-formula") return Schedule::linear(kappa0, n, true);
  if (spec == "alternating") return Schedule::alternating(kappa0, n);
  if (spec.rfind("fixed:", 0) == 0) {
    const long m = std::stol(spec.substr(6));
    if (m < 1 || m > n) throw config_error("fixed schedule size out of range: " + spec);
    return Schedule::fixed(static_cast<Index>(m));
  }
  if (spec.rfind("explicit:", 0) == 0)
    return Schedule::explicit_table(load_schedule_table(spec.substr(9)), n);
  throw config_error("unknown schedule spec: " + spec);
}

std::vector<std::pair<long, Index>> load_schedule_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open schedule table: " + path);
  std::vector<std::pair<long, Index>> table;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    long t = 0, m = 0;
    if (!(ls >> t)) continue;
    if (!(ls >> m))
      throw config_error("schedule table line " + std::to_string(line_no) + ": expected `t m`");
    table.emplace_back(t, static_cast<Index>(m));
  }
  return table;
}

}  // namespace dynasaga
