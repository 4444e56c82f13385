#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "gpack/enumerate.hpp"
#include "gpack/lp.hpp"

namespace gpack {

// Minimum-cost static plan: a distribution pi over configurations whose
// per-type template counts dominate the loads. x_A recovers the long-run
// fraction of time template A is up under that plan.
struct StaticOptimum {
  double objective = 0.0;              // optimal expected placed cost
  std::vector<double> pi;              // over space indices
  std::map<TemplateKey, double> x;     // nonzero template fractions
  std::vector<double> per_type_total;  // sum of x over each type
};

inline StaticOptimum static_optimum(const ConfigurationSpace& space,
                                    const std::vector<double>& rho) {
  const std::size_t n = space.size();
  const std::size_t J = rho.size();
  for (double r : rho)
    if (!(r >= 0)) throw ValidationError("static optimum: loads must be >= 0");

  LpProblem lp;
  lp.c.resize(n);
  for (std::size_t i = 0; i < n; ++i) lp.c[i] = space.configs[i].total_cost();
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i)
      row[i] = static_cast<double>(space.configs[i].count(j));
    lp.A.push_back(std::move(row));
    lp.b.push_back(rho[j]);
    lp.sense.push_back(ConstraintSense::GE);
  }
  lp.A.emplace_back(n, 1.0);
  lp.b.push_back(1.0);
  lp.sense.push_back(ConstraintSense::EQ);

  LpResult res = solve_lp_min(lp);
  if (res.status == LpStatus::Infeasible)
    throw InfeasibleLoadError("static optimum: load vector lies outside the capacity region");
  if (res.status != LpStatus::Optimal)
    throw NumericalError("static optimum: solver failed to converge");

  StaticOptimum out;
  out.objective = res.objective;
  out.pi = std::move(res.x);
  out.per_type_total.assign(J, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.pi[i] <= 1e-12) continue;
    for (const auto& [id, t] : space.configs[i].templates()) {
      out.x[key_of(t)] += out.pi[i];
      out.per_type_total[static_cast<std::size_t>(t.job_type)] += out.pi[i];
    }
  }
  return out;
}

// Largest delta such that (1 + delta) * rho still fits the capacity region,
// to 1e-9 by bisection over feasibility programs.
struct CapacityMargin {
  double delta_star = 0.0;
  bool unconstrained = false;  // rho = 0: every scaling fits
  bool infeasible = false;     // rho itself does not fit
};

inline CapacityMargin capacity_margin(const ConfigurationSpace& space,
                                      const std::vector<double>& rho) {
  const std::size_t n = space.size();
  const std::size_t J = rho.size();
  bool all_zero = true;
  for (double r : rho) {
    if (!(r >= 0)) throw ValidationError("capacity margin: loads must be >= 0");
    if (r > 0) all_zero = false;
  }
  CapacityMargin out;
  if (all_zero) {
    out.unconstrained = true;
    out.delta_star = std::numeric_limits<double>::infinity();
    return out;
  }

  auto feasible = [&](double scale) {
    LpProblem lp;
    lp.c.assign(n, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      std::vector<double> row(n);
      for (std::size_t i = 0; i < n; ++i)
        row[i] = static_cast<double>(space.configs[i].count(j));
      lp.A.push_back(std::move(row));
      lp.b.push_back(scale * rho[j]);
      lp.sense.push_back(ConstraintSense::GE);
    }
    lp.A.emplace_back(n, 1.0);
    lp.b.push_back(1.0);
    lp.sense.push_back(ConstraintSense::EQ);
    return solve_lp_min(lp).status == LpStatus::Optimal;
  };

  if (!feasible(1.0)) {
    out.infeasible = true;
    out.delta_star = -1.0;
    return out;
  }
  // upper bound: no scaling can push a type past its best possible count
  double t_max = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < J; ++j) {
    if (rho[j] <= 0) continue;
    int best = 0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, space.configs[i].count(j));
    t_max = std::min(t_max, static_cast<double>(best) / rho[j]);
  }
  double lo = 1.0, hi = t_max + 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, lo); ++it) {
    double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  out.delta_star = lo - 1.0;
  // the feasibility probes resolve the boundary only to the simplex phase-1
  // tolerance; snap anything below that to an exact zero margin
  if (out.delta_star < 1e-6) out.delta_star = 0.0;
  return out;
}

}  // namespace gpack
