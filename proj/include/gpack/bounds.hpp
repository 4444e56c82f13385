#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gpack/exact.hpp"
#include "gpack/staticopt.hpp"
#include "gpack/weights.hpp"

namespace gpack {

enum class BoundFamily { FrameBased, QueueDriven };

// Constants the analysis leaves symbolic; callers may pin them, defaults are 1.
struct BoundConstants {
  double B1 = 1.0;
  double B2 = 1.0;
  double C0 = 1.0;
};

struct BoundReport {
  BoundFamily family = BoundFamily::QueueDriven;
  SchedulerParams params;
  std::vector<double> rho;
  double rho_min = 0.0;
  double delta_star = 0.0;
  double optimum = 0.0;        // static optimum objective
  double b_max = 0.0;          // largest single-template cost
  double gamma_min = 0.0;      // smallest base-measure probability
  double log_gamma_min = 0.0;
  double k2 = 0.0;             // f'(h) (M + sum rho)
  double k3 = 0.0;             // f(M + h) M
  double queue_bound = 0.0;    // on the stationary mean of sum_j f(h + Q_j)
  double cost_bound = 0.0;     // on the stationary mean placed cost
  bool params_in_range = true;     // alpha <= beta < 1 and epsilon <= delta*
  bool h_large_enough = true;      // log h >= C0 (1/beta)(1/eps)^((2-b+1/b)/(1-b))
};

// Closed-form performance guarantees for the two analyzed policies. Requires
// a strictly interior load (delta* > 0).
inline BoundReport theorem_bounds(BoundFamily family, const ConfigurationSpace& space,
                                  const std::vector<double>& rho, const SchedulerParams& params,
                                  const BoundConstants& constants = {}) {
  params.validate();
  if (rho.size() != space.universe_range.size())
    throw ValidationError("bounds: load vector length does not match the job type count");

  CapacityMargin margin = capacity_margin(space, rho);
  if (margin.infeasible || !(margin.delta_star > 0) || margin.unconstrained) {
    if (margin.unconstrained)
      throw InfeasibleLoadError("bounds: zero load has no finite guarantees to report");
    throw InfeasibleLoadError(
        "bounds: load must sit strictly inside the capacity region (delta* > 0), got delta* = " +
        std::to_string(margin.delta_star));
  }
  StaticOptimum opt = static_optimum(space, rho);

  BoundReport r;
  r.family = family;
  r.params = params;
  r.rho = rho;
  r.delta_star = margin.delta_star;
  r.optimum = opt.objective;
  double rho_min = std::numeric_limits<double>::infinity();
  double rho_sum = 0.0;
  for (double v : rho) {
    rho_min = std::min(rho_min, v);
    rho_sum += v;
  }
  r.rho_min = rho_min;
  if (!(rho_min > 0))
    throw InfeasibleLoadError("bounds: every job type needs a positive load");

  const double M = space.configs.empty() ? 0.0 : space.configs[0].total_slots();
  for (const Template& t : space.universe) r.b_max = std::max(r.b_max, t.cost);

  const double a = params.alpha, beta = params.beta, eps = params.epsilon;
  const double ds = r.delta_star, G = r.optimum;

  if (family == BoundFamily::FrameBased) {
    const double T = params.frame_length;
    const double B1 = constants.B1, B2 = constants.B2;
    r.queue_bound = ((B1 + B2 * T) + (1.0 + ds) * G / a) / (ds * rho_min) + B1 * T;
    r.cost_bound = G + a * (B1 + B2 * T);
    return r;
  }

  StationaryDistribution base = config_base_measure(space, rho);
  r.gamma_min = *std::min_element(base.p.begin(), base.p.end());
  r.log_gamma_min = std::log(r.gamma_min);
  r.k2 = f_prime(params.h, params.b) * (M + rho_sum);
  r.k3 = f_eval(M + params.h, params.b) * M;

  r.params_in_range = (a <= beta) && (beta < 1.0) && (eps <= ds);
  double need = constants.C0 * (1.0 / beta) *
                std::pow(1.0 / eps, (2.0 - params.b + 1.0 / params.b) / (1.0 - params.b));
  r.h_large_enough = std::log(params.h) >= need;

  r.queue_bound = (2.0 / (rho_min * ds)) *
                  (r.k2 + r.k3 - (beta / a) * r.log_gamma_min +
                   (1.0 / a) * (1.0 + ds / 2.0) * G + (eps / a) * r.b_max);
  r.cost_bound = G + a * (r.k2 + r.k3) - beta * r.log_gamma_min + eps * r.b_max;
  return r;
}

// The standard coupling of the knobs to a single temperature: alpha = beta^2,
// h = exp((1/beta)^(1/(1-b))), epsilon = beta^(b^2/4).
inline SchedulerParams preset_from_beta(double beta, double b) {
  if (!(beta > 0 && beta < 1)) throw ValidationError("preset: beta must lie in (0,1)");
  if (!(b > 0 && b < 1)) throw ValidationError("preset: b must lie in (0,1)");
  SchedulerParams p;
  p.beta = beta;
  p.alpha = beta * beta;
  p.b = b;
  p.epsilon = std::pow(beta, b * b / 4.0);
  double loh = std::pow(1.0 / beta, 1.0 / (1.0 - b));
  p.h = std::exp(loh);
  if (!std::isfinite(p.h))
    throw ValidationError("preset: beta so small that the queue offset h overflows");
  return p;
}

}  // namespace gpack
