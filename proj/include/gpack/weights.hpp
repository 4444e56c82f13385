#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gpack/errors.hpp"

namespace gpack {

// Scheduler knobs shared by every policy variant. Defaults follow the
// standard preset: alpha tied to beta^2 unless set explicitly.
struct SchedulerParams {
  double beta = 0.5;
  double alpha = 0.25;
  double epsilon = 0.1;
  double h = 2.718281828459045;  // queue offset inside f
  double b = 0.5;                // f(x) = log(x)^(1-b)
  double frame_length = 1.0;     // T, frame-based only
  double clock_base_rate = 1.0;  // base proposal rate, dedicated-clock variant only

  void validate() const {
    std::string bad;
    auto req = [&](bool ok, const char* msg) {
      if (!ok) bad += std::string(bad.empty() ? "" : "; ") + msg;
    };
    req(beta > 0, "beta must be > 0");
    req(alpha > 0, "alpha must be > 0");
    req(epsilon > 0, "epsilon must be > 0");
    req(h >= 1 && std::isfinite(h), "h must be finite and >= 1");
    req(b > 0 && b < 1, "b must lie in (0,1)");
    req(frame_length > 0, "frame_length must be > 0");
    req(clock_base_rate > 0, "clock_base_rate must be > 0");
    if (!bad.empty()) throw ValidationError("scheduler params: " + bad);
  }
};

// f(x) = log(x)^(1-b); concave, increasing, f(1) = 0. Domain x >= 1.
inline double f_eval(double x, double b) {
  if (!(x >= 1)) throw DomainError("f_eval: argument must be >= 1, got " + std::to_string(x));
  if (!(b > 0 && b < 1)) throw DomainError("f_eval: b must lie in (0,1)");
  return std::pow(std::log(x), 1.0 - b);
}

inline double f_prime(double x, double b) {
  if (!(x >= 1)) throw DomainError("f_prime: argument must be >= 1");
  if (!(b > 0 && b < 1)) throw DomainError("f_prime: b must lie in (0,1)");
  double lx = std::log(x);
  if (lx == 0) return std::numeric_limits<double>::infinity();
  return (1.0 - b) * std::pow(lx, -b) / x;
}

// f extended by 0 below its domain; used where queue lengths (not h-shifted
// values) feed the score directly.
inline double f_floor(double x, double b) { return x >= 1 ? f_eval(x, b) : 0.0; }

// Group-coupled urgency: max of own f value and a small multiple of the
// largest one, so starved types keep a toehold in every weight.
inline double f_group(std::size_t j, std::span<const double> x, double b, double epsilon,
                      int total_slots) {
  if (j >= x.size()) throw DomainError("f_group: type index out of range");
  double fmax = 0.0;
  for (double v : x) fmax = std::max(fmax, f_eval(v, b));
  return std::max(f_eval(x[j], b), (epsilon / (8.0 * total_slots)) * fmax);
}

// Template weight: urgency minus placement cost, evaluated at the h-shifted
// queue vector.
inline double tilde_weight(std::size_t j, double cost, std::span<const std::int64_t> queues,
                           const SchedulerParams& p, int total_slots) {
  std::vector<double> x(queues.size());
  for (std::size_t k = 0; k < queues.size(); ++k) x[k] = p.h + static_cast<double>(queues[k]);
  return p.alpha * f_group(j, x, p.b, p.epsilon, total_slots) - cost;
}

// Logistic acceptance, computed on the branch that cannot overflow and
// clamped away from exact 0/1 (a hard 0 or 1 would freeze the chain).
inline double accept_probability(double w, double beta) {
  if (!(beta > 0)) throw DomainError("accept_probability: beta must be > 0");
  double z = w / beta;
  double p;
  if (z >= 0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    double e = std::exp(z);
    p = e / (1.0 + e);
  }
  return std::clamp(p, 1e-300, 1.0 - 1e-16);
}

}  // namespace gpack
