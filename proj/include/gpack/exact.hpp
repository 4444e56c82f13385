#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "gpack/enumerate.hpp"
#include "gpack/policy.hpp"

namespace gpack {

struct StationaryDistribution {
  std::vector<double> p;
  double residual = 0.0;  // ||p^T Q||_inf for solver output, 0 for closed forms
};

namespace detail {

// log(n!) via lgamma; exact enough for the factorials that fit a double.
inline double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

inline StationaryDistribution normalize_logs(std::vector<double> logs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : logs) mx = std::max(mx, v);
  if (!std::isfinite(mx)) throw NumericalError("distribution: all weights vanish");
  double z = 0.0;
  for (double v : logs) z += std::exp(v - mx);
  StationaryDistribution out;
  out.p.resize(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) out.p[i] = std::exp(logs[i] - mx) / z;
  return out;
}

}  // namespace detail

// Free-process law over configurations: weight ~ (free slots)! * prod_j rho_j^count_j.
// Computed in the log domain and normalized with one exp pass.
inline StationaryDistribution config_base_measure(const ConfigurationSpace& space,
                                                  const std::vector<double>& rho) {
  std::vector<double> logs(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Configuration& c = space.configs[i];
    double lw = detail::log_factorial(c.free_slot_count());
    for (std::size_t j = 0; j < rho.size(); ++j) {
      int n = c.count(j);
      if (n == 0) continue;
      if (rho[j] <= 0) {
        lw = -std::numeric_limits<double>::infinity();
        break;
      }
      lw += n * std::log(rho[j]);
    }
    logs[i] = lw;
  }
  return detail::normalize_logs(logs);
}

// Same shape with every rho_j replaced by lambda_hat / mu_j (the
// dedicated-clock chain's base measure).
inline StationaryDistribution config_base_measure_clocked(const ConfigurationSpace& space,
                                                          const std::vector<JobType>& jobs,
                                                          double lambda_hat) {
  if (!(lambda_hat > 0)) throw DomainError("base measure: lambda_hat must be > 0");
  std::vector<double> rho(jobs.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) rho[j] = lambda_hat / jobs[j].service_rate;
  return config_base_measure(space, rho);
}

// Gibbs tilt of a base measure by exp(sum of template weights / beta).
inline StationaryDistribution closed_form_stationary(
    const ConfigurationSpace& space, const StationaryDistribution& base,
    const std::function<double(const Template&)>& weight, double beta) {
  if (!(beta > 0)) throw DomainError("closed form: beta must be > 0");
  std::vector<double> logs(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    double lw = base.p[i] > 0 ? std::log(base.p[i]) : -std::numeric_limits<double>::infinity();
    for (const auto& [id, t] : space.configs[i].templates()) lw += weight(t) / beta;
    logs[i] = lw;
  }
  return detail::normalize_logs(logs);
}

// Sum of fixed template weights per configuration.
inline std::vector<double> config_weight_sums(const ConfigurationSpace& space,
                                              const WeightModel& weights) {
  std::vector<double> out(space.size(), 0.0);
  for (std::size_t i = 0; i < space.size(); ++i)
    for (const auto& [id, t] : space.configs[i].templates())
      out[i] += weights.fixed_weight(t);
  return out;
}

enum class GeneratorVariant { QueueDriven, DedicatedClock };

// CTMC generator of the fixed-weight template process on the enumerated
// space. Both variants change one template per transition:
//   queue-driven     C -> C+A at lambda_j sigma(w_A/beta)/|A_j(C)|,
//                    C+A -> C at mu_j (1 - sigma(w_A/beta));
//   dedicated-clock  C -> C+A at lambda_hat exp(w_A/beta)/|A_j(C)|,
//                    C+A -> C at mu_j.
inline Eigen::MatrixXd build_fixed_weight_generator(const ConfigurationSpace& space,
                                                    const ClusterSpec& cluster,
                                                    const std::vector<JobType>& jobs,
                                                    const WeightModel& weights,
                                                    GeneratorVariant variant) {
  const auto n = static_cast<Eigen::Index>(space.size());
  const double beta = weights.params().beta;
  const double lambda_hat = weights.params().clock_base_rate;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Configuration& c = space.configs[i];
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      auto options = enumerate_feasible_templates(c, static_cast<int>(j), jobs[j], cluster);
      if (options.empty()) continue;
      const auto n_options = static_cast<double>(options.size());
      for (const Template& t : options) {
        ConfigKey bigger = space.keys[i];
        bigger.push_back(key_of(t));
        std::sort(bigger.begin(), bigger.end());
        int k = space.at(bigger);
        double w = weights.fixed_weight(t);
        double up, down;
        if (variant == GeneratorVariant::QueueDriven) {
          double sigma = accept_probability(w, beta);
          up = jobs[j].arrival_rate * sigma / n_options;
          down = jobs[j].service_rate * (1.0 - sigma);
        } else {
          up = lambda_hat * std::exp(w / beta) / n_options;
          down = jobs[j].service_rate;
        }
        Q(static_cast<Eigen::Index>(i), k) += up;
        Q(k, static_cast<Eigen::Index>(i)) += down;
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) Q(i, i) = -Q.row(i).sum();
  return Q;
}

// Left null vector of a generator, normalized to a probability vector.
// Requires an irreducible chain; the solve must reproduce pi Q = 0 to 1e-10.
inline StationaryDistribution solve_stationary(const Eigen::MatrixXd& Q) {
  const Eigen::Index n = Q.rows();
  if (n == 0 || Q.cols() != n) throw ValidationError("solve_stationary: square matrix required");

  // strong connectivity over edges with positive rate
  auto reach = [&](bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      Eigen::Index v = stack.back();
      stack.pop_back();
      for (Eigen::Index w = 0; w < n; ++w) {
        double rate = forward ? Q(v, w) : Q(w, v);
        if (w != v && rate > 0 && !seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    for (char s : seen)
      if (!s) return false;
    return true;
  };
  if (!reach(true) || !reach(false))
    throw ReducibleChainError("solve_stationary: generator is not irreducible");

  // Solve pi Q = 0, sum pi = 1: transpose, replace one balance equation
  // (they are linearly dependent) with the normalization row.
  Eigen::MatrixXd A = Q.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  A.row(n - 1).setOnes();
  rhs(n - 1) = 1.0;
  Eigen::VectorXd pi = A.fullPivLu().solve(rhs);

  StationaryDistribution out;
  out.p.resize(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = pi(i);
    if (v < 0) {
      if (v < -1e-9) throw NumericalError("solve_stationary: negative probability");
      v = 0.0;
    }
    sum += v;
  }
  for (Eigen::Index i = 0; i < n; ++i) out.p[static_cast<std::size_t>(i)] = std::max(pi(i), 0.0) / sum;

  Eigen::RowVectorXd piv(n);
  for (Eigen::Index i = 0; i < n; ++i) piv(i) = out.p[static_cast<std::size_t>(i)];
  double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  out.residual = (piv * Q).cwiseAbs().maxCoeff();
  if (out.residual > 1e-10 * scale)
    throw NumericalError("solve_stationary: residual " + std::to_string(out.residual) +
                         " exceeds tolerance");
  return out;
}

// Total variation and Kullback-Leibler divergence between two distributions
// on the same indexed support.
inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size())
    throw SupportMismatchError("total_variation: distributions differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

inline double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size())
    throw SupportMismatchError("kl_divergence: distributions differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    if (q[i] == 0)
      throw SupportMismatchError("kl_divergence: p puts mass where q has none");
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

}  // namespace gpack
