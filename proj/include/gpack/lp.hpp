#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gpack/errors.hpp"

namespace gpack {

enum class ConstraintSense { LE, GE, EQ };

struct LpProblem {
  std::vector<double> c;                    // minimize c . x
  std::vector<std::vector<double>> A;       // one row per constraint
  std::vector<double> b;
  std::vector<ConstraintSense> sense;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

// Dense two-phase simplex with Bland's rule (deterministic, cycle-free).
// Fine for the configuration-basis programs this project solves: hundreds of
// columns, well-scaled coefficients.
inline LpResult solve_lp_min(const LpProblem& prob) {
  constexpr double kTol = 1e-9;
  const std::size_t n = prob.c.size();
  const std::size_t m = prob.A.size();
  if (prob.b.size() != m || prob.sense.size() != m)
    throw ValidationError("lp: inconsistent problem dimensions");
  for (const auto& row : prob.A)
    if (row.size() != n) throw ValidationError("lp: ragged constraint matrix");

  // Normalize to b >= 0, then append slack/surplus and artificial columns.
  std::vector<std::vector<double>> A(m, std::vector<double>());
  std::vector<double> b(m);
  std::vector<ConstraintSense> sense(m);
  for (std::size_t i = 0; i < m; ++i) {
    A[i] = prob.A[i];
    b[i] = prob.b[i];
    sense[i] = prob.sense[i];
    if (b[i] < 0) {
      for (double& v : A[i]) v = -v;
      b[i] = -b[i];
      if (sense[i] == ConstraintSense::LE) sense[i] = ConstraintSense::GE;
      else if (sense[i] == ConstraintSense::GE) sense[i] = ConstraintSense::LE;
    }
  }

  std::size_t n_slack = 0, n_art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (sense[i] != ConstraintSense::EQ) ++n_slack;
    if (sense[i] != ConstraintSense::LE) ++n_art;
  }
  const std::size_t total = n + n_slack + n_art;
  const std::size_t art_begin = n + n_slack;

  // tableau: m rows of [columns | rhs], plus an objective row handled apart
  std::vector<std::vector<double>> T(m, std::vector<double>(total + 1, 0.0));
  std::vector<std::size_t> basis(m);
  {
    std::size_t s = n, a = art_begin;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
      T[i][total] = b[i];
      if (sense[i] == ConstraintSense::LE) {
        T[i][s] = 1.0;
        basis[i] = s++;
      } else if (sense[i] == ConstraintSense::GE) {
        T[i][s] = -1.0;
        ++s;
        T[i][a] = 1.0;
        basis[i] = a++;
      } else {
        T[i][a] = 1.0;
        basis[i] = a++;
      }
    }
  }

  std::vector<double> obj(total + 1, 0.0);
  auto eliminate_basics = [&]() {
    for (std::size_t i = 0; i < m; ++i) {
      double f = obj[basis[i]];
      if (f != 0.0)
        for (std::size_t j = 0; j <= total; ++j) obj[j] -= f * T[i][j];
    }
  };

  auto pivot = [&](std::size_t row, std::size_t col) {
    double p = T[row][col];
    for (std::size_t j = 0; j <= total; ++j) T[row][j] /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row) continue;
      double f = T[i][col];
      if (f != 0.0)
        for (std::size_t j = 0; j <= total; ++j) T[i][j] -= f * T[row][j];
    }
    double f = obj[col];
    if (f != 0.0)
      for (std::size_t j = 0; j <= total; ++j) obj[j] -= f * T[row][j];
    basis[row] = col;
  };

  // Bland: entering = lowest-index column with a negative reduced cost;
  // leaving = ratio-test winner with the lowest basis index.
  auto iterate = [&](std::size_t allowed_cols) -> bool {  // false means unbounded
    for (;;) {
      std::size_t enter = total;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (obj[j] < -kTol) {
          enter = j;
          break;
        }
      }
      if (enter == total) return true;
      std::size_t leave = m;
      double best = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (T[i][enter] > kTol) {
          double ratio = T[i][total] / T[i][enter];
          if (leave == m || ratio < best - kTol ||
              (ratio < best + kTol && basis[i] < basis[leave]))
            leave = i, best = ratio;
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
  };

  // Phase 1: minimize the artificial mass.
  if (n_art > 0) {
    for (std::size_t j = art_begin; j < total; ++j) obj[j] = 1.0;
    eliminate_basics();
    if (!iterate(total)) throw NumericalError("lp: phase 1 unbounded (cannot happen)");
    if (-obj[total] > 1e-7) return {LpStatus::Infeasible, 0.0, {}};
    // Kick artificials still in the basis out onto any real column.
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < art_begin) continue;
      for (std::size_t j = 0; j < art_begin; ++j) {
        if (std::abs(T[i][j]) > kTol) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2 over the real and slack columns only.
  obj.assign(total + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) obj[j] = prob.c[j];
  eliminate_basics();
  if (!iterate(art_begin)) return {LpStatus::Unbounded, 0.0, {}};

  LpResult res;
  res.status = LpStatus::Optimal;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = T[i][total];
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += prob.c[j] * res.x[j];
  return res;
}

}  // namespace gpack
