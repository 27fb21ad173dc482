#pragma once

// Independent reference computations used to freeze expected test values.
// These deliberately avoid the library's own algorithms: closures are taken
// over explicit relation matrices, shortest paths over explicitly declared
// arc lists, and the braking/control references follow the recursive
// definitions directly.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

// Transitive closure of a symmetric relation over n items; returns the id of
// the class of each item.
inline std::vector<int> equivalence_classes(int n, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) rel[i][i] = true;
  for (auto [a, b] : pairs) {
    rel[a][b] = true;
    rel[b][a] = true;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (rel[i][k] && rel[k][j]) rel[i][j] = true;
  std::vector<int> cls(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (cls[i] >= 0) continue;
    cls[i] = next;
    for (int j = 0; j < n; ++j)
      if (rel[i][j]) cls[j] = next;
    ++next;
  }
  return cls;
}

// All-pairs shortest paths over an explicit weighted arc list.
inline std::vector<std::vector<double>> shortest_paths(int n,
                                                       const std::vector<std::tuple<int, int, double>>& arcs) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0.0;
  for (auto [a, b, w] : arcs) d[a][b] = std::min(d[a][b], w);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

// The braking reference, written as the recursion defines it.
inline double braking(double v, double b_max, double dt) {
  if (v < b_max * dt) return v * dt / 2.0;
  return v * dt - b_max * dt * dt / 2.0 + braking(v - b_max * dt, b_max, dt);
}

struct Constraint {
  double d;
  double V;
};

inline bool compliant(double v, double a, const std::vector<Constraint>& vl, double b_max, double dt) {
  if (v + a * dt < -1e-12) return false;
  double dd = v * dt + a * dt * dt / 2.0;
  for (const auto& c : vl) {
    bool ok;
    if (c.d > 0.0)
      ok = dd + braking(v + a * dt, b_max, dt) <= c.d + braking(c.V, b_max, dt) + 1e-9;
    else
      ok = v + a * dt <= c.V + 1e-9;
    if (!ok) return false;
  }
  return true;
}

// Brute-force maximal compliant acceleration over a 1e-4 m/s^2 grid.
inline double best_acceleration_grid(double v, const std::vector<Constraint>& vl, double b_max, double a_max,
                                     double dt) {
  const double step = 1e-4;
  for (double a = a_max; a >= -b_max - step / 2; a -= step) {
    double ac = std::max(a, -b_max);
    if (compliant(v, ac, vl, b_max, dt)) return ac;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace oracle
