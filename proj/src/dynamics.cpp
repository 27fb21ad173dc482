#include "ads/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace ads {

void DynamicsParams::validate() const {
  if (!(b_max > 0.0) || !std::isfinite(b_max)) throw ScenarioError("b_max must be > 0");
  if (a_max < 0.0 || !std::isfinite(a_max)) throw ScenarioError("a_max must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ScenarioError("dt must be > 0");
}

SpeedLimitConstraints::SpeedLimitConstraints(std::vector<SpeedLimit> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ScenarioError("speed limit constraints must not be empty");
  if (std::abs(entries_.front().d) > kPosTol) throw ScenarioError("first constraint must start at distance 0");
  entries_.front().d = 0.0;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].V < 0.0) throw ScenarioError("speed limit must be >= 0");
    if (i + 1 < entries_.size()) {
      if (entries_[i + 1].d <= entries_[i].d + kPosTol)
        throw ScenarioError("constraint distances must be strictly increasing");
      if (entries_[i].V == 0.0) throw ScenarioError("only the final constraint may require speed 0");
    }
  }
}

SpeedLimitConstraints SpeedLimitConstraints::shifted(double dd) const {
  std::vector<SpeedLimit> out;
  for (size_t i = 0; i < entries_.size(); ++i) {
    double next_d = (i + 1 < entries_.size()) ? entries_[i + 1].d : kInf;
    if (next_d <= dd + kPosTol && i + 1 < entries_.size()) continue;  // interval fully passed
    out.push_back(SpeedLimit{std::max(entries_[i].d - dd, 0.0), entries_[i].V});
  }
  return SpeedLimitConstraints(std::move(out));
}

double braking_distance(const DynamicsParams& p, double v) {
  if (v < 0.0) throw PolicyPreconditionError("braking_distance: negative speed");
  double step = p.b_max * p.dt;
  double dist = 0.0;
  while (v >= step) {
    dist += v * p.dt - p.b_max * p.dt * p.dt / 2.0;
    v -= step;
  }
  return dist + v * p.dt / 2.0;
}

bool controllable(const DynamicsParams& p, double v, const SpeedLimitConstraints& vl) {
  double bv = braking_distance(p, v);
  for (const auto& c : vl.entries())
    if (bv > c.d + braking_distance(p, c.V) + kDynEps) return false;
  return true;
}

namespace {

// Largest post-period speed w such that the stopping envelope from w stays
// within budget: dd(w) + B(w) <= budget, where dd(w) = dt*(v+w)/2.
// B is piecewise linear in w on [k*b*dt, (k+1)*b*dt), which makes the bound
// solvable per piece; the envelope is continuous and strictly increasing in w.
double max_speed_within_envelope(const DynamicsParams& p, double v, double budget, double w_ub) {
  double bdt = p.b_max * p.dt;
  int k_ub = static_cast<int>(std::floor(w_ub / bdt)) + 1;
  for (int k = 0; k <= k_ub; ++k) {
    // On piece k: dd + B(w) = dt*(v/2 + (k+1)*w) - b*dt^2/2 * k*(k+1)
    double w = (budget / p.dt - v / 2.0 + (p.b_max * p.dt / 2.0) * k * (k + 1)) / (k + 1);
    double lo = k * bdt;
    double hi = (k + 1) * bdt;
    if (w < lo - kDynEps) return std::max(w, 0.0);  // bound falls below this piece
    if (w < hi || k == k_ub) return std::min(w, w_ub);
  }
  return w_ub;
}

}  // namespace

ControlOutput speed_control(const DynamicsParams& p, double v, const SpeedLimitConstraints& vl) {
  if (!controllable(p, v, vl))
    throw PolicyPreconditionError("speed_control called outside its controllability domain");

  double a_lo = std::max(-p.b_max, -v / p.dt);  // resulting speed must stay >= 0
  double a_star = p.a_max;
  for (const auto& c : vl.entries()) {
    double a_i;
    if (c.d <= kPosTol) {
      // Immediate constraint: cap the new speed at V_i.
      a_i = std::min(p.a_max, (c.V - v) / p.dt);
    } else {
      double budget = c.d + braking_distance(p, c.V);
      double w = max_speed_within_envelope(p, v, budget, v + p.a_max * p.dt);
      a_i = (w - v) / p.dt;
    }
    a_star = std::min(a_star, a_i);
  }
  a_star = std::clamp(a_star, a_lo, p.a_max);
  return ControlOutput{a_star * p.dt, v * p.dt + a_star * p.dt * p.dt / 2.0};
}

}  // namespace ads
