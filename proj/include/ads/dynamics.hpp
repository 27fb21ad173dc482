#pragma once

#include <vector>

#include "ads/common.hpp"

namespace ads {

struct DynamicsParams {
  double b_max = 3.4;  // maximal deceleration magnitude, m/s^2
  double a_max = 2.5;  // maximal acceleration, m/s^2
  double dt = 0.2;     // control period, s

  void validate() const;
};

// One speed-limit constraint: limit V enforced from distance d onward.
struct SpeedLimit {
  double d;
  double V;
};

// Ordered speed-limit constraints: d_0 = 0, strictly increasing distances,
// implicit final interval extends to infinity. At most the last entry may
// carry V = 0 (a stop target).
class SpeedLimitConstraints {
 public:
  SpeedLimitConstraints() = default;
  explicit SpeedLimitConstraints(std::vector<SpeedLimit> entries);

  const std::vector<SpeedLimit>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }
  const SpeedLimit& operator[](size_t i) const { return entries_[i]; }

  // Constraints left after traveling dd: distances shifted down and clamped
  // at zero, fully passed intervals dropped.
  SpeedLimitConstraints shifted(double dd) const;

 private:
  std::vector<SpeedLimit> entries_;
};

struct ControlOutput {
  double dv;  // speed variation over one period
  double dd;  // distance traveled over one period
};

// Distance needed to brake from speed v to 0 using full deceleration in
// discrete dt periods. Strict and monotonic: B(0) = 0, v1 > v2 => B(v1) > B(v2).
double braking_distance(const DynamicsParams& p, double v);

// True iff the vehicle at speed v can honor every constraint ahead:
// B(v) <= d_i + B(V_i) for all i.
bool controllable(const DynamicsParams& p, double v, const SpeedLimitConstraints& vl);

// Greatest per-period (dv, dd) compliant with all constraints. Partial:
// throws PolicyPreconditionError when (v, vl) is not controllable.
ControlOutput speed_control(const DynamicsParams& p, double v, const SpeedLimitConstraints& vl);

}  // namespace ads
