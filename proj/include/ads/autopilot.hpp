#pragma once

#include <optional>
#include <utility>

#include "ads/dynamics.hpp"
#include "ads/environment.hpp"
#include "ads/vista.hpp"
#include "ads/world.hpp"

namespace ads {

// Per-vehicle controller memory: the active mode, the clearance flag and the
// protecting signal bound at mode initialization.
struct PolicyState {
  VistaType mode = VistaType::Road;
  bool cl = false;
  int h = -1;  // signal index; -2 for the virtual lane-change guard
  std::optional<double> st;
};

struct Command {
  double dv = 0.0;
  double dd = 0.0;
  bool lane_change_signal = false;
};

// Vista Manager: simplification, type classification and parameter
// extraction over the raw perception.
Vista classify(const World& w, const AdsState& s, const RawVista& raw);

// Speed-limit constraints up to a position `target` ahead of the ego vehicle:
// the current limit, every speed-limit sign strictly before the target, and
// a stop constraint at the target itself.
SpeedLimitConstraints speed_limits(const Vista& vs, double target);

// Drive toward (and never beyond) the position `target` ahead. Throws
// PolicyPreconditionError when called outside the controllability domain.
Command follow(const World& w, const Vista& vs, double target);

// Predicted time to cover `x` meters when continuously following a frozen
// position `target` ahead; +inf when the target is unreachable or the
// prediction exceeds its iteration cap.
double travel_time(const World& w, const Vista& vs, double x, double target);

// One guarded-command step of the policy matching the vista type.
std::pair<Command, PolicyState> policy_step(const World& w, const PolicyState& ps, const Vista& vs);

// (Re)initialize the policy state when the vista type or protecting signal
// changes. Transitions must pass through the road mode.
PolicyState mode_transition(const PolicyState& ps, const Vista& vs);

}  // namespace ads
