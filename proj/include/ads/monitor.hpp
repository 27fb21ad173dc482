#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ads/autopilot.hpp"
#include "ads/environment.hpp"

namespace ads {

// The obstacle whose position a vehicle currently follows.
struct LeadObstacle {
  bool is_signal = false;
  int id = -1;  // signal or vehicle index; -1 for the fictitious vehicle
  double dist = kInf;
};

// Everything the monitor needs to know about one vehicle at one state.
struct VehicleFrame {
  int vehicle = -1;
  Vista vista;
  PolicyState ps;  // the policy state in force when executing at this state
  LeadObstacle fo;
  double limit_dist = 0.0;  // free-space length
  Route fs;
  double odometer = 0.0;
  double progress = 0.0;
  double v = 0.0;
  double V = 0.0;
  bool i1 = false;
  bool i2 = false;
};

struct Frame {
  double t = 0.0;
  std::vector<std::optional<VehicleFrame>> vehicles;  // by index; empty for retired
  bool safe = true;
  bool disjoint = true;
  std::vector<std::string> issues;
};

LeadObstacle lead_obstacle(const Vista& vs, const PolicyState& ps);

// Free-space length: the strongest of the lead obstacle, the ego braking
// envelope at the enforced limit and the envelopes of speed-limit signs ahead.
double limit_position(const World& w, const Vista& vs, double fo_dist);

// I1 and I2 with the Table-1 side conditions for the vista's type.
bool vista_safe(const World& w, const Vista& vs, const PolicyState& ps, std::string* why = nullptr);

// Vistas, lead obstacles, free spaces and per-vehicle verdicts for a state.
// ps_in carries each vehicle's policy state; mode transitions are applied.
Frame compute_frame(const World& w, const AdsState& s, const std::vector<PolicyState>& ps_in);

// Pairwise position-set disjointness of all free spaces.
bool free_spaces_disjoint(const World& w, const Frame& f, std::string* why = nullptr);

// Lead obstacle never regresses into the braking range between two states.
bool non_intrusive(const World& w, const VehicleFrame& prev, const VehicleFrame& cur);

// The vehicle moved within the free space computed at the previous state.
bool no_gaps(const VehicleFrame& prev, const VehicleFrame& cur);

// Free space never retracts across a step.
bool limit_non_retracting(const VehicleFrame& prev, const VehicleFrame& cur);

// Pairs of vehicles strictly inside one junction (mutual exclusion check for
// protected crossings); entries standing at their stop lines are excluded.
std::vector<std::pair<int, int>> junction_conflicts(const World& w, const AdsState& s);

}  // namespace ads
