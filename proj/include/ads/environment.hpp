#pragma once

#include <optional>
#include <vector>

#include "ads/vista.hpp"
#include "ads/world.hpp"

namespace ads {

struct VehicleState {
  double progress = 0.0;  // arc length along the declared route (wraps on cyclic routes)
  double odometer = 0.0;  // total distance driven; monotone even on cyclic routes
  double v = 0.0;
  double V = 0.0;  // speed limit enforced at the current position
  std::optional<double> st;
  bool lane_change_cmd = false;
  bool retired = false;
};

struct AdsState {
  double t = 0.0;
  std::vector<VehicleState> vehicles;
};

AdsState initial_state(const World& w);

struct StepCommand {
  double dv = 0.0;
  double dd = 0.0;
  bool lane_change_signal = false;
};

// Synchronous step: applies one command per vehicle, updates enforced speed
// limits when speed-limit signs are passed, maintains stop times, retires
// vehicles at the end of their routes and advances the clock by dt.
AdsState step(const World& w, const AdsState& s, const std::vector<StepCommand>& cmds);

// A vehicle signals a lane change while on a transition edge or while its
// policy keeps the indicator on.
bool lane_change_active(const World& w, const AdsState& s, int vehicle);

Position vehicle_position(const World& w, const AdsState& s, int vehicle);

// Unclassified perception: ego snapshot plus the full ordered front-obstacle
// list, closed by the fictitious vehicle at the frontal visibility limit.
struct RawVista {
  int ego = -1;
  double t = 0.0;
  double v_e = 0.0;
  double V_e = 0.0;
  double fd = 0.0;       // effective frontal visibility (route-capped)
  double progress = 0.0;
  std::vector<FrontItem> front;
};

RawVista collect_vista(const World& w, const AdsState& s, int ego);

// Populate junction-protocol observations (arriving vehicles, occupants,
// entry waiters, other entries' lights) for the guarded visit.
void populate_junction_meta(const World& w, const AdsState& s, int ego, const JunctionVisit& visit,
                            double window_shift, Vista& vs);

void populate_lane_meta(const World& w, const AdsState& s, int ego, const LaneChangeOnRoute& lc, Vista& vs);

// collect_vista followed by vista-manager classification (autopilot module).
Vista build_vista(const World& w, const AdsState& s, int ego);

}  // namespace ads
