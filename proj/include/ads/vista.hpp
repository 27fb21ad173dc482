#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ads/common.hpp"

namespace ads {

enum class VistaType { Road, MergeYield, LaneChange, CrossYield, CrossTrafficLight, CrossStop };

const char* to_string(VistaType t);

enum class LightColor { Red, Yellow, Green };

const char* to_string(LightColor c);

struct LightState {
  LightColor color = LightColor::Red;
  double ttr = 0.0;  // time until the light shows red; 0 iff red
  double ttg = 0.0;  // time until the light shows green; 0 iff green
};

enum class FrontKind { Vehicle, FictitiousVehicle, SpeedLimitSign, GuardSignal };

// One entry of the ordered front-obstacle list, positioned by distance ahead
// of the ego vehicle along its route.
struct FrontItem {
  FrontKind kind;
  int id = -1;  // vehicle index or signal index; -1 for the fictitious vehicle
  double dist = 0.0;
  double v = 0.0;  // vehicles
  double V = 0.0;  // vehicles: speed limit; speed-limit signs: posted limit
  bool lane_change_active = false;
};

// A vehicle arriving toward a conflict point of the guarded junction, or the
// fictitious vehicle standing at the lateral visibility boundary of its road.
struct ArrivingVehicle {
  int entry = -1;  // junction entry the vehicle comes through
  bool fictitious = false;
  int vehicle = -1;
  double d_a = kInf;  // remaining distance to the conflict point
  double v = 0.0;
  double V = 0.0;
};

struct JunctionOccupant {
  int vehicle;
  double v;
  bool at_entry;  // standing at its own entry stop position
};

// A vehicle standing at one of the junction entries (all-way stop protocol).
struct EntryWaiter {
  int entry;
  int vehicle;
  std::optional<double> st;
  int priority = 0;
};

struct EntryLight {
  int entry;
  int signal;
  double ttg;
};

// The autopilot's entire input: ego snapshot, simplified front obstacles,
// arriving vehicles, and the parameters of the guarded critical section.
struct Vista {
  VistaType type = VistaType::Road;
  int ego = -1;
  double t = 0.0;
  double v_e = 0.0;
  double V_e = 0.0;
  double fd = 0.0;       // frontal visibility actually available (route-capped)
  double progress = 0.0; // ego arc length along its route

  std::vector<FrontItem> front;  // ordered by dist; the last entry is a vehicle

  // guarded junction meta (type != Road)
  int guard_signal = -1;  // signal index; -2 for the virtual lane-change guard
  double d_h = kInf;      // distance to the protecting signal
  double cd = 0.0;        // critical distance protected past the signal
  int junction = -1;      // junction class id

  // traffic lights
  LightState light{};
  double yellow = 0.0;
  double all_red = 0.0;
  std::vector<EntryLight> entry_lights;  // other entries of the junction

  std::vector<ArrivingVehicle> arriving;
  std::vector<JunctionOccupant> occupants;
  std::vector<EntryWaiter> waiters;

  // ego stop state (cross-stop)
  std::optional<double> st_e;
  int ego_entry = -1;
  int ego_priority = 0;

  // lane change meta
  double lc_end_dist = kInf;              // distance to the end of the transition
  double d_f1 = kInf;                     // own-lane front vehicle (caution target)
  double d_f2 = kInf;                     // target-lane front gap from ego's projection
  std::optional<double> d_a2;             // target-lane rear gap (real vehicle)
  double a2_V = 0.0;
  double a2_boundary_V = 0.0;             // limit at the lateral visibility boundary
  double a2_ld = 0.0;
  bool neighbor_flashing = false;         // f1 or a1 currently changing lanes

  // Distance to the closest front vehicle (the follow target).
  double d_f() const {
    for (auto it = front.rbegin(); it != front.rend(); ++it)
      if (it->kind == FrontKind::Vehicle || it->kind == FrontKind::FictitiousVehicle) return it->dist;
    return kInf;
  }
};

}  // namespace ads
