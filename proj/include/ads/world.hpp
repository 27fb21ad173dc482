#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ads/dynamics.hpp"
#include "ads/map.hpp"
#include "ads/scenario.hpp"
#include "ads/vista.hpp"

namespace ads {

enum class SignalKind { Yield, Stop, TrafficLight, SpeedLimit };

const char* to_string(SignalKind k);

struct Signal {
  std::string id;
  SignalKind kind;
  Position pos;
  double cd = 0.0;     // critical distance, junction-guarding kinds
  double limit = 0.0;  // m/s, speed_limit kind
  int priority = 0;

  // resolved against the map
  int junction = -1;      // guarded junction class
  int entry = -1;         // entry index within the junction
  int cycle = -1;         // light cycle index
  int cycle_slot = -1;
};

struct LightCycleDef {
  double green;
  double yellow;
  double all_red;
  double start_offset;
  std::vector<int> signals;  // traffic-light signal indices in round-robin order
  double period() const {
    return static_cast<double>(signals.size()) * (green + yellow + all_red);
  }
};

// One approach into a junction: the entry boundary vertex and the road chain
// leading to it, listed nearest-first with cumulative distances.
struct JunctionEntry {
  int entry_vertex = -1;
  int entry_point = -1;             // canonical point id of the vertex
  std::vector<int> approach_edges;  // nearest-first walking backward
  double approach_length = 0.0;
  int signal = -1;  // guarding signal on this approach (-1: priority road)
};

struct JunctionInfo {
  int klass = -1;
  std::vector<JunctionEntry> entries;
  bool all_way_stop = false;
  int cycle = -1;
};

// Another movement through the junction, seen from one vehicle's route: which
// entry it uses and where it first meets the route.
struct ConflictRoad {
  int entry = -1;              // index into JunctionInfo.entries
  double conflict_arc = kInf;  // arc of the conflict point on the observer route
  double arrive_dist = kInf;   // entry vertex -> conflict point along the arriving movement
  int conflict_point = -1;     // canonical point id (-1 when movements never meet)
  Position conflict_pos;
};

struct JunctionVisit {
  int klass = -1;
  double enter_arc = 0.0;
  double exit_arc = 0.0;
  int ego_entry = -1;
  int signal = -1;  // guarding signal for this approach (-1: priority road)
  double signal_arc = kInf;
  std::vector<ConflictRoad> conflicts;  // one per other entry
};

struct LaneChangeOnRoute {
  int adjacency = -1;
  double start_arc = 0.0;  // transition entry on the vehicle route
  double end_arc = 0.0;
};

struct SignOnRoute {
  double arc;
  int signal;
};

struct RouteInfo {
  Route route;
  std::vector<SignOnRoute> signs;  // every signal positioned on the route, by arc
  std::vector<JunctionVisit> visits;
  std::vector<LaneChangeOnRoute> lane_changes;
};

struct LaneAdjacency {
  std::vector<int> from_chain;
  std::vector<int> to_chain;
  int transition_edge = -1;
  double from_arc = 0.0;   // transition start within the from-chain
  double to_arc = 0.0;     // transition end within the to-chain
  double trans_len = 0.0;
  // arc of a chain position = cumulative length up to its edge + offset
  std::vector<double> from_cum;
  std::vector<double> to_cum;
};

struct VehicleSpec {
  std::string id;
  RouteInfo route_info;
  double fd = 0.0;
  double ld = 0.0;
  double initial_progress = 0.0;
  double initial_v = 0.0;
  double initial_V = 0.0;
};

// The immutable compiled scenario: map, signals, junction metadata and
// per-vehicle route precomputations. Safe to share across threads.
class World {
 public:
  explicit World(const Scenario& sc);

  const Scenario& scenario() const { return scenario_; }
  const MetricGraph& map() const { return map_; }
  const DynamicsParams& dynamics() const { return dynamics_; }
  double v0() const { return v0_; }
  double default_limit() const { return default_limit_; }

  const std::vector<Signal>& signals() const { return signals_; }
  const Signal& signal(int i) const { return signals_[i]; }
  const std::vector<LightCycleDef>& cycles() const { return cycles_; }
  const std::vector<LaneAdjacency>& adjacencies() const { return adjacencies_; }
  const std::vector<VehicleSpec>& vehicles() const { return vehicles_; }
  const VehicleSpec& vehicle(int i) const { return vehicles_[i]; }
  std::optional<int> find_vehicle(const std::string& id) const;

  // Junction metadata for a junction class; null for plain road classes.
  const JunctionInfo* junction(int klass) const;

  LightState light_state(int signal, double t) const;

  // Arc position of a map position within a lane chain, if it lies on it.
  std::optional<double> chain_arc(const LaneAdjacency& adj, bool from_side, Position p) const;
  Position chain_position(const LaneAdjacency& adj, bool from_side, double arc) const;

  // Visibility overrides used by fault injection (returns a copy).
  double fd_of(int vehicle) const { return fd_override_[vehicle] > 0 ? fd_override_[vehicle] : vehicles_[vehicle].fd; }
  double ld_of(int vehicle) const { return vehicles_[vehicle].ld; }
  void override_fd(int vehicle, double fd) { fd_override_[vehicle] = fd; }

 private:
  void build_map(const Scenario& sc);
  void build_signals(const Scenario& sc);
  void build_junction_info();
  void build_adjacencies(const Scenario& sc);
  void build_vehicles(const Scenario& sc);

  Scenario scenario_;
  MetricGraph map_;
  DynamicsParams dynamics_;
  double v0_ = 0.0;
  double default_limit_ = 0.0;
  std::vector<Signal> signals_;
  std::vector<LightCycleDef> cycles_;
  std::vector<JunctionInfo> junctions_;  // indexed by junction class (may be empty entries)
  std::vector<LaneAdjacency> adjacencies_;
  std::vector<VehicleSpec> vehicles_;
  std::vector<double> fd_override_;
};

}  // namespace ads
