#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ads/common.hpp"

namespace ads {

// Plain scenario document, mirroring the JSON schema. Distances are meters,
// speeds km/h; conversion to SI happens when the world is built.
struct Scenario {
  struct Vertex {
    std::string id;
  };
  struct EdgeDecl {
    std::string id;
    std::string from;
    std::string to;
    double length_m = 0.0;
    bool lane_transition = false;
  };
  struct SharedDecl {
    std::string edge_a;
    double offset_a_m = 0.0;
    std::string edge_b;
    double offset_b_m = 0.0;
  };
  struct LaneAdjacencyDecl {
    std::vector<std::string> from_lane;  // edge chain
    std::vector<std::string> to_lane;
    std::string transition_edge;
  };
  struct MapDecl {
    std::vector<Vertex> vertices;
    std::vector<EdgeDecl> edges;
    std::vector<SharedDecl> shared_positions;
    std::vector<LaneAdjacencyDecl> lane_adjacencies;
    double default_limit_kmh = 50.0;
  };
  struct DynamicsDecl {
    double b_max_mps2 = 3.4;
    double a_max_mps2 = 2.5;
    double dt_s = 0.2;
    double v0_kmh = 5.0;  // minimal speed limit used on roads
  };
  struct VisibilityOverride {
    std::string vehicle;
    std::optional<double> fd_m;
    std::optional<double> ld_m;
  };
  struct VisibilityDecl {
    double fd_m = 120.0;
    double ld_m = 150.0;
    std::vector<VisibilityOverride> overrides;
  };
  struct SignalDecl {
    std::string id;
    std::string kind;  // yield | stop | traffic_light | speed_limit
    std::string edge;
    double offset_m = 0.0;
    double cd_m = 0.0;        // junction-guarding kinds
    double limit_kmh = 0.0;   // speed_limit kind
    int priority = 0;         // stop entries: smaller goes first on ties
  };
  struct LightCycleDecl {
    std::vector<std::string> entries;  // traffic_light signal ids, round-robin order
    double green_s = 10.0;
    double yellow_s = 3.0;
    double all_red_s = 2.0;
    double start_offset_s = 0.0;
  };
  struct VehicleDecl {
    std::string id;
    std::vector<std::string> route;  // edge ids
    double start_offset_m = 0.0;
    double speed_kmh = 0.0;
    double limit_kmh = 50.0;
    bool cyclic = false;
  };

  int format_version = 1;
  std::string name;
  MapDecl map;
  DynamicsDecl dynamics;
  VisibilityDecl visibility;
  std::vector<SignalDecl> signals;
  std::vector<LightCycleDecl> light_cycles;
  std::vector<VehicleDecl> vehicles;
  long horizon_steps = 1000;
  unsigned long seed = 0;
};

std::string to_json(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

// Deterministic scenario generation; the same (seed, profile) pair always
// yields a byte-identical document.
Scenario generate_scenario(const std::string& profile, unsigned long seed);

const std::vector<std::string>& generator_profiles();

}  // namespace ads
