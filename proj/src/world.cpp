#include "ads/world.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace ads {

const char* to_string(VistaType t) {
  switch (t) {
    case VistaType::Road: return "road";
    case VistaType::MergeYield: return "merge-yield";
    case VistaType::LaneChange: return "lane-change";
    case VistaType::CrossYield: return "cross-yield";
    case VistaType::CrossTrafficLight: return "cross-traffic-light";
    case VistaType::CrossStop: return "cross-stop";
  }
  return "?";
}

const char* to_string(LightColor c) {
  switch (c) {
    case LightColor::Red: return "red";
    case LightColor::Yellow: return "yellow";
    case LightColor::Green: return "green";
  }
  return "?";
}

const char* to_string(SignalKind k) {
  switch (k) {
    case SignalKind::Yield: return "yield";
    case SignalKind::Stop: return "stop";
    case SignalKind::TrafficLight: return "traffic_light";
    case SignalKind::SpeedLimit: return "speed_limit";
  }
  return "?";
}

namespace {

SignalKind parse_kind(const std::string& s) {
  if (s == "yield") return SignalKind::Yield;
  if (s == "stop") return SignalKind::Stop;
  if (s == "traffic_light") return SignalKind::TrafficLight;
  if (s == "speed_limit") return SignalKind::SpeedLimit;
  throw ScenarioError("unknown signal kind: " + s);
}

bool guards_junction(SignalKind k) {
  return k == SignalKind::Yield || k == SignalKind::Stop || k == SignalKind::TrafficLight;
}

}  // namespace

World::World(const Scenario& sc) : scenario_(sc) {
  dynamics_ = DynamicsParams{sc.dynamics.b_max_mps2, sc.dynamics.a_max_mps2, sc.dynamics.dt_s};
  dynamics_.validate();
  v0_ = kmh_to_mps(sc.dynamics.v0_kmh);
  if (!(v0_ > 0.0)) throw ScenarioError("v0 must be > 0");
  default_limit_ = kmh_to_mps(sc.map.default_limit_kmh);

  build_map(sc);
  build_signals(sc);
  build_junction_info();
  build_adjacencies(sc);
  build_vehicles(sc);
  fd_override_.assign(vehicles_.size(), 0.0);
}

void World::build_map(const Scenario& sc) {
  std::set<std::string> transitions;
  for (const auto& adj : sc.map.lane_adjacencies) transitions.insert(adj.transition_edge);

  for (const auto& v : sc.map.vertices) map_.add_vertex(v.id);
  for (const auto& e : sc.map.edges) {
    auto from = map_.find_vertex(e.from);
    auto to = map_.find_vertex(e.to);
    if (!from || !to) throw ScenarioError("edge " + e.id + " references unknown vertex");
    map_.add_edge(e.id, *from, *to, e.length_m, e.lane_transition || transitions.count(e.id) > 0);
  }
  for (const auto& s : sc.map.shared_positions) {
    auto a = map_.find_edge(s.edge_a);
    auto b = map_.find_edge(s.edge_b);
    if (!a || !b) throw ScenarioError("shared position references unknown edge");
    map_.add_shared_position(*a, s.offset_a_m, *b, s.offset_b_m);
  }
  map_.finalize();
}

void World::build_signals(const Scenario& sc) {
  std::set<std::string> ids;
  for (const auto& d : sc.signals) {
    if (!ids.insert(d.id).second) throw ScenarioError("duplicate signal id: " + d.id);
    Signal s;
    s.id = d.id;
    s.kind = parse_kind(d.kind);
    auto e = map_.find_edge(d.edge);
    if (!e) throw ScenarioError("signal " + d.id + " references unknown edge " + d.edge);
    s.pos = map_.normalize(Position::on_edge(*e, d.offset_m));
    s.priority = d.priority;
    if (s.kind == SignalKind::SpeedLimit) {
      s.limit = kmh_to_mps(d.limit_kmh);
      if (!(s.limit > 0.0)) throw ScenarioError("signal " + d.id + ": speed limit must be > 0");
    } else {
      s.cd = d.cd_m;
      if (!(s.cd > 0.0)) throw ScenarioError("signal " + d.id + ": critical distance must be > 0");
      // Resolve the guarded junction: walk forward from the signal along the
      // unique road continuation until a junction edge starts.
      Position p = s.pos;
      int vertex;
      double dist;
      if (p.is_vertex()) {
        vertex = p.vertex_id();
        dist = 0.0;
      } else {
        vertex = map_.edge(p.edge()).to;
        dist = map_.edge(p.edge()).length - p.offset();
        int k = map_.junction_class(p.edge());
        if (map_.is_junction(k)) throw ScenarioError("signal " + d.id + " placed inside a junction");
      }
      for (;;) {
        std::vector<int> junction_out, road_out;
        for (int e2 = 0; e2 < map_.edge_count(); ++e2) {
          if (map_.edge(e2).from != vertex) continue;
          int k = map_.junction_class(e2);
          if (map_.is_junction(k) && !map_.is_cooperative(k))
            junction_out.push_back(e2);
          else
            road_out.push_back(e2);
        }
        if (!junction_out.empty()) {
          s.junction = map_.junction_class(junction_out.front());
          for (int e2 : junction_out)
            if (map_.junction_class(e2) != s.junction)
              throw ScenarioError("signal " + d.id + ": ambiguous guarded junction");
          break;
        }
        if (road_out.size() != 1 || dist > s.cd)
          throw ScenarioError("signal " + d.id + " does not guard a junction within its critical distance");
        dist += map_.edge(road_out.front()).length;
        vertex = map_.edge(road_out.front()).to;
      }
    }
    signals_.push_back(std::move(s));
  }

  // Light cycles
  for (const auto& c : sc.light_cycles) {
    LightCycleDef def;
    def.green = c.green_s;
    def.yellow = c.yellow_s;
    def.all_red = c.all_red_s;
    def.start_offset = c.start_offset_s;
    if (!(def.green > 0.0) || !(def.yellow > 0.0) || !(def.all_red > 0.0))
      throw ScenarioError("light cycle durations must be > 0");
    for (const auto& id : c.entries) {
      auto it = std::find_if(signals_.begin(), signals_.end(), [&](const Signal& s) { return s.id == id; });
      if (it == signals_.end()) throw ScenarioError("light cycle references unknown signal " + id);
      if (it->kind != SignalKind::TrafficLight)
        throw ScenarioError("light cycle entry " + id + " is not a traffic light");
      int idx = static_cast<int>(it - signals_.begin());
      if (it->cycle >= 0) throw ScenarioError("signal " + id + " appears in two light cycles");
      it->cycle = static_cast<int>(cycles_.size());
      it->cycle_slot = static_cast<int>(def.signals.size());
      def.signals.push_back(idx);
    }
    if (def.signals.empty()) throw ScenarioError("light cycle must have at least one entry");
    cycles_.push_back(std::move(def));
  }
  for (const auto& s : signals_)
    if (s.kind == SignalKind::TrafficLight && s.cycle < 0)
      throw ScenarioError("traffic light " + s.id + " belongs to no cycle");
}

void World::build_junction_info() {
  junctions_.assign(map_.junction_class_count(), JunctionInfo{});
  for (int k = 0; k < map_.junction_class_count(); ++k) {
    if (!map_.is_junction(k) || map_.is_cooperative(k)) continue;
    JunctionInfo info;
    info.klass = k;

    std::set<int> entry_vertices;
    for (int e : map_.class_edges(k)) {
      int u = map_.edge(e).from;
      bool has_outside_in = false;
      for (int e2 = 0; e2 < map_.edge_count(); ++e2)
        if (map_.edge(e2).to == u && map_.junction_class(e2) != k) has_outside_in = true;
      if (has_outside_in) entry_vertices.insert(u);
    }

    for (int u : entry_vertices) {
      JunctionEntry entry;
      entry.entry_vertex = u;
      entry.entry_point = map_.vertex_point(u);
      // unique road approach walking backward
      int cur = u;
      std::set<int> seen{u};
      for (;;) {
        std::vector<int> in;
        for (int e2 = 0; e2 < map_.edge_count(); ++e2)
          if (map_.edge(e2).to == cur && map_.junction_class(e2) != k) in.push_back(e2);
        if (cur == u && in.size() > 1)
          throw ScenarioError("junction entry at vertex " + map_.vertex_id(u) + " has multiple approaches");
        if (in.size() != 1) break;
        int e2 = in.front();
        int kk = map_.junction_class(e2);
        if (map_.is_junction(kk)) break;  // previous junction starts here
        entry.approach_edges.push_back(e2);
        entry.approach_length += map_.edge(e2).length;
        cur = map_.edge(e2).from;
        if (!seen.insert(cur).second) break;  // ring closed
        bool branches = false;
        int count_in = 0;
        for (int e3 = 0; e3 < map_.edge_count(); ++e3)
          if (map_.edge(e3).to == cur) ++count_in;
        if (count_in != 1) branches = true;
        if (branches) break;
      }
      info.entries.push_back(std::move(entry));
    }

    // attach guarding signals to entries
    for (size_t si = 0; si < signals_.size(); ++si) {
      Signal& s = signals_[si];
      if (!guards_junction(s.kind) || s.junction != k) continue;
      // the signal sits on one of the approaches (or at the entry vertex)
      int found = -1;
      for (size_t j = 0; j < info.entries.size(); ++j) {
        const auto& entry = info.entries[j];
        Position p = s.pos;
        if (p.is_vertex() && p.vertex_id() == entry.entry_vertex) found = static_cast<int>(j);
        if (!p.is_vertex())
          for (int e2 : entry.approach_edges)
            if (p.edge() == e2) found = static_cast<int>(j);
        if (found >= 0) break;
      }
      if (found < 0) throw ScenarioError("signal " + s.id + " is not on an approach of its junction");
      auto& entry = info.entries[found];
      if (entry.signal >= 0)
        throw ScenarioError("junction entry at vertex " + map_.vertex_id(entry.entry_vertex) +
                            " has two guarding signals");
      entry.signal = static_cast<int>(si);
      s.entry = found;
    }

    // protocol consistency
    int stops = 0, lights = 0, yields = 0, guarded = 0, approaches = 0;
    for (const auto& entry : info.entries) {
      if (!entry.approach_edges.empty()) ++approaches;
      if (entry.signal < 0) continue;
      ++guarded;
      switch (signals_[entry.signal].kind) {
        case SignalKind::Stop: ++stops; break;
        case SignalKind::TrafficLight: ++lights; break;
        case SignalKind::Yield: ++yields; break;
        default: break;
      }
    }
    if (stops > 0 && (lights > 0 || yields > 0))
      throw ScenarioError("junction mixes stop signs with other protocols");
    if (lights > 0 && yields > 0) throw ScenarioError("junction mixes traffic lights with yield signs");
    if (stops > 0) {
      if (stops < approaches) throw ScenarioError("all-way stop junction has an unguarded approach");
      info.all_way_stop = true;
      std::set<int> prios;
      for (const auto& entry : info.entries)
        if (entry.signal >= 0 && !prios.insert(signals_[entry.signal].priority).second)
          throw ScenarioError("stop entries must declare distinct priorities");
    }
    if (lights > 0) {
      if (lights < approaches) throw ScenarioError("traffic-light junction has an unguarded approach");
      info.cycle = signals_[info.entries[0].signal >= 0 ? info.entries[0].signal : 0].cycle;
      for (const auto& entry : info.entries)
        if (entry.signal >= 0) {
          if (signals_[entry.signal].cycle != info.cycle)
            throw ScenarioError("traffic lights of one junction must share a cycle");
          info.cycle = signals_[entry.signal].cycle;
        }
    }
    junctions_[k] = std::move(info);
  }
}

void World::build_adjacencies(const Scenario& sc) {
  for (const auto& d : sc.map.lane_adjacencies) {
    LaneAdjacency adj;
    auto resolve_chain = [&](const std::vector<std::string>& ids, std::vector<int>& chain,
                             std::vector<double>& cum) {
      double arc = 0.0;
      for (const auto& id : ids) {
        auto e = map_.find_edge(id);
        if (!e) throw ScenarioError("lane adjacency references unknown edge " + id);
        if (!chain.empty() && map_.edge(chain.back()).to != map_.edge(*e).from)
          throw ScenarioError("lane chain is not contiguous at edge " + id);
        chain.push_back(*e);
        cum.push_back(arc);
        arc += map_.edge(*e).length;
      }
    };
    resolve_chain(d.from_lane, adj.from_chain, adj.from_cum);
    resolve_chain(d.to_lane, adj.to_chain, adj.to_cum);
    auto t = map_.find_edge(d.transition_edge);
    if (!t) throw ScenarioError("unknown transition edge " + d.transition_edge);
    adj.transition_edge = *t;
    adj.trans_len = map_.edge(*t).length;

    int va = map_.edge(*t).from, vb = map_.edge(*t).to;
    bool found_from = false, found_to = false;
    for (size_t i = 0; i < adj.from_chain.size(); ++i)
      if (map_.edge(adj.from_chain[i]).to == va) {
        adj.from_arc = adj.from_cum[i] + map_.edge(adj.from_chain[i]).length;
        found_from = true;
      }
    for (size_t i = 0; i < adj.to_chain.size(); ++i)
      if (map_.edge(adj.to_chain[i]).to == vb) {
        adj.to_arc = adj.to_cum[i] + map_.edge(adj.to_chain[i]).length;
        found_to = true;
      }
    if (!found_from || !found_to)
      throw ScenarioError("transition edge endpoints must be interior vertices of the lane chains");
    if (std::abs((adj.to_arc - adj.trans_len) - adj.from_arc) > 1e-6)
      throw ScenarioError("lane chains are not aligned with the transition edge");
    adjacencies_.push_back(std::move(adj));
  }
}

void World::build_vehicles(const Scenario& sc) {
  std::set<std::string> ids;
  for (const auto& d : sc.vehicles) {
    if (!ids.insert(d.id).second) throw ScenarioError("duplicate vehicle id: " + d.id);
    VehicleSpec spec;
    spec.id = d.id;
    std::vector<int> edges;
    for (const auto& eid : d.route) {
      auto e = map_.find_edge(eid);
      if (!e) throw ScenarioError("vehicle " + d.id + " route references unknown edge " + eid);
      edges.push_back(*e);
    }
    RouteInfo info;
    info.route = Route::from_edges(map_, edges, d.start_offset_m, d.cyclic);
    spec.fd = sc.visibility.fd_m;
    spec.ld = sc.visibility.ld_m;
    for (const auto& o : sc.visibility.overrides) {
      if (o.vehicle != d.id) continue;
      if (o.fd_m) spec.fd = *o.fd_m;
      if (o.ld_m) spec.ld = *o.ld_m;
    }
    if (!(spec.fd > 0.0) || !(spec.ld > 0.0)) throw ScenarioError("visibility must be > 0");
    if (d.cyclic && spec.fd >= info.route.total_length())
      throw ScenarioError("vehicle " + d.id + ": frontal visibility exceeds cyclic route length");

    // signals on the route
    for (size_t si = 0; si < signals_.size(); ++si) {
      double from = 0.0;
      for (;;) {
        auto arc = info.route.offset_of(map_, signals_[si].pos, from);
        if (!arc || *arc > info.route.total_length() + kPosTol) break;
        info.signs.push_back(SignOnRoute{*arc, static_cast<int>(si)});
        from = *arc + 1e-6;
        if (d.cyclic && from >= info.route.total_length()) break;
      }
    }
    std::sort(info.signs.begin(), info.signs.end(),
              [](const SignOnRoute& a, const SignOnRoute& b) { return a.arc < b.arc; });

    // junction visits
    double arc = 0.0;
    for (const auto& el : info.route.elements()) {
      double span = el.exit - el.entry;
      int k = map_.junction_class(el.edge);
      if (map_.is_junction(k) && !map_.is_cooperative(k)) {
        if (!info.visits.empty() && info.visits.back().klass == k &&
            std::abs(info.visits.back().exit_arc - arc) <= kPosTol) {
          info.visits.back().exit_arc = arc + span;
        } else {
          JunctionVisit v;
          v.klass = k;
          v.enter_arc = arc;
          v.exit_arc = arc + span;
          info.visits.push_back(v);
        }
      }
      arc += span;
    }
    for (auto& visit : info.visits) {
      const JunctionInfo& ji = junctions_[visit.klass];
      // ego entry: the canonical point where the visit starts
      int enter_point = -1;
      for (const auto& cut : info.route.cut_points())
        if (std::abs(cut.arc - visit.enter_arc) <= kPosTol) enter_point = cut.point;
      for (size_t j = 0; j < ji.entries.size(); ++j)
        if (ji.entries[j].entry_point == enter_point) visit.ego_entry = static_cast<int>(j);
      if (visit.ego_entry >= 0) {
        visit.signal = ji.entries[visit.ego_entry].signal;
        if (visit.signal >= 0) {
          // last occurrence of the signal position at or before the entry
          double best = -1.0;
          double from = 0.0;
          for (;;) {
            auto a = info.route.offset_of(map_, signals_[visit.signal].pos, from);
            if (!a || *a > visit.enter_arc + kPosTol) break;
            best = *a;
            from = *a + 1e-6;
          }
          if (best >= 0.0) visit.signal_arc = best;
        }
      }

      // conflicts with the other entries
      for (size_t j = 0; j < ji.entries.size(); ++j) {
        if (static_cast<int>(j) == visit.ego_entry) continue;
        ConflictRoad cr;
        cr.entry = static_cast<int>(j);
        // distances from the entry vertex over the junction edges
        std::map<int, double> reach;  // canonical point -> distance
        std::set<int> visited;
        struct Item {
          int vertex;
          double dist;
        };
        std::vector<Item> stack{{ji.entries[j].entry_vertex, 0.0}};
        while (!stack.empty()) {
          auto [u, dist] = stack.back();
          stack.pop_back();
          for (int e2 = 0; e2 < map_.edge_count(); ++e2) {
            if (map_.edge(e2).from != u || map_.junction_class(e2) != visit.klass) continue;
            if (!visited.insert(e2).second) continue;
            for (const auto& cut : map_.cuts(e2)) {
              double dcut = dist + cut.offset;
              auto it = reach.find(cut.point);
              if (it == reach.end() || dcut < it->second) reach[cut.point] = dcut;
            }
            stack.push_back(Item{map_.edge(e2).to, dist + map_.edge(e2).length});
          }
        }
        for (const auto& cut : info.route.cut_points()) {
          if (cut.arc < visit.enter_arc - kPosTol || cut.arc > visit.exit_arc + kPosTol) continue;
          auto it = reach.find(cut.point);
          if (it == reach.end()) continue;
          if (it->second < cr.arrive_dist) {
            cr.arrive_dist = it->second;
            cr.conflict_arc = cut.arc;
            cr.conflict_point = cut.point;
            cr.conflict_pos = info.route.position_at(cut.arc);
          }
        }
        visit.conflicts.push_back(cr);
      }
    }

    // lane changes
    arc = 0.0;
    for (const auto& el : info.route.elements()) {
      double span = el.exit - el.entry;
      if (map_.edge(el.edge).lane_transition) {
        int found = -1;
        for (size_t ai = 0; ai < adjacencies_.size(); ++ai)
          if (adjacencies_[ai].transition_edge == el.edge) found = static_cast<int>(ai);
        if (found < 0)
          throw ScenarioError("vehicle " + d.id + " route uses an undeclared lane transition");
        LaneChangeOnRoute lc;
        lc.adjacency = found;
        lc.start_arc = arc - el.entry;  // transition entry, even if the route starts mid-edge
        lc.end_arc = lc.start_arc + map_.edge(el.edge).length;
        info.lane_changes.push_back(lc);
      }
      arc += span;
    }

    spec.route_info = std::move(info);
    spec.initial_progress = 0.0;
    spec.initial_v = kmh_to_mps(d.speed_kmh);
    spec.initial_V = kmh_to_mps(d.limit_kmh);
    if (spec.initial_v < 0 || !(spec.initial_V > 0)) throw ScenarioError("vehicle " + d.id + ": bad speeds");
    vehicles_.push_back(std::move(spec));
  }
}

std::optional<int> World::find_vehicle(const std::string& id) const {
  for (size_t i = 0; i < vehicles_.size(); ++i)
    if (vehicles_[i].id == id) return static_cast<int>(i);
  return std::nullopt;
}

const JunctionInfo* World::junction(int klass) const {
  if (klass < 0 || klass >= static_cast<int>(junctions_.size())) return nullptr;
  if (junctions_[klass].klass < 0) return nullptr;
  return &junctions_[klass];
}

LightState World::light_state(int signal, double t) const {
  const Signal& s = signals_[signal];
  const LightCycleDef& c = cycles_[s.cycle];
  double period = c.period();
  double block = c.green + c.yellow + c.all_red;
  double tau = std::fmod(t - c.start_offset, period);
  if (tau < 0) tau += period;
  double g0 = s.cycle_slot * block;  // green start of this slot

  LightState out;
  if (tau >= g0 && tau < g0 + c.green) {
    out.color = LightColor::Green;
    out.ttg = 0.0;
    out.ttr = (g0 + c.green - tau) + c.yellow;
  } else if (tau >= g0 + c.green && tau < g0 + c.green + c.yellow) {
    out.color = LightColor::Yellow;
    out.ttr = g0 + c.green + c.yellow - tau;
    out.ttg = std::fmod(g0 - tau + period, period);
  } else {
    out.color = LightColor::Red;
    out.ttr = 0.0;
    double d = std::fmod(g0 - tau, period);
    if (d <= 0) d += period;
    out.ttg = d;
  }
  return out;
}

std::optional<double> World::chain_arc(const LaneAdjacency& adj, bool from_side, Position p) const {
  const auto& chain = from_side ? adj.from_chain : adj.to_chain;
  const auto& cum = from_side ? adj.from_cum : adj.to_cum;
  Position q = map_.normalize(p);
  for (size_t i = 0; i < chain.size(); ++i) {
    const Edge& e = map_.edge(chain[i]);
    if (!q.is_vertex() && q.edge() == chain[i]) return cum[i] + q.offset();
    if (q.is_vertex() && q.vertex_id() == e.from) return cum[i];
    if (q.is_vertex() && q.vertex_id() == e.to) return cum[i] + e.length;
  }
  return std::nullopt;
}

Position World::chain_position(const LaneAdjacency& adj, bool from_side, double arc) const {
  const auto& chain = from_side ? adj.from_chain : adj.to_chain;
  const auto& cum = from_side ? adj.from_cum : adj.to_cum;
  for (size_t i = 0; i < chain.size(); ++i) {
    double len = map_.edge(chain[i]).length;
    if (arc <= cum[i] + len + kPosTol) return Position::on_edge(chain[i], std::clamp(arc - cum[i], 0.0, len));
  }
  throw MapError("chain position out of range");
}

}  // namespace ads
