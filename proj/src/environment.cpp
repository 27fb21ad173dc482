#include "ads/environment.hpp"

#include <algorithm>
#include <cmath>

#include "ads/autopilot.hpp"

namespace ads {

AdsState initial_state(const World& w) {
  AdsState s;
  s.t = 0.0;
  for (const auto& spec : w.vehicles()) {
    VehicleState v;
    v.progress = spec.initial_progress;
    v.v = spec.initial_v;
    v.V = spec.initial_V;
    s.vehicles.push_back(v);
  }
  return s;
}

Position vehicle_position(const World& w, const AdsState& s, int vehicle) {
  return w.vehicle(vehicle).route_info.route.position_at(s.vehicles[vehicle].progress);
}

bool lane_change_active(const World& w, const AdsState& s, int vehicle) {
  const auto& vs = s.vehicles[vehicle];
  if (vs.retired) return false;
  if (vs.lane_change_cmd) return true;
  Position p = vehicle_position(w, s, vehicle);
  return !p.is_vertex() && w.map().edge(p.edge()).lane_transition;
}

namespace {

// Speed-limit signs passed while moving (from, to] along the route; cyclic
// routes wrap, so scan shifted copies of the sign list.
std::optional<double> last_limit_passed(const World& w, const RouteInfo& info, double from, double to) {
  std::optional<double> out;
  double total = info.route.total_length();
  for (int lap = 0; lap < 2; ++lap) {
    double shift = lap * total;
    for (const auto& sign : info.signs) {
      double arc = sign.arc + shift;
      if (arc <= from + kPosTol || arc > to + kPosTol) continue;
      const Signal& sg = w.signal(sign.signal);
      if (sg.kind == SignalKind::SpeedLimit) out = sg.limit;
    }
    if (!info.route.cyclic()) break;
  }
  return out;
}

bool near_stop_line(const World& w, const RouteInfo& info, double progress, double tol) {
  double total = info.route.total_length();
  for (int lap = info.route.cyclic() ? -1 : 0; lap < 2; ++lap) {
    double shift = lap * total;
    for (const auto& sign : info.signs) {
      if (w.signal(sign.signal).kind != SignalKind::Stop) continue;
      if (std::abs(sign.arc + shift - progress) <= tol) return true;
    }
    if (!info.route.cyclic()) break;
  }
  return false;
}

}  // namespace

AdsState step(const World& w, const AdsState& s, const std::vector<StepCommand>& cmds) {
  if (cmds.size() != s.vehicles.size()) throw ScenarioError("step: one command per vehicle required");
  const double dt = w.dynamics().dt;
  AdsState ns = s;
  ns.t = s.t + dt;

  for (size_t i = 0; i < s.vehicles.size(); ++i) {
    const auto& cur = s.vehicles[i];
    auto& nxt = ns.vehicles[i];
    if (cur.retired) continue;
    const RouteInfo& info = w.vehicle(static_cast<int>(i)).route_info;
    const StepCommand& cmd = cmds[i];

    double dd = std::max(cmd.dd, 0.0);
    double nv = cur.v + cmd.dv;
    if (nv < -kSpeedTol) throw ScenarioError("step: command drives speed negative");
    nv = std::max(nv, 0.0);

    double total = info.route.total_length();
    double raw_target = cur.progress + dd;
    nxt.odometer = cur.odometer + dd;
    if (!info.route.cyclic() && raw_target > total - kRouteEndTol) {
      nxt.retired = true;
      nxt.progress = total;
      nxt.v = nv;
      continue;
    }
    if (auto limit = last_limit_passed(w, info, cur.progress, raw_target)) nxt.V = *limit;
    nxt.progress = info.route.cyclic() ? std::fmod(raw_target, total) : raw_target;
    nxt.v = nv;
    nxt.lane_change_cmd = cmd.lane_change_signal;

    // stop-time bookkeeping: recorded when fully stopped at a stop line,
    // dropped once the vehicle moves off the line
    bool at_line = near_stop_line(w, info, raw_target, kEntryTol);
    if (at_line && nxt.v <= kSpeedTol) {
      if (!nxt.st) nxt.st = ns.t;
    } else if (!at_line) {
      nxt.st.reset();
    }
  }
  return ns;
}

// ---------------------------------------------------------------------------

namespace {

struct Candidate {
  Position pos;
  int vehicle;
};

int kind_rank(FrontKind k) {
  switch (k) {
    case FrontKind::SpeedLimitSign: return 0;
    case FrontKind::GuardSignal: return 1;
    case FrontKind::Vehicle: return 2;
    case FrontKind::FictitiousVehicle: return 3;
  }
  return 4;
}

}  // namespace

RawVista collect_vista(const World& w, const AdsState& s, int ego) {
  const auto& es = s.vehicles[ego];
  if (es.retired) throw ScenarioError("vista requested for a retired vehicle");
  const RouteInfo& info = w.vehicle(ego).route_info;
  const Route& route = info.route;

  RawVista raw;
  raw.ego = ego;
  raw.t = s.t;
  raw.v_e = es.v;
  raw.V_e = es.V;
  raw.progress = es.progress;
  double remaining = route.cyclic() ? kInf : route.total_length() - es.progress;
  raw.fd = std::min(w.fd_of(ego), remaining);
  double window_end = es.progress + raw.fd;

  // signals within the window
  double total = route.total_length();
  for (int lap = 0; lap < 2; ++lap) {
    double shift = lap * total;
    for (const auto& sign : info.signs) {
      double dist = sign.arc + shift - es.progress;
      const Signal& sg = w.signal(sign.signal);
      if (sg.kind == SignalKind::SpeedLimit) {
        if (dist <= kPosTol || dist > raw.fd + kPosTol) continue;
        raw.front.push_back(FrontItem{FrontKind::SpeedLimitSign, sign.signal, dist, 0.0, sg.limit, false});
      } else {
        if (dist < -kPosTol || dist > raw.fd + kPosTol) continue;
        raw.front.push_back(FrontItem{FrontKind::GuardSignal, sign.signal, std::max(dist, 0.0), 0.0, 0.0, false});
      }
    }
    if (!route.cyclic()) break;
  }

  // vehicles on the route (literal positions plus lane-change projections)
  for (size_t c = 0; c < s.vehicles.size(); ++c) {
    if (static_cast<int>(c) == ego || s.vehicles[c].retired) continue;
    const auto& cs = s.vehicles[c];
    std::vector<Candidate> candidates;
    Position literal = vehicle_position(w, s, static_cast<int>(c));
    candidates.push_back(Candidate{literal, static_cast<int>(c)});
    if (!literal.is_vertex() && w.map().edge(literal.edge()).lane_transition) {
      for (const auto& adj : w.adjacencies()) {
        if (adj.transition_edge != literal.edge()) continue;
        double o = literal.offset();
        candidates.push_back(Candidate{w.chain_position(adj, true, adj.from_arc + o), static_cast<int>(c)});
        candidates.push_back(Candidate{w.chain_position(adj, false, adj.to_arc - adj.trans_len + o),
                                       static_cast<int>(c)});
      }
    }
    double best = kInf;
    for (const auto& cand : candidates) {
      auto arc = route.offset_of(w.map(), cand.pos, es.progress - kPosTol);
      if (!arc) continue;
      double dist = *arc - es.progress;
      if (dist < -kPosTol || dist > raw.fd + kPosTol) continue;
      best = std::min(best, std::max(dist, 0.0));
    }
    if (best < kInf) {
      raw.front.push_back(FrontItem{FrontKind::Vehicle, static_cast<int>(c), best, cs.v, cs.V,
                                    lane_change_active(w, s, static_cast<int>(c))});
    }
  }

  // fictitious vehicle at the visibility limit, moving at the limit there
  double boundary_V = es.V;
  {
    std::vector<std::pair<double, double>> sl;  // dist, limit
    for (const auto& item : raw.front)
      if (item.kind == FrontKind::SpeedLimitSign) sl.emplace_back(item.dist, item.V);
    std::sort(sl.begin(), sl.end());
    for (const auto& [d, v] : sl)
      if (d <= raw.fd) boundary_V = v;
  }
  raw.front.push_back(FrontItem{FrontKind::FictitiousVehicle, -1, raw.fd, boundary_V, boundary_V, false});
  (void)window_end;

  std::stable_sort(raw.front.begin(), raw.front.end(), [](const FrontItem& a, const FrontItem& b) {
    if (std::abs(a.dist - b.dist) > kPosTol) return a.dist < b.dist;
    return kind_rank(a.kind) < kind_rank(b.kind);
  });
  return raw;
}

void populate_junction_meta(const World& w, const AdsState& s, int ego, const JunctionVisit& visit,
                            double window_shift, Vista& vs) {
  const JunctionInfo* ji = w.junction(visit.klass);
  if (!ji) return;
  const MetricGraph& g = w.map();
  double ld = w.ld_of(ego);

  // Arriving vehicles per conflicting entry: the closest real vehicle plus
  // the fictitious one at the lateral visibility boundary.
  for (const auto& cr : visit.conflicts) {
    if (cr.arrive_dist == kInf) continue;
    ArrivingVehicle best;
    best.entry = cr.entry;
    for (size_t c = 0; c < s.vehicles.size(); ++c) {
      if (static_cast<int>(c) == ego || s.vehicles[c].retired) continue;
      const RouteInfo& ci = w.vehicle(static_cast<int>(c)).route_info;
      auto arc = ci.route.offset_of(g, cr.conflict_pos, s.vehicles[c].progress - kPosTol);
      if (!arc) continue;
      double d_a = *arc - s.vehicles[c].progress;
      if (d_a < -kPosTol || d_a > ld + kPosTol) continue;
      // entry attribution: the last entry vertex of this junction passed
      // strictly before the conflict point
      int via = -1;
      double via_arc = -kInf;
      for (size_t j = 0; j < ji->entries.size(); ++j) {
        Position ep = Position::vertex(ji->entries[j].entry_vertex);
        double from = 0.0;
        for (;;) {
          auto occ = ci.route.offset_of(g, ep, from);
          if (!occ || *occ > *arc + kPosTol) break;
          if (*occ > via_arc) {
            via_arc = *occ;
            via = static_cast<int>(j);
          }
          from = *occ + 1e-6;
        }
      }
      if (via == visit.ego_entry) continue;  // same movement as ego
      if (via != cr.entry && via >= 0) continue;  // counted under its own entry
      double d = std::max(d_a, 0.0);
      if (!best.fictitious && best.vehicle >= 0 && best.d_a <= d) continue;
      best.vehicle = static_cast<int>(c);
      best.d_a = d;
      best.v = s.vehicles[c].v;
      best.V = s.vehicles[c].V;
    }
    if (best.vehicle >= 0) vs.arriving.push_back(best);

    ArrivingVehicle boundary;
    boundary.entry = cr.entry;
    boundary.fictitious = true;
    boundary.d_a = std::max(ld, cr.arrive_dist);
    double back = boundary.d_a - cr.arrive_dist;  // behind the entry vertex
    double limit = w.default_limit();
    const auto& entry = ji->entries[cr.entry];
    // last speed-limit sign upstream of the boundary position
    double walked = 0.0;
    double best_sign_back = kInf;
    for (int e : entry.approach_edges) {
      for (size_t si = 0; si < w.signals().size(); ++si) {
        const Signal& sg = w.signal(static_cast<int>(si));
        if (sg.kind != SignalKind::SpeedLimit || sg.pos.is_vertex() || sg.pos.edge() != e) continue;
        double sign_back = walked + (w.map().edge(e).length - sg.pos.offset());
        if (sign_back > back && sign_back < best_sign_back) {
          best_sign_back = sign_back;
          limit = sg.limit;
        }
      }
      walked += w.map().edge(e).length;
    }
    boundary.v = limit;
    boundary.V = limit;
    vs.arriving.push_back(boundary);
  }

  // Entry lights of the other approaches.
  if (ji->cycle >= 0) {
    for (const auto& cr : visit.conflicts) {
      const auto& entry = ji->entries[cr.entry];
      if (entry.signal < 0) continue;
      vs.entry_lights.push_back(
          EntryLight{cr.entry, entry.signal, w.light_state(entry.signal, s.t).ttg});
    }
  }

  // Occupants of the junction area.
  for (size_t c = 0; c < s.vehicles.size(); ++c) {
    if (static_cast<int>(c) == ego || s.vehicles[c].retired) continue;
    Position p = vehicle_position(w, s, static_cast<int>(c));
    if (!g.in_junction(p, visit.klass)) continue;
    bool at_entry = false;
    const RouteInfo& ci = w.vehicle(static_cast<int>(c)).route_info;
    for (const auto& entry : ji->entries) {
      if (entry.signal < 0) continue;
      auto arc = ci.route.offset_of(g, w.signal(entry.signal).pos, s.vehicles[c].progress - kEntryTol);
      if (arc && std::abs(*arc - s.vehicles[c].progress) <= kEntryTol) at_entry = true;
    }
    vs.occupants.push_back(JunctionOccupant{static_cast<int>(c), s.vehicles[c].v, at_entry});
  }

  // Waiters at the stop entries.
  if (ji->all_way_stop) {
    for (size_t j = 0; j < ji->entries.size(); ++j) {
      const auto& entry = ji->entries[j];
      if (entry.signal < 0) continue;
      for (size_t c = 0; c < s.vehicles.size(); ++c) {
        if (static_cast<int>(c) == ego || s.vehicles[c].retired) continue;
        if (s.vehicles[c].v > kSpeedTol) continue;
        const RouteInfo& ci = w.vehicle(static_cast<int>(c)).route_info;
        auto arc = ci.route.offset_of(g, w.signal(entry.signal).pos, s.vehicles[c].progress - kEntryTol);
        if (!arc || std::abs(*arc - s.vehicles[c].progress) > kEntryTol) continue;
        vs.waiters.push_back(EntryWaiter{static_cast<int>(j), static_cast<int>(c), s.vehicles[c].st,
                                         w.signal(entry.signal).priority});
      }
    }
  }
  (void)window_shift;
}

void populate_lane_meta(const World& w, const AdsState& s, int ego, const LaneChangeOnRoute& lc, Vista& vs) {
  const LaneAdjacency& adj = w.adjacencies()[lc.adjacency];
  const MetricGraph& g = w.map();
  Position egop = vehicle_position(w, s, ego);
  auto ego_arc = w.chain_arc(adj, true, egop);
  if (!ego_arc) return;  // already on the transition; lane meta not needed
  double proj = *ego_arc;  // chains are aligned, so the projection shares the arc
  double fd = w.fd_of(ego);
  double ld = w.ld_of(ego);

  vs.d_f2 = fd;
  vs.d_f1 = fd;
  double best_a2 = -kInf;
  double best_a1 = -kInf;
  for (size_t c = 0; c < s.vehicles.size(); ++c) {
    if (static_cast<int>(c) == ego || s.vehicles[c].retired) continue;
    Position p = vehicle_position(w, s, static_cast<int>(c));
    bool flashing = lane_change_active(w, s, static_cast<int>(c));
    std::vector<std::pair<bool, double>> arcs;  // (to_side, arc)
    if (auto a = w.chain_arc(adj, false, p)) arcs.emplace_back(true, *a);
    if (auto a = w.chain_arc(adj, true, p)) arcs.emplace_back(false, *a);
    if (!p.is_vertex() && p.edge() == adj.transition_edge) {
      double o = p.offset();
      arcs.emplace_back(true, adj.to_arc - adj.trans_len + o);
      arcs.emplace_back(false, adj.from_arc + o);
    }
    for (auto [to_side, arc] : arcs) {
      double rel = arc - proj;
      if (to_side) {
        if (rel > kPosTol && rel < vs.d_f2) vs.d_f2 = rel;
        if (rel < -kPosTol && rel >= -ld && arc > best_a2) {
          best_a2 = arc;
          vs.d_a2 = -rel;
          vs.a2_V = s.vehicles[c].V;
        }
      } else {
        if (rel > kPosTol && rel < vs.d_f1) {
          vs.d_f1 = rel;
          if (flashing) vs.neighbor_flashing = true;
        }
        if (rel < -kPosTol && rel >= -ld && arc > best_a1) {
          best_a1 = arc;
          if (flashing) vs.neighbor_flashing = true;
        }
      }
    }
  }

  vs.a2_ld = ld;
  vs.a2_boundary_V = w.default_limit();
  double boundary = proj - ld;
  double best_sign = -kInf;
  for (size_t i = 0; i < adj.to_chain.size(); ++i) {
    for (size_t si = 0; si < w.signals().size(); ++si) {
      const Signal& sg = w.signal(static_cast<int>(si));
      if (sg.kind != SignalKind::SpeedLimit || sg.pos.is_vertex() || sg.pos.edge() != adj.to_chain[i])
        continue;
      double arc = adj.to_cum[i] + sg.pos.offset();
      if (arc < boundary && arc > best_sign) {
        best_sign = arc;
        vs.a2_boundary_V = sg.limit;
      }
    }
  }
  (void)g;
}

Vista build_vista(const World& w, const AdsState& s, int ego) {
  return classify(w, s, collect_vista(w, s, ego));
}

}  // namespace ads
