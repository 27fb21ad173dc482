#include "ads/autopilot.hpp"

#include <algorithm>
#include <cmath>

namespace ads {

namespace {

bool is_vehicle(const FrontItem& it) {
  return it.kind == FrontKind::Vehicle || it.kind == FrontKind::FictitiousVehicle;
}

// The junction visit guarded by this signal, aligned to the window shift of
// the guard's distance in the vista.
const JunctionVisit* visit_of_guard(const World& w, int ego, int signal, double progress, double guard_dist) {
  const RouteInfo& info = w.vehicle(ego).route_info;
  double total = info.route.total_length();
  for (const auto& visit : info.visits) {
    if (visit.signal != signal || visit.signal_arc == kInf) continue;
    for (int lap = 0; lap < 2; ++lap) {
      double dist = visit.signal_arc + lap * total - progress;
      if (std::abs(dist - guard_dist) <= 1e-6) return &visit;
      if (!info.route.cyclic()) break;
    }
  }
  return nullptr;
}

}  // namespace

Vista classify(const World& w, const AdsState& s, const RawVista& raw) {
  Vista vs;
  vs.ego = raw.ego;
  vs.t = raw.t;
  vs.v_e = raw.v_e;
  vs.V_e = raw.V_e;
  vs.fd = raw.fd;
  vs.progress = raw.progress;

  // closest front vehicle bounds the relevant window
  double vehicle_dist = raw.fd;
  for (const auto& item : raw.front) {
    if (item.kind == FrontKind::Vehicle) {
      vehicle_dist = item.dist;
      break;
    }
  }

  // critical candidates strictly before the closest vehicle
  struct Critical {
    double dist;
    int guard;         // signal index, or -1 for a lane transition
    const LaneChangeOnRoute* lc = nullptr;
  };
  std::vector<Critical> criticals;
  for (const auto& item : raw.front) {
    if (item.kind != FrontKind::GuardSignal) continue;
    if (item.dist >= vehicle_dist - kPosTol) continue;
    if (visit_of_guard(w, raw.ego, item.id, raw.progress, item.dist) == nullptr) continue;
    criticals.push_back(Critical{item.dist, item.id, nullptr});
  }
  const RouteInfo& info = w.vehicle(raw.ego).route_info;
  double total = info.route.total_length();
  for (const auto& lc : info.lane_changes) {
    for (int lap = 0; lap < 2; ++lap) {
      double dist = lc.start_arc + lap * total - raw.progress;
      if (dist >= -kPosTol && dist <= raw.fd + kPosTol && dist < vehicle_dist - kPosTol)
        criticals.push_back(Critical{std::max(dist, 0.0), -1, &lc});
      if (!info.route.cyclic()) break;
    }
  }
  std::sort(criticals.begin(), criticals.end(),
            [](const Critical& a, const Critical& b) { return a.dist < b.dist; });
  if (criticals.size() > 1)
    throw ScenarioError("two critical positions within one frontal visibility window (A1)");

  // simplification: drop everything beyond the closest front vehicle
  for (const auto& item : raw.front) {
    if (item.dist > vehicle_dist + kPosTol) break;
    if (item.kind == FrontKind::GuardSignal &&
        (criticals.empty() || criticals.front().guard != item.id))
      continue;  // irrelevant or passed guard
    vs.front.push_back(item);
    if (is_vehicle(item)) break;
  }

  if (criticals.empty()) {
    vs.type = VistaType::Road;
    return vs;
  }

  const Critical& crit = criticals.front();
  if (crit.lc != nullptr) {
    vs.type = VistaType::LaneChange;
    vs.guard_signal = -2;
    vs.d_h = crit.dist;
    vs.cd = crit.lc->end_arc - crit.lc->start_arc;
    vs.lc_end_dist = vs.d_h + vs.cd;
    populate_lane_meta(w, s, raw.ego, *crit.lc, vs);
    return vs;
  }

  const Signal& guard = w.signal(crit.guard);
  const JunctionVisit* visit = visit_of_guard(w, raw.ego, crit.guard, raw.progress, crit.dist);
  vs.guard_signal = crit.guard;
  vs.d_h = crit.dist;
  vs.cd = guard.cd;
  vs.junction = visit->klass;

  switch (guard.kind) {
    case SignalKind::TrafficLight: {
      vs.type = VistaType::CrossTrafficLight;
      vs.light = w.light_state(crit.guard, s.t);
      const auto& cycle = w.cycles()[guard.cycle];
      vs.yellow = cycle.yellow;
      vs.all_red = cycle.all_red;
      break;
    }
    case SignalKind::Stop: {
      vs.type = VistaType::CrossStop;
      vs.st_e = s.vehicles[raw.ego].st;
      vs.ego_entry = visit->ego_entry;
      vs.ego_priority = guard.priority;
      break;
    }
    case SignalKind::Yield: {
      // merge when every conflicting movement meets the route at the exit of
      // the junction; otherwise the routes properly cross
      int exit_point = -1;
      for (const auto& cut : info.route.cut_points())
        if (std::abs(cut.arc - visit->exit_arc) <= kPosTol) exit_point = cut.point;
      bool merge = true;
      for (const auto& cr : visit->conflicts)
        if (cr.arrive_dist < kInf && cr.conflict_point != exit_point) merge = false;
      vs.type = merge ? VistaType::MergeYield : VistaType::CrossYield;
      break;
    }
    default:
      throw ScenarioError("speed limit sign classified as guard");
  }
  populate_junction_meta(w, s, raw.ego, *visit, 0.0, vs);
  return vs;
}

SpeedLimitConstraints speed_limits(const Vista& vs, double target) {
  std::vector<SpeedLimit> entries{{0.0, vs.V_e}};
  for (const auto& item : vs.front) {
    if (item.kind != FrontKind::SpeedLimitSign) continue;
    if (item.dist <= kPosTol || item.dist >= target - kPosTol) continue;
    if (!entries.empty() && std::abs(entries.back().d - item.dist) <= kPosTol)
      entries.back().V = item.V;
    else
      entries.push_back(SpeedLimit{item.dist, item.V});
  }
  entries.push_back(SpeedLimit{std::max(target, 0.0), 0.0});
  if (entries.size() >= 2 && entries[entries.size() - 2].d >= entries.back().d - kPosTol)
    entries.erase(entries.end() - 2);
  return SpeedLimitConstraints(std::move(entries));
}

Command follow(const World& w, const Vista& vs, double target) {
  if (target < -kPosTol) throw PolicyPreconditionError("follow: target behind the vehicle");
  auto vl = speed_limits(vs, std::max(target, 0.0));
  if (!controllable(w.dynamics(), vs.v_e, vl))
    throw PolicyPreconditionError("follow: controllability precondition violated");
  auto out = speed_control(w.dynamics(), vs.v_e, vl);
  return Command{out.dv, out.dd, false};
}

double travel_time(const World& w, const Vista& vs, double x, double target) {
  if (x <= kPosTol) return 0.0;
  if (x > target + kPosTol) return kInf;  // target position is not reachable while following
  const DynamicsParams& p = w.dynamics();
  auto vl = speed_limits(vs, target);
  if (!controllable(p, vs.v_e, vl)) return kInf;
  double v = vs.v_e;
  double t = 0.0;
  long cap = static_cast<long>(std::ceil(10.0 * target / (w.v0() * p.dt)));
  for (long i = 0; i < cap; ++i) {
    auto [dv, dd] = speed_control(p, v, vl);
    v += dv;
    x -= dd;
    t += p.dt;
    if (x <= kDynEps) return t;
    vl = vl.shifted(dd);
    if (!controllable(p, v, vl)) return kInf;
  }
  return kInf;
}

namespace {

bool junction_clear_of_moving(const Vista& vs) {
  for (const auto& occ : vs.occupants)
    if (!(occ.at_entry && occ.v <= kSpeedTol)) return false;
  return true;
}

// clearance for merge/cross with yield: every arriving vehicle (and the
// fictitious one at the visibility boundary) can still brake before the
// conflict point while ego crosses
bool yield_clearance(const World& w, const Vista& vs, double d_f) {
  double tt = travel_time(w, vs, vs.d_h + vs.cd, d_f);
  if (tt == kInf) return false;
  for (const auto& a : vs.arriving) {
    if (a.V * tt + braking_distance(w.dynamics(), a.V) > a.d_a + kDynEps) return false;
  }
  return true;
}

bool light_clearance(const World& w, const Vista& vs, double d_f) {
  if (vs.light.color != LightColor::Green) return false;
  if (!junction_clear_of_moving(vs)) return false;
  double tt_entry = travel_time(w, vs, vs.d_h, d_f);
  if (tt_entry > vs.yellow + kDynEps) return false;
  double tt_exit = travel_time(w, vs, vs.d_h + vs.cd, d_f);
  return tt_exit <= vs.yellow + vs.all_red + kDynEps;
}

// all-way stop: the junction is clear and ego is the earliest arrived among
// the waiting vehicles (ties broken by declared entry priority)
bool stop_clearance(const Vista& vs) {
  if (!vs.st_e) return false;
  if (!junction_clear_of_moving(vs)) return false;
  for (const auto& wtr : vs.waiters) {
    if (wtr.entry == vs.ego_entry) continue;
    if (!wtr.st) continue;  // stopped later than ego by construction
    if (*wtr.st < *vs.st_e) return false;
    if (*wtr.st == *vs.st_e && wtr.priority < vs.ego_priority) return false;
  }
  return true;
}

bool lane_clearance(const World& w, const Vista& vs) {
  const DynamicsParams& p = w.dynamics();
  if (vs.neighbor_flashing) return false;
  if (braking_distance(p, vs.a2_boundary_V) > vs.a2_ld + kDynEps) return false;
  if (vs.d_a2 && braking_distance(p, vs.a2_V) > *vs.d_a2 + kDynEps) return false;
  return braking_distance(p, vs.v_e) <= vs.d_f2 + kDynEps;
}

}  // namespace

std::pair<Command, PolicyState> policy_step(const World& w, const PolicyState& ps, const Vista& vs) {
  if (ps.mode != vs.type)
    throw PolicyPreconditionError("policy_step: mode does not match the vista type");
  PolicyState ns = ps;
  ns.st = vs.st_e;
  double d_f = vs.d_f();

  switch (vs.type) {
    case VistaType::Road:
      return {follow(w, vs, d_f), ns};

    case VistaType::MergeYield:
    case VistaType::CrossYield: {
      if (!ps.cl) {
        Command cmd = follow(w, vs, std::min(vs.d_h, d_f));
        ns.cl = yield_clearance(w, vs, d_f);
        return {cmd, ns};
      }
      return {follow(w, vs, d_f), ns};
    }

    case VistaType::CrossTrafficLight: {
      if (!ps.cl) {
        Command cmd = follow(w, vs, std::min(vs.d_h, d_f));
        ns.cl = light_clearance(w, vs, d_f);
        return {cmd, ns};
      }
      return {follow(w, vs, d_f), ns};
    }

    case VistaType::CrossStop: {
      if (ps.cl) return {follow(w, vs, d_f), ns};
      if (vs.d_h > kEntryTol) {
        // approach phase: be able to stop at the sign
        return {follow(w, vs, std::min(vs.d_h, d_f)), ns};
      }
      // wait phase: come to an exact stop at the line, then watch the junction
      Command cmd;
      cmd.dv = -vs.v_e;
      cmd.dd = vs.v_e * w.dynamics().dt / 2.0;
      ns.cl = stop_clearance(vs);
      return {cmd, ns};
    }

    case VistaType::LaneChange: {
      if (!ps.cl) {
        Command cmd = follow(w, vs, std::min(vs.d_h, d_f));
        ns.cl = lane_clearance(w, vs);
        return {cmd, ns};
      }
      Command cmd = follow(w, vs, d_f);
      cmd.lane_change_signal = true;
      return {cmd, ns};
    }
  }
  throw PolicyPreconditionError("policy_step: unknown vista type");
}

PolicyState mode_transition(const PolicyState& ps, const Vista& vs) {
  int guard = vs.type == VistaType::Road ? -1 : vs.guard_signal;
  if (vs.type == ps.mode && guard == ps.h) {
    PolicyState ns = ps;
    ns.st = vs.st_e;
    return ns;
  }
  if (vs.type != ps.mode && ps.mode != VistaType::Road && vs.type != VistaType::Road)
    throw ScenarioError("mode automaton violation: transition between two non-road policies (A1)");
  PolicyState ns;
  ns.mode = vs.type;
  ns.cl = false;
  ns.h = guard;
  ns.st = vs.st_e;
  return ns;
}

}  // namespace ads
