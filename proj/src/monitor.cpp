#include "ads/monitor.hpp"

#include <algorithm>
#include <cmath>

namespace ads {

LeadObstacle lead_obstacle(const Vista& vs, const PolicyState& ps) {
  LeadObstacle fo;
  if (vs.type != VistaType::Road && !ps.cl) {
    fo.is_signal = true;
    fo.id = vs.guard_signal;
    fo.dist = vs.d_h;
    return fo;
  }
  for (const auto& item : vs.front) {
    if (item.kind == FrontKind::Vehicle || item.kind == FrontKind::FictitiousVehicle) {
      fo.is_signal = false;
      fo.id = item.kind == FrontKind::Vehicle ? item.id : -1;
      fo.dist = item.dist;
      return fo;
    }
  }
  fo.dist = vs.fd;  // defensive: the fictitious boundary vehicle
  return fo;
}

double limit_position(const World& w, const Vista& vs, double fo_dist) {
  double limit = std::min(fo_dist, braking_distance(w.dynamics(), vs.V_e));
  for (const auto& item : vs.front) {
    if (item.kind != FrontKind::SpeedLimitSign) continue;
    if (item.dist >= fo_dist - kPosTol) continue;
    limit = std::min(limit, item.dist + braking_distance(w.dynamics(), item.V));
  }
  return limit;
}

namespace {

bool occupants_stationary_at_entries(const Vista& vs) {
  for (const auto& occ : vs.occupants)
    if (!(occ.at_entry && occ.v <= kSpeedTol)) return false;
  return true;
}

bool condition_ct(const World& w, const Vista& vs, double fo_dist, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  switch (vs.type) {
    case VistaType::MergeYield:
    case VistaType::CrossYield: {
      double tt = travel_time(w, vs, vs.d_h + vs.cd, fo_dist);
      for (const auto& a : vs.arriving) {
        if (tt == kInf) return fail("C_T: critical-section exit unreachable");
        if (a.V * tt + braking_distance(w.dynamics(), a.V) > a.d_a + kDynEps)
          return fail("C_T: arriving vehicle cannot brake before the conflict point");
      }
      return true;
    }
    case VistaType::CrossTrafficLight: {
      if (vs.d_h >= -kPosTol) {
        double tt_entry = travel_time(w, vs, vs.d_h, fo_dist);
        if (!(tt_entry < vs.light.ttr - kDynEps))
          return fail("C_T: cannot reach the entry before red");
      }
      double tt_exit = travel_time(w, vs, vs.d_h + vs.cd, fo_dist);
      for (const auto& el : vs.entry_lights)
        if (!(tt_exit < el.ttg - kDynEps)) return fail("C_T: cannot exit before a transverse green");
      if (!occupants_stationary_at_entries(vs)) return fail("C_T: junction occupied by a moving vehicle");
      return true;
    }
    case VistaType::CrossStop: {
      if (!occupants_stationary_at_entries(vs)) return fail("C_T: junction occupied by a moving vehicle");
      for (const auto& wtr : vs.waiters) {
        if (wtr.entry == vs.ego_entry) continue;
        if (!vs.st_e || !wtr.st) continue;
        if (*wtr.st < *vs.st_e) return fail("C_T: another entry stopped earlier");
        if (*wtr.st == *vs.st_e && wtr.priority < vs.ego_priority)
          return fail("C_T: priority entry waiting");
      }
      return true;
    }
    case VistaType::LaneChange: {
      const DynamicsParams& p = w.dynamics();
      if (braking_distance(p, vs.a2_boundary_V) > vs.a2_ld + kDynEps)
        return fail("C_T: lateral visibility shorter than the rear braking range");
      if (vs.d_a2 && braking_distance(p, vs.a2_V) > *vs.d_a2 + kDynEps)
        return fail("C_T: target-lane rear vehicle cannot stop behind ego");
      return true;
    }
    case VistaType::Road:
      return true;
  }
  return true;
}

}  // namespace

namespace {

bool invariant_i2(const World& w, const Vista& vs, const LeadObstacle& fo, std::string* why) {
  if (vs.type == VistaType::Road) return true;
  // caution: the free space is capped by the protecting signal
  if (fo.is_signal && vs.d_h >= -kPosTol) return true;
  // progress: the lead obstacle lies beyond the critical section and the
  // type-specific side condition holds
  if (!(vs.d_h + vs.cd < fo.dist - kPosTol)) {
    if (why) *why = "I2: lead obstacle inside the critical section during progress";
    return false;
  }
  std::string ct_why;
  if (!condition_ct(w, vs, fo.dist, &ct_why)) {
    if (why) *why = "I2: " + ct_why;
    return false;
  }
  return true;
}

}  // namespace

bool vista_safe(const World& w, const Vista& vs, const PolicyState& ps, std::string* why) {
  LeadObstacle fo = lead_obstacle(vs, ps);
  double limit = limit_position(w, vs, fo.dist);
  if (braking_distance(w.dynamics(), vs.v_e) > limit + kDynEps) {
    if (why) *why = "I1: braking envelope exceeds the free space";
    return false;
  }
  return invariant_i2(w, vs, fo, why);
}

Frame compute_frame(const World& w, const AdsState& s, const std::vector<PolicyState>& ps_in) {
  Frame f;
  f.t = s.t;
  f.vehicles.resize(s.vehicles.size());
  for (size_t i = 0; i < s.vehicles.size(); ++i) {
    if (s.vehicles[i].retired) continue;
    VehicleFrame vf;
    vf.vehicle = static_cast<int>(i);
    vf.vista = build_vista(w, s, static_cast<int>(i));
    vf.ps = mode_transition(ps_in[i], vf.vista);
    vf.fo = lead_obstacle(vf.vista, vf.ps);
    vf.limit_dist = limit_position(w, vf.vista, vf.fo.dist);
    vf.odometer = s.vehicles[i].odometer;
    vf.progress = s.vehicles[i].progress;
    vf.v = s.vehicles[i].v;
    vf.V = s.vehicles[i].V;
    const Route& route = w.vehicle(static_cast<int>(i)).route_info.route;
    vf.fs = route.slice(w.map(), vf.progress, vf.progress + vf.limit_dist);
    std::string why;
    vf.i1 = braking_distance(w.dynamics(), vf.v) <= vf.limit_dist + kDynEps;
    if (!vf.i1) why = "I1: braking envelope exceeds the free space";
    vf.i2 = invariant_i2(w, vf.vista, vf.fo, vf.i1 ? &why : nullptr);
    if (!vf.i1 || !vf.i2) {
      f.safe = false;
      f.issues.push_back(w.vehicle(static_cast<int>(i)).id + ": " + why);
    }
    f.vehicles[i] = std::move(vf);
  }
  std::string why;
  f.disjoint = free_spaces_disjoint(w, f, &why);
  if (!f.disjoint) f.issues.push_back(why);
  return f;
}

bool free_spaces_disjoint(const World& w, const Frame& f, std::string* why) {
  for (size_t i = 0; i < f.vehicles.size(); ++i) {
    if (!f.vehicles[i]) continue;
    for (size_t j = i + 1; j < f.vehicles.size(); ++j) {
      if (!f.vehicles[j]) continue;
      if (!routes_disjoint(w.map(), f.vehicles[i]->fs, f.vehicles[j]->fs, false)) {
        if (why)
          *why = "free spaces of " + w.vehicle(static_cast<int>(i)).id + " and " +
                 w.vehicle(static_cast<int>(j)).id + " intersect";
        return false;
      }
    }
  }
  return true;
}

bool non_intrusive(const World& w, const VehicleFrame& prev, const VehicleFrame& cur) {
  double fo_prev = prev.odometer + prev.fo.dist;
  double fo_cur = cur.odometer + cur.fo.dist;
  if (fo_prev <= fo_cur + kPosTol) return true;
  return cur.odometer + braking_distance(w.dynamics(), cur.V) <= fo_cur + kDynEps;
}

bool no_gaps(const VehicleFrame& prev, const VehicleFrame& cur) {
  return cur.odometer >= prev.odometer - kPosTol &&
         cur.odometer <= prev.odometer + prev.limit_dist + kPosTol;
}

bool limit_non_retracting(const VehicleFrame& prev, const VehicleFrame& cur) {
  return prev.odometer + prev.limit_dist <= cur.odometer + cur.limit_dist + kPosTol;
}

std::vector<std::pair<int, int>> junction_conflicts(const World& w, const AdsState& s) {
  const MetricGraph& g = w.map();
  std::vector<std::pair<int, int>> out;
  std::vector<Position> pos(s.vehicles.size());
  std::vector<bool> inside(s.vehicles.size(), false);
  std::vector<bool> at_line(s.vehicles.size(), false);
  for (size_t i = 0; i < s.vehicles.size(); ++i) {
    if (s.vehicles[i].retired) continue;
    pos[i] = vehicle_position(w, s, static_cast<int>(i));
    const RouteInfo& info = w.vehicle(static_cast<int>(i)).route_info;
    for (const auto& sign : info.signs) {
      const Signal& sg = w.signal(sign.signal);
      if (sg.kind == SignalKind::SpeedLimit) continue;
      if (std::abs(sign.arc - s.vehicles[i].progress) <= kEntryTol) at_line[i] = true;
    }
    for (int k = 0; k < g.junction_class_count(); ++k)
      if (g.is_junction(k) && !g.is_cooperative(k) && g.in_junction(pos[i], k)) inside[i] = true;
  }
  for (size_t i = 0; i < s.vehicles.size(); ++i) {
    if (s.vehicles[i].retired || !inside[i] || at_line[i]) continue;
    for (size_t j = i + 1; j < s.vehicles.size(); ++j) {
      if (s.vehicles[j].retired || !inside[j] || at_line[j]) continue;
      if (g.junction_related(pos[i], pos[j]) || g.same_position(pos[i], pos[j]))
        out.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return out;
}

}  // namespace ads
