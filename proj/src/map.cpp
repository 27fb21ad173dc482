#include "ads/map.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace ads {

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

}  // namespace

int MetricGraph::add_vertex(const std::string& id) {
  if (vertex_index_.count(id)) throw MapError("duplicate vertex id: " + id);
  int v = static_cast<int>(vertex_ids_.size());
  vertex_ids_.push_back(id);
  vertex_index_[id] = v;
  return v;
}

int MetricGraph::add_edge(const std::string& id, int from, int to, double length_m, bool lane_transition) {
  if (edge_index_.count(id)) throw MapError("duplicate edge id: " + id);
  if (from < 0 || from >= vertex_count() || to < 0 || to >= vertex_count())
    throw MapError("edge " + id + " references unknown vertex");
  if (!(length_m > 0.0) || !std::isfinite(length_m))
    throw MapError("edge " + id + " must have strictly positive length");
  if (from == to) throw MapError("edge " + id + " is self-crossing (loop)");
  int e = static_cast<int>(edges_.size());
  edges_.push_back(Edge{id, from, to, length_m, lane_transition});
  edge_index_[id] = e;
  return e;
}

void MetricGraph::add_shared_position(int edge_a, double offset_a, int edge_b, double offset_b) {
  shared_.push_back(SharedPosition{edge_a, offset_a, edge_b, offset_b});
}

std::optional<int> MetricGraph::find_vertex(const std::string& id) const {
  auto it = vertex_index_.find(id);
  if (it == vertex_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> MetricGraph::find_edge(const std::string& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

void MetricGraph::finalize() {
  if (finalized_) throw MapError("finalize called twice");

  for (const auto& s : shared_) {
    if (s.edge_a < 0 || s.edge_a >= edge_count() || s.edge_b < 0 || s.edge_b >= edge_count())
      throw MapError("shared position references unknown edge");
    if (s.edge_a == s.edge_b) throw MapError("edge " + edges_[s.edge_a].id + " is self-crossing");
    auto interior = [&](int e, double off) {
      return off > kPosTol && off < edges_[e].length - kPosTol;
    };
    if (!interior(s.edge_a, s.offset_a) || !interior(s.edge_b, s.offset_b))
      throw MapError("shared positions must be strictly interior; split the edge at a vertex instead");
  }

  build_cut_points();
  compute_junctions();
  build_metric_graph();
  finalized_ = true;
}

void MetricGraph::build_cut_points() {
  // Collect interior locations referenced by shared positions, grouping
  // same-edge references within kPosTol into one location.
  struct Loc {
    int edge;
    double offset;
  };
  std::vector<Loc> locs;
  auto loc_id = [&](int e, double off) {
    for (int i = 0; i < static_cast<int>(locs.size()); ++i)
      if (locs[i].edge == e && std::abs(locs[i].offset - off) <= kPosTol) return i;
    locs.push_back(Loc{e, off});
    return static_cast<int>(locs.size()) - 1;
  };

  std::vector<std::pair<int, int>> pairs;
  for (const auto& s : shared_)
    pairs.emplace_back(loc_id(s.edge_a, s.offset_a), loc_id(s.edge_b, s.offset_b));

  int nv = vertex_count();
  UnionFind uf(nv + static_cast<int>(locs.size()));
  for (auto [a, b] : pairs) uf.unite(nv + a, nv + b);

  // Compress to canonical point ids.
  std::vector<int> point_of_root(nv + locs.size(), -1);
  int next_point = 0;
  auto point_of = [&](int node) {
    int r = uf.find(node);
    if (point_of_root[r] < 0) point_of_root[r] = next_point++;
    return point_of_root[r];
  };

  point_of_vertex_.resize(nv);
  for (int v = 0; v < nv; ++v) point_of_vertex_[v] = point_of(v);

  edge_cuts_.assign(edge_count(), {});
  for (int e = 0; e < edge_count(); ++e) {
    edge_cuts_[e].push_back(EdgeCut{0.0, point_of_vertex_[edges_[e].from]});
    edge_cuts_[e].push_back(EdgeCut{edges_[e].length, point_of_vertex_[edges_[e].to]});
  }
  for (int i = 0; i < static_cast<int>(locs.size()); ++i)
    edge_cuts_[locs[i].edge].push_back(EdgeCut{locs[i].offset, point_of(nv + i)});

  point_locs_.assign(next_point, {});
  for (int e = 0; e < edge_count(); ++e) {
    auto& cuts = edge_cuts_[e];
    std::sort(cuts.begin(), cuts.end(), [](const EdgeCut& a, const EdgeCut& b) { return a.offset < b.offset; });
    for (size_t i = 1; i < cuts.size(); ++i) {
      if (cuts[i].offset - cuts[i - 1].offset <= kPosTol) {
        if (cuts[i].point != cuts[i - 1].point)
          throw MapError("distinct positions coincide on edge " + edges_[e].id);
        cuts.erase(cuts.begin() + static_cast<long>(i));
        --i;
      }
    }
    std::set<int> seen;
    for (const auto& c : cuts) {
      if (!seen.insert(c.point).second)
        throw MapError("edge " + edges_[e].id + " is self-crossing");
      point_locs_[c.point].emplace_back(e, c.offset);
    }
  }
}

void MetricGraph::compute_junctions() {
  UnionFind uf(edge_count());
  for (const auto& s : shared_) uf.unite(s.edge_a, s.edge_b);
  // Edges whose target endpoints coincide belong to one junction.
  std::unordered_map<int, int> first_by_post;
  for (int e = 0; e < edge_count(); ++e) {
    auto [it, fresh] = first_by_post.emplace(edges_[e].to, e);
    if (!fresh) uf.unite(it->second, e);
  }

  edge_class_.assign(edge_count(), -1);
  std::unordered_map<int, int> class_of_root;
  for (int e = 0; e < edge_count(); ++e) {
    int r = uf.find(e);
    auto [it, fresh] = class_of_root.emplace(r, static_cast<int>(class_edges_.size()));
    if (fresh) class_edges_.emplace_back();
    edge_class_[e] = it->second;
    class_edges_[it->second].push_back(e);
  }
  junction_flag_.resize(class_edges_.size());
  cooperative_flag_.resize(class_edges_.size());
  for (size_t k = 0; k < class_edges_.size(); ++k) {
    junction_flag_[k] = class_edges_[k].size() >= 2;
    bool coop = false;
    for (int e : class_edges_[k]) coop = coop || edges_[e].lane_transition;
    cooperative_flag_[k] = junction_flag_[k] && coop;
  }
}

void MetricGraph::build_metric_graph() {
  arcs_.assign(point_locs_.size(), {});
  for (int e = 0; e < edge_count(); ++e) {
    const auto& cuts = edge_cuts_[e];
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
      arcs_[cuts[i].point].push_back(
          Arc{cuts[i + 1].point, cuts[i + 1].offset - cuts[i].offset, e, cuts[i].offset, cuts[i + 1].offset});
    }
  }
}

Position MetricGraph::normalize(Position p) const {
  if (p.is_vertex()) {
    if (p.vertex_id() >= vertex_count()) throw MapError("invalid vertex position");
    return p;
  }
  if (p.edge() < 0 || p.edge() >= edge_count()) throw MapError("invalid edge position");
  const Edge& e = edges_[p.edge()];
  double off = p.offset();
  if (off < -kPosTol || off > e.length + kPosTol)
    throw MapError("offset out of range on edge " + e.id);
  if (off <= kPosTol) return Position::vertex(e.from);
  if (off >= e.length - kPosTol) return Position::vertex(e.to);
  return Position::on_edge(p.edge(), off);
}

int MetricGraph::canonical_of(int edge, double offset) const {
  const auto& cuts = edge_cuts_[edge];
  auto it = std::lower_bound(cuts.begin(), cuts.end(), offset - kPosTol,
                             [](const EdgeCut& c, double v) { return c.offset < v; });
  if (it != cuts.end() && std::abs(it->offset - offset) <= kPosTol) return it->point;
  return -1;
}

std::optional<int> MetricGraph::canonical_point(Position p) const {
  p = normalize(p);
  if (p.is_vertex()) return point_of_vertex_[p.vertex_id()];
  int c = canonical_of(p.edge(), p.offset());
  if (c >= 0) return c;
  return std::nullopt;
}

int MetricGraph::vertex_point(int v) const { return point_of_vertex_[v]; }

bool MetricGraph::same_position(Position a, Position b) const {
  a = normalize(a);
  b = normalize(b);
  if (a.is_vertex() && b.is_vertex()) return point_of_vertex_[a.vertex_id()] == point_of_vertex_[b.vertex_id()];
  if (!a.is_vertex() && !b.is_vertex() && a.edge() == b.edge())
    return std::abs(a.offset() - b.offset()) <= kPosTol;
  auto ca = canonical_point(a);
  auto cb = canonical_point(b);
  return ca && cb && *ca == *cb;
}

std::string MetricGraph::describe(Position p) const {
  p = normalize(p);
  if (p.is_vertex()) return "vertex " + vertex_ids_[p.vertex_id()];
  return edges_[p.edge()].id + "@" + std::to_string(p.offset());
}

bool MetricGraph::in_junction(Position p, int klass) const {
  p = normalize(p);
  if (!p.is_vertex()) {
    if (edge_class_[p.edge()] == klass) return true;
    int c = canonical_of(p.edge(), p.offset());
    if (c < 0) return false;
    for (auto [e, off] : point_locs_[c])
      if (edge_class_[e] == klass) return true;
    return false;
  }
  for (auto [e, off] : point_locs_[point_of_vertex_[p.vertex_id()]])
    if (edge_class_[e] == klass) return true;
  return false;
}

bool MetricGraph::junction_related(Position a, Position b) const {
  auto classes_of = [&](Position p) {
    std::vector<int> out;
    p = normalize(p);
    if (!p.is_vertex()) {
      out.push_back(edge_class_[p.edge()]);
      int c = canonical_of(p.edge(), p.offset());
      if (c >= 0)
        for (auto [e, off] : point_locs_[c]) out.push_back(edge_class_[e]);
    } else {
      for (auto [e, off] : point_locs_[point_of_vertex_[p.vertex_id()]]) out.push_back(edge_class_[e]);
    }
    return out;
  };
  for (int ka : classes_of(a)) {
    if (!is_junction(ka) || is_cooperative(ka)) continue;
    for (int kb : classes_of(b))
      if (ka == kb) return true;
  }
  return false;
}

double MetricGraph::dijkstra(int source_point, double source_lead,
                             const std::vector<std::pair<int, double>>& target_entries, Position target) const {
  (void)target;
  std::vector<double> dist(point_locs_.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source_point] = source_lead;
  pq.emplace(source_lead, source_point);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (const auto& arc : arcs_[u]) {
      double nd = d + arc.weight;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        pq.emplace(nd, arc.to);
      }
    }
  }
  double best = kInf;
  for (auto [pt, tail] : target_entries) best = std::min(best, dist[pt] + tail);
  return best;
}

double MetricGraph::distance(Position from, Position to) const {
  from = normalize(from);
  to = normalize(to);
  if (same_position(from, to)) return 0.0;

  double direct = kInf;
  if (!from.is_vertex() && !to.is_vertex() && from.edge() == to.edge() && from.offset() <= to.offset())
    direct = to.offset() - from.offset();

  // Virtual source: canonical point reached first from `from`.
  int src_point = -1;
  double src_lead = 0.0;
  if (auto c = canonical_point(from)) {
    src_point = *c;
  } else {
    const auto& cuts = edge_cuts_[from.edge()];
    auto it = std::lower_bound(cuts.begin(), cuts.end(), from.offset(),
                               [](const EdgeCut& c2, double v) { return c2.offset < v; });
    src_point = it->point;
    src_lead = it->offset - from.offset();
  }

  // Virtual target: canonical points from which `to` is reachable along its edge.
  std::vector<std::pair<int, double>> targets;
  if (auto c = canonical_point(to)) {
    targets.emplace_back(*c, 0.0);
  } else {
    for (const auto& cut : edge_cuts_[to.edge()])
      if (cut.offset <= to.offset()) targets.emplace_back(cut.point, to.offset() - cut.offset);
  }

  return std::min(direct, dijkstra(src_point, src_lead, targets, to));
}

// ---------------------------------------------------------------------------

Route::Route(const MetricGraph& g, std::vector<RouteElement> elements, bool cyclic)
    : elems_(std::move(elements)), cyclic_(cyclic) {
  if (elems_.empty()) throw MapError("route must contain at least one element");
  cum_.reserve(elems_.size());
  double arc = 0.0;
  for (size_t i = 0; i < elems_.size(); ++i) {
    const auto& el = elems_[i];
    const Edge& e = g.edge(el.edge);
    if (el.entry < -kPosTol || el.exit > e.length + kPosTol || el.entry > el.exit + kPosTol)
      throw MapError("route element out of range on edge " + e.id);
    if (i > 0) {
      Position prev_exit = Position::on_edge(elems_[i - 1].edge, elems_[i - 1].exit);
      Position cur_entry = Position::on_edge(el.edge, el.entry);
      if (!g.same_position(prev_exit, cur_entry))
        throw MapError("route elements do not chain at edge " + e.id);
    }
    cum_.push_back(arc);
    arc += el.exit - el.entry;
  }
  total_ = arc;
  if (cyclic_) {
    Position last = Position::on_edge(elems_.back().edge, elems_.back().exit);
    Position first = Position::on_edge(elems_.front().edge, elems_.front().entry);
    if (!g.same_position(last, first)) throw MapError("cyclic route does not close");
    if (total_ <= kPosTol) throw MapError("cyclic route must have positive length");
  }

  for (size_t i = 0; i < elems_.size(); ++i) {
    const auto& el = elems_[i];
    for (const auto& cut : g.cuts(el.edge)) {
      if (cut.offset < el.entry - kPosTol || cut.offset > el.exit + kPosTol) continue;
      double a = cum_[i] + std::clamp(cut.offset - el.entry, 0.0, el.exit - el.entry);
      if (!cut_points_.empty() && cut_points_.back().point == cut.point &&
          std::abs(cut_points_.back().arc - a) <= kPosTol)
        continue;
      cut_points_.push_back(CutOnRoute{a, cut.point});
    }
  }
}

Route Route::from_edges(const MetricGraph& g, const std::vector<int>& edges, double start_offset, bool cyclic) {
  if (edges.empty()) throw MapError("route must contain at least one edge");
  std::vector<RouteElement> elems;
  for (size_t i = 0; i < edges.size(); ++i) {
    double entry = (i == 0) ? start_offset : 0.0;
    elems.push_back(RouteElement{edges[i], entry, g.edge(edges[i]).length});
  }
  if (cyclic && start_offset > kPosTol)
    throw MapError("cyclic routes must start at the beginning of their first edge");
  return Route(g, std::move(elems), cyclic);
}

Position Route::position_at(double s) const {
  if (cyclic_) {
    s = std::fmod(s, total_);
    if (s < 0) s += total_;
  }
  if (s < -kPosTol || s > total_ + kPosTol) throw MapError("route offset out of range");
  s = std::clamp(s, 0.0, total_);
  size_t lo = 0, hi = elems_.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi + 1) / 2;
    if (cum_[mid] <= s)
      lo = mid;
    else
      hi = mid - 1;
  }
  const auto& el = elems_[lo];
  double off = el.entry + std::min(s - cum_[lo], el.exit - el.entry);
  return Position::on_edge(el.edge, off);
}

double Route::advance(double s, double d) const {
  if (d < -kPosTol) throw MapError("cannot advance backwards");
  double target = s + std::max(d, 0.0);
  if (!cyclic_ && target > total_ + kPosTol) throw MapError("route exhausted");
  return cyclic_ ? std::fmod(target, total_) : std::min(target, total_);
}

std::optional<double> Route::offset_of(const MetricGraph& g, Position p, double from) const {
  Position q = g.normalize(p);
  std::vector<double> candidates;
  if (auto c = g.canonical_point(q)) {
    for (const auto& cut : cut_points_)
      if (cut.point == *c) candidates.push_back(cut.arc);
  } else {
    for (size_t i = 0; i < elems_.size(); ++i) {
      const auto& el = elems_[i];
      if (el.edge != q.edge()) continue;
      if (q.offset() < el.entry - kPosTol || q.offset() > el.exit + kPosTol) continue;
      candidates.push_back(cum_[i] + std::clamp(q.offset() - el.entry, 0.0, el.exit - el.entry));
    }
  }
  if (candidates.empty()) return std::nullopt;
  std::sort(candidates.begin(), candidates.end());
  for (double a : candidates)
    if (a >= from - kPosTol) return a;
  if (cyclic_) return candidates.front() + total_;
  return std::nullopt;
}

Route Route::slice(const MetricGraph& g, double from, double to) const {
  if (to < from - kPosTol) throw MapError("invalid slice bounds");
  if (!cyclic_ && (from < -kPosTol || to > total_ + kPosTol)) throw MapError("slice out of range");
  from = std::max(from, 0.0);
  if (!cyclic_) to = std::min(to, total_);

  std::vector<RouteElement> out;
  double remaining = to - from;
  double s = from;
  // Degenerate slice: a single zero-length element.
  if (remaining <= kPosTol) {
    Position p = position_at(s);
    out.push_back(RouteElement{p.edge(), p.offset(), p.offset()});
    return Route(g, std::move(out), false);
  }
  while (remaining > kPosTol) {
    double local = cyclic_ ? std::fmod(s, total_) : s;
    if (local < 0) local += total_;
    size_t idx = 0;
    for (size_t i = 0; i < elems_.size(); ++i) {
      double span = elems_[i].exit - elems_[i].entry;
      if (local <= cum_[i] + span - kPosTol || i + 1 == elems_.size()) {
        if (local >= cum_[i] - kPosTol) idx = i;
        if (local <= cum_[i] + span - kPosTol && local >= cum_[i] - kPosTol) break;
      }
    }
    const auto& el = elems_[idx];
    double off = el.entry + std::clamp(local - cum_[idx], 0.0, el.exit - el.entry);
    double take = std::min(remaining, el.exit - off);
    if (take <= kPosTol && idx + 1 == elems_.size() && !cyclic_) break;
    if (take > kPosTol) out.push_back(RouteElement{el.edge, off, off + take});
    s += std::max(take, kPosTol);
    remaining -= std::max(take, kPosTol);
  }
  return Route(g, std::move(out), false);
}

// ---------------------------------------------------------------------------

namespace {

struct PointUse {
  bool interior = false;
  bool endpoint = false;
};

bool position_is_route_end(const MetricGraph& g, const Route& r, Position p) {
  Position start = r.position_at(0.0);
  Position end = r.position_at(r.total_length());
  return g.same_position(p, start) || g.same_position(p, end);
}

}  // namespace

bool routes_disjoint(const MetricGraph& g, const Route& r1, const Route& r2, bool junction_exclusive) {
  // Same-edge interval overlap.
  const auto& e1 = r1.elements();
  const auto& e2 = r2.elements();
  for (const auto& a : e1) {
    for (const auto& b : e2) {
      if (a.edge != b.edge) continue;
      double lo = std::max(a.entry, b.entry);
      double hi = std::min(a.exit, b.exit);
      if (hi - lo > kPosTol) return false;
      if (hi - lo >= -kPosTol) {
        Position touch = Position::on_edge(a.edge, std::clamp(lo, 0.0, g.edge(a.edge).length));
        if (!position_is_route_end(g, r1, touch) || !position_is_route_end(g, r2, touch)) return false;
      }
    }
  }

  // Shared canonical points.
  auto uses = [&](const Route& r) {
    std::unordered_map<int, PointUse> m;
    for (const auto& cut : r.cut_points()) {
      bool end = cut.arc <= kPosTol || cut.arc >= r.total_length() - kPosTol;
      auto& u = m[cut.point];
      if (end)
        u.endpoint = true;
      else
        u.interior = true;
    }
    return m;
  };
  auto u1 = uses(r1);
  auto u2 = uses(r2);
  for (const auto& [pt, use1] : u1) {
    auto it = u2.find(pt);
    if (it == u2.end()) continue;
    if (use1.interior || it->second.interior) return false;
  }

  // Junction co-membership of interior positions.
  if (!junction_exclusive) return true;
  auto junction_interior = [&](const Route& r) {
    std::set<int> classes;
    const auto& elems = r.elements();
    double arc = 0.0;
    for (const auto& el : elems) {
      double span = el.exit - el.entry;
      int k = g.junction_class(el.edge);
      if (g.is_junction(k) && !g.is_cooperative(k)) {
        double lo = std::max(arc, kPosTol);
        double hi = std::min(arc + span, r.total_length() - kPosTol);
        if (hi - lo > kPosTol) classes.insert(k);
      }
      arc += span;
    }
    for (const auto& cut : r.cut_points()) {
      if (cut.arc <= kPosTol || cut.arc >= r.total_length() - kPosTol) continue;
      for (auto [e, off] : g.point_locations(cut.point)) {
        int k = g.junction_class(e);
        if (g.is_junction(k) && !g.is_cooperative(k)) classes.insert(k);
      }
    }
    return classes;
  };
  auto k1 = junction_interior(r1);
  if (!k1.empty()) {
    auto k2 = junction_interior(r2);
    for (int k : k1)
      if (k2.count(k)) return false;
  }
  return true;
}

}  // namespace ads
