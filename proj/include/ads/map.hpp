#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ads/common.hpp"

namespace ads {

// A position on a metric graph: a vertex, or an interior point of an edge at
// a given offset from the edge source.
class Position {
 public:
  Position() = default;
  static Position vertex(int v) {
    Position p;
    p.vertex_ = v;
    return p;
  }
  static Position on_edge(int e, double offset) {
    Position p;
    p.edge_ = e;
    p.offset_ = offset;
    return p;
  }
  bool is_vertex() const { return vertex_ >= 0; }
  int vertex_id() const { return vertex_; }
  int edge() const { return edge_; }
  double offset() const { return offset_; }

 private:
  int vertex_ = -1;
  int edge_ = -1;
  double offset_ = 0.0;
};

struct Edge {
  std::string id;
  int from = -1;
  int to = -1;
  double length = 0.0;
  bool lane_transition = false;  // edge realizes a lane change between adjacent lanes
};

struct SharedPosition {
  int edge_a;
  double offset_a;
  int edge_b;
  double offset_b;
};

// A cut point is a canonical map location: a vertex or a declared shared
// position, after closing the identifications between them.
struct EdgeCut {
  double offset;
  int point;  // canonical point id
};

class MetricGraph {
 public:
  int add_vertex(const std::string& id);
  int add_edge(const std::string& id, int from, int to, double length_m, bool lane_transition = false);
  void add_shared_position(int edge_a, double offset_a, int edge_b, double offset_b);

  // Validates the raw input, closes position identifications and computes the
  // junction classes. Must be called once before any query.
  void finalize();

  int vertex_count() const { return static_cast<int>(vertex_ids_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(int e) const { return edges_[e]; }
  std::optional<int> find_vertex(const std::string& id) const;
  std::optional<int> find_edge(const std::string& id) const;
  const std::string& vertex_id(int v) const { return vertex_ids_[v]; }

  // -- positions ------------------------------------------------------------

  // Snaps edge endpoints to vertices and declared shared positions to their
  // canonical point within kPosTol; validates offsets.
  Position normalize(Position p) const;
  bool same_position(Position a, Position b) const;
  // Canonical point id if p sits on a vertex or shared position, else nullopt.
  std::optional<int> canonical_point(Position p) const;
  // Canonical point id of a vertex.
  int vertex_point(int v) const;
  std::string describe(Position p) const;

  // All cut points of an edge, ordered by offset; first is the source vertex,
  // last the target vertex.
  const std::vector<EdgeCut>& cuts(int e) const { return edge_cuts_[e]; }

  // Edges incident to a canonical point, as (edge, offset) locations.
  const std::vector<std::pair<int, double>>& point_locations(int point) const {
    return point_locs_[point];
  }

  // -- junctions ------------------------------------------------------------

  int junction_class(int e) const { return edge_class_[e]; }
  int junction_class_count() const { return static_cast<int>(class_edges_.size()); }
  const std::vector<int>& class_edges(int klass) const { return class_edges_[klass]; }
  // True for classes generated by at least one intersection or common-endpoint
  // pair; singleton classes are plain road edges.
  bool is_junction(int klass) const { return junction_flag_[klass]; }
  // Junction classes formed purely by lane-transition edges; the free-space
  // exclusivity rule does not apply to them (lane changes are cooperative).
  bool is_cooperative(int klass) const { return cooperative_flag_[klass]; }
  // True if the position lies on an edge of the given junction class, or is a
  // boundary vertex of one.
  bool in_junction(Position p, int klass) const;
  // True if the two positions belong to a common (non-cooperative) junction.
  bool junction_related(Position a, Position b) const;

  // -- metrics --------------------------------------------------------------

  // Shortest route length from one position to another; 0 if equal, +inf if
  // no route exists.
  double distance(Position from, Position to) const;

 private:
  int canonical_of(int edge, double offset) const;  // -1 when interior
  void build_cut_points();
  void compute_junctions();
  void build_metric_graph();

  std::vector<std::string> vertex_ids_;
  std::vector<Edge> edges_;
  std::vector<SharedPosition> shared_;
  std::unordered_map<std::string, int> vertex_index_;
  std::unordered_map<std::string, int> edge_index_;

  bool finalized_ = false;

  // canonical points: one per identified location (vertices + shared points)
  std::vector<int> point_of_vertex_;
  std::vector<std::vector<EdgeCut>> edge_cuts_;
  std::vector<std::vector<std::pair<int, double>>> point_locs_;

  // junction classes
  std::vector<int> edge_class_;
  std::vector<std::vector<int>> class_edges_;
  std::vector<bool> junction_flag_;
  std::vector<bool> cooperative_flag_;

  // expanded metric graph over canonical points
  struct Arc {
    int to;
    double weight;
    int edge;
    double from_offset;
    double to_offset;
  };
  std::vector<std::vector<Arc>> arcs_;

  double dijkstra(int source_point, double source_lead, const std::vector<std::pair<int, double>>& extra,
                  Position target) const;
};

// One traversed stretch of an edge. entry < exit along the edge direction.
struct RouteElement {
  int edge;
  double entry;
  double exit;
};

// A route: a chained sequence of edge stretches, optionally cyclic. Scalar
// arc length from the route start is the primary coordinate used everywhere.
class Route {
 public:
  Route() = default;
  Route(const MetricGraph& g, std::vector<RouteElement> elements, bool cyclic = false);

  // Convenience: full traversal of an edge chain starting at start_offset on
  // the first edge.
  static Route from_edges(const MetricGraph& g, const std::vector<int>& edges, double start_offset,
                          bool cyclic = false);

  double total_length() const { return total_; }
  bool cyclic() const { return cyclic_; }
  const std::vector<RouteElement>& elements() const { return elems_; }

  // Position at arc length s from the route start. For cyclic routes s wraps.
  Position position_at(double s) const;
  // p advanced by d along the route. Throws MapError when d exceeds the
  // remaining length of an acyclic route.
  double advance(double s, double d) const;

  // First arc length at or after `from` where the route passes through p.
  std::optional<double> offset_of(const MetricGraph& g, Position p, double from = 0.0) const;

  // Canonical points passed by the route, with their arc lengths, in order.
  struct CutOnRoute {
    double arc;
    int point;
  };
  const std::vector<CutOnRoute>& cut_points() const { return cut_points_; }

  // Contiguous stretch [from, to] of the route as a sub-route (for free
  // spaces). Requires 0 <= from <= to <= total on acyclic routes; on cyclic
  // routes the stretch may wrap.
  Route slice(const MetricGraph& g, double from, double to) const;

 private:
  std::vector<RouteElement> elems_;
  std::vector<double> cum_;  // arc length at the start of each element
  double total_ = 0.0;
  bool cyclic_ = false;
  std::vector<CutOnRoute> cut_points_;
};

// True iff the position sets of the two routes are disjoint and, when
// junction_exclusive is set, no two interior positions belong to one
// (non-cooperative) junction; route endpoints are excepted.
bool routes_disjoint(const MetricGraph& g, const Route& r1, const Route& r2, bool junction_exclusive = true);

}  // namespace ads
