#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "ads/map.hpp"
#include "oracles.hpp"

using namespace ads;

namespace {

// main road crossing a side road at declared midpoints, plus a detached edge
MetricGraph cross_map() {
  MetricGraph g;
  int a = g.add_vertex("a"), b = g.add_vertex("b");
  int c = g.add_vertex("c"), d = g.add_vertex("d");
  int x = g.add_vertex("x"), y = g.add_vertex("y");
  g.add_edge("main", a, b, 100.0);
  g.add_edge("side", c, d, 80.0);
  g.add_edge("far", x, y, 10.0);
  g.add_shared_position(0, 60.0, 1, 30.0);
  g.finalize();
  return g;
}

std::set<std::set<std::string>> partition_of(const MetricGraph& g) {
  std::set<std::set<std::string>> classes;
  for (int k = 0; k < g.junction_class_count(); ++k) {
    std::set<std::string> cls;
    for (int e : g.class_edges(k)) cls.insert(g.edge(e).id);
    classes.insert(cls);
  }
  return classes;
}

}  // namespace

TEST_CASE("junctions: common target endpoint forms one class") {
  MetricGraph g;
  int a = g.add_vertex("a"), b = g.add_vertex("b"), u = g.add_vertex("u");
  g.add_edge("e1", a, u, 50.0);
  g.add_edge("e2", b, u, 60.0);
  g.finalize();
  CHECK(g.junction_class(0) == g.junction_class(1));
  CHECK(g.is_junction(g.junction_class(0)));
}

TEST_CASE("junctions: plain chain stays in singleton classes") {
  MetricGraph g;
  int a = g.add_vertex("a"), b = g.add_vertex("b"), c = g.add_vertex("c");
  g.add_edge("e1", a, b, 50.0);
  g.add_edge("e2", b, c, 30.0);
  g.finalize();
  CHECK(g.junction_class(0) != g.junction_class(1));
  CHECK_FALSE(g.is_junction(g.junction_class(0)));
  CHECK_FALSE(g.is_junction(g.junction_class(1)));
}

TEST_CASE("junctions: closure over intersection and shared endpoint") {
  MetricGraph g;
  int a = g.add_vertex("a"), b = g.add_vertex("b");
  int c = g.add_vertex("c"), u = g.add_vertex("u");
  int d = g.add_vertex("d");
  g.add_edge("e1", a, b, 40.0);   // crosses e2
  g.add_edge("e2", c, u, 50.0);   // ends at u, like e3
  g.add_edge("e3", d, u, 20.0);
  g.add_shared_position(0, 10.0, 1, 25.0);
  g.finalize();

  auto cls = oracle::equivalence_classes(3, {{0, 1}, {1, 2}});
  CHECK(cls[0] == cls[1]);
  CHECK(cls[1] == cls[2]);
  CHECK(g.junction_class(0) == g.junction_class(1));
  CHECK(g.junction_class(1) == g.junction_class(2));
}

TEST_CASE("junctions: partition independent of edge enumeration order") {
  auto build = [](bool reversed) {
    MetricGraph g;
    int a = g.add_vertex("a"), b = g.add_vertex("b");
    int c = g.add_vertex("c"), u = g.add_vertex("u");
    if (!reversed) {
      g.add_edge("p", a, u, 30.0);
      g.add_edge("q", b, u, 30.0);
      g.add_edge("r", c, a, 30.0);
    } else {
      g.add_edge("r", c, a, 30.0);
      g.add_edge("q", b, u, 30.0);
      g.add_edge("p", a, u, 30.0);
    }
    g.finalize();
    return partition_of(g);
  };
  CHECK(build(false) == build(true));
}

TEST_CASE("positions: endpoint offsets normalize to vertices") {
  MetricGraph g = cross_map();
  int main = *g.find_edge("main");
  CHECK(g.normalize(Position::on_edge(main, 0.0)).is_vertex());
  CHECK(g.normalize(Position::on_edge(main, 100.0)).is_vertex());
  CHECK(g.same_position(Position::on_edge(main, 100.0), Position::vertex(*g.find_vertex("b"))));
  CHECK(g.same_position(Position::on_edge(main, 60.0), Position::on_edge(*g.find_edge("side"), 30.0)));
  CHECK_FALSE(g.same_position(Position::on_edge(main, 59.0), Position::on_edge(*g.find_edge("side"), 30.0)));
}

TEST_CASE("distance: identical positions") {
  MetricGraph g = cross_map();
  Position p = Position::on_edge(*g.find_edge("main"), 12.0);
  CHECK(g.distance(p, p) == doctest::Approx(0.0));
}

TEST_CASE("distance: chained edges with offsets") {
  MetricGraph g;
  int a = g.add_vertex("a"), b = g.add_vertex("b"), c = g.add_vertex("c");
  g.add_edge("e1", a, b, 50.0);
  g.add_edge("e2", b, c, 30.0);
  g.finalize();
  CHECK(g.distance(Position::on_edge(0, 10.0), Position::on_edge(1, 20.0)) == doctest::Approx(60.0));
  CHECK(g.distance(Position::on_edge(1, 20.0), Position::on_edge(0, 10.0)) == kInf);
}

TEST_CASE("distance: diamond takes the shorter branch") {
  MetricGraph g;
  int s = g.add_vertex("s"), m1 = g.add_vertex("m1"), m2 = g.add_vertex("m2"), t = g.add_vertex("t");
  g.add_edge("up1", s, m1, 15.0);
  g.add_edge("up2", m1, t, 25.0);   // 15 + 25 = 40
  g.add_edge("dn1", s, m2, 30.0);
  g.add_edge("dn2", m2, t, 25.0);   // 30 + 25 = 55
  g.finalize();

  // independent oracle over the declared arcs
  auto d = oracle::shortest_paths(4, {{0, 1, 15.0}, {1, 3, 25.0}, {0, 2, 30.0}, {2, 3, 25.0}});
  CHECK(d[0][3] == doctest::Approx(40.0));
  CHECK(g.distance(Position::vertex(s), Position::vertex(t)) == doctest::Approx(40.0));
}

TEST_CASE("distance: routes through shared positions") {
  MetricGraph g = cross_map();
  int main = *g.find_edge("main");
  int side = *g.find_edge("side");
  // from main before the crossing, onto the side road after it
  CHECK(g.distance(Position::on_edge(main, 20.0), Position::on_edge(side, 50.0)) == doctest::Approx(60.0));
  // detached edge is unreachable
  CHECK(g.distance(Position::on_edge(main, 20.0), Position::on_edge(*g.find_edge("far"), 5.0)) == kInf);
}

TEST_CASE("distance: triangle inequality on sampled positions") {
  MetricGraph g = cross_map();
  std::vector<Position> ps;
  for (int e = 0; e < g.edge_count(); ++e)
    for (double off : {0.0, 7.5, 30.0, g.edge(e).length})
      if (off <= g.edge(e).length) ps.push_back(Position::on_edge(e, off));
  for (const auto& p : ps)
    for (const auto& q : ps)
      for (const auto& r : ps) {
        double pq = g.distance(p, q), qr = g.distance(q, r), pr = g.distance(p, r);
        if (pq < kInf && qr < kInf) CHECK(pr <= pq + qr + 1e-9);
      }
}

TEST_CASE("route: advance and offsets") {
  MetricGraph g;
  int a = g.add_vertex("a"), b = g.add_vertex("b"), c = g.add_vertex("c");
  int e1 = g.add_edge("e1", a, b, 50.0);
  int e2 = g.add_edge("e2", b, c, 30.0);
  g.finalize();
  Route r = Route::from_edges(g, {e1, e2}, 0.0);
  CHECK(r.total_length() == doctest::Approx(80.0));

  SUBCASE("zero displacement is identity") {
    CHECK(r.advance(45.0, 0.0) == doctest::Approx(45.0));
  }
  SUBCASE("crossing one vertex") {
    double s = r.advance(45.0, 10.0);
    Position p = r.position_at(s);
    CHECK(p.edge() == e2);
    CHECK(p.offset() == doctest::Approx(5.0));
  }
  SUBCASE("advance to the exact route end") {
    double s = r.advance(45.0, 35.0);
    CHECK(g.same_position(r.position_at(s), Position::vertex(c)));
  }
  SUBCASE("overrunning the route throws") {
    CHECK_THROWS_AS(r.advance(45.0, 36.0), MapError);
  }
  SUBCASE("advance is additive") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      double s = u(rng) * 80.0;
      double total = (80.0 - s) * u(rng);
      double first = total * u(rng);
      CHECK(r.advance(r.advance(s, first), total - first) == doctest::Approx(r.advance(s, total)));
    }
  }
  SUBCASE("offset_of resolves identified positions") {
    CHECK(*r.offset_of(g, Position::vertex(b)) == doctest::Approx(50.0));
    CHECK(*r.offset_of(g, Position::on_edge(e2, 12.0)) == doctest::Approx(62.0));
    CHECK_FALSE(r.offset_of(g, Position::on_edge(e2, 12.0), 70.0).has_value());
  }
}

TEST_CASE("route: cyclic ring wraps") {
  MetricGraph g;
  int a = g.add_vertex("a"), b = g.add_vertex("b");
  int e1 = g.add_edge("e1", a, b, 40.0);
  int e2 = g.add_edge("e2", b, a, 60.0);
  g.finalize();
  Route r = Route::from_edges(g, {e1, e2}, 0.0, true);
  CHECK(r.total_length() == doctest::Approx(100.0));
  CHECK(r.advance(90.0, 20.0) == doctest::Approx(10.0));
  Position p = r.position_at(10.0);
  CHECK(p.edge() == e1);
  CHECK(p.offset() == doctest::Approx(10.0));
  CHECK(*r.offset_of(g, Position::on_edge(e1, 5.0), 50.0) == doctest::Approx(105.0));
}

TEST_CASE("routes_disjoint: unconnected subgraphs") {
  MetricGraph g = cross_map();
  Route r1 = Route::from_edges(g, {*g.find_edge("main")}, 0.0);
  Route r2 = Route::from_edges(g, {*g.find_edge("far")}, 0.0);
  // main crosses side, so main vs far is the only fully detached pair
  CHECK(routes_disjoint(g, r1, r2));
}

TEST_CASE("routes_disjoint: same junction class fails even without common positions") {
  MetricGraph g;
  int a = g.add_vertex("a"), b = g.add_vertex("b");
  int c = g.add_vertex("c"), u = g.add_vertex("u");
  (void)b;
  int e1 = g.add_edge("e1", a, u, 50.0);
  int e2 = g.add_edge("e2", c, u, 60.0);
  g.finalize();
  Route r1(g, {RouteElement{e1, 5.0, 20.0}});
  Route r2(g, {RouteElement{e2, 5.0, 20.0}});
  CHECK_FALSE(routes_disjoint(g, r1, r2));
}

TEST_CASE("routes_disjoint: meeting only at a common endpoint is allowed") {
  MetricGraph g;
  int a = g.add_vertex("a"), b = g.add_vertex("b"), c = g.add_vertex("c");
  int e1 = g.add_edge("e1", a, b, 50.0);
  int e2 = g.add_edge("e2", b, c, 30.0);
  g.finalize();
  Route r1 = Route::from_edges(g, {e1}, 10.0);
  Route r2 = Route::from_edges(g, {e2}, 0.0);
  CHECK(routes_disjoint(g, r1, r2));

  // abutting stretches of one edge touch at both routes' endpoints
  Route f1(g, {RouteElement{e1, 0.0, 30.0}});
  Route f2(g, {RouteElement{e1, 30.0, 50.0}});
  CHECK(routes_disjoint(g, f1, f2));
}

TEST_CASE("routes_disjoint: interior containment always intersects") {
  MetricGraph g = cross_map();
  int main = *g.find_edge("main");
  int side = *g.find_edge("side");
  Route r(g, {RouteElement{main, 10.0, 90.0}});  // crossing point at offset 60 strictly inside

  SUBCASE("other route passes through the interior point") {
    Route r2(g, {RouteElement{side, 10.0, 70.0}});
    CHECK_FALSE(routes_disjoint(g, r, r2));
  }
  SUBCASE("other route merely ends at the interior point") {
    Route r2(g, {RouteElement{side, 10.0, 30.0}});
    CHECK_FALSE(routes_disjoint(g, r, r2));
  }
  SUBCASE("overlap on the same edge") {
    Route r2(g, {RouteElement{main, 80.0, 95.0}});
    CHECK_FALSE(routes_disjoint(g, r, r2));
  }
}
