#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ads/dynamics.hpp"
#include "oracles.hpp"

using namespace ads;

namespace {

const DynamicsParams kFig{3.4, 2.5, 1.0};

SpeedLimitConstraints fig_vl() {
  // 100 km/h now, 50 km/h from 40 m, stop at 140 m
  return SpeedLimitConstraints({{0.0, kmh_to_mps(100)}, {40.0, kmh_to_mps(50)}, {140.0, 0.0}});
}

std::vector<oracle::Constraint> to_oracle(const SpeedLimitConstraints& vl) {
  std::vector<oracle::Constraint> out;
  for (const auto& c : vl.entries()) out.push_back({c.d, c.V});
  return out;
}

}  // namespace

TEST_CASE("braking_distance matches the recursive reference") {
  CHECK(braking_distance(kFig, 0.0) == doctest::Approx(0.0));
  // values frozen from the recursion oracle
  CHECK(oracle::braking(13.89, 3.4, 1.0) == doctest::Approx(28.505));
  CHECK(braking_distance(kFig, 13.89) == doctest::Approx(28.505));
  CHECK(oracle::braking(25.0, 3.4, 1.0) == doctest::Approx(92.3));
  CHECK(braking_distance(kFig, 25.0) == doctest::Approx(92.3));

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uv(0.0, 45.0);
  for (int i = 0; i < 500; ++i) {
    double v = uv(rng);
    CHECK(braking_distance(kFig, v) == doctest::Approx(oracle::braking(v, 3.4, 1.0)).epsilon(1e-12));
  }
  DynamicsParams fast{3.4, 2.5, 0.2};
  for (int i = 0; i < 500; ++i) {
    double v = uv(rng);
    CHECK(braking_distance(fast, v) == doctest::Approx(oracle::braking(v, 3.4, 0.2)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(braking_distance(kFig, -1.0), PolicyPreconditionError);
}

TEST_CASE("braking_distance is strictly monotonic") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uv(0.0, 40.0);
  for (int i = 0; i < 1000; ++i) {
    double v1 = uv(rng), v2 = uv(rng);
    if (v1 < v2) std::swap(v1, v2);
    if (v1 - v2 < 1e-9) continue;
    CHECK(braking_distance(kFig, v1) > braking_distance(kFig, v2));
  }
}

TEST_CASE("controllability on the reference constraint set") {
  CHECK(controllable(kFig, kmh_to_mps(30), fig_vl()));
  CHECK(controllable(kFig, kmh_to_mps(60), fig_vl()));
  CHECK_FALSE(controllable(kFig, kmh_to_mps(90), fig_vl()));
  CHECK(controllable(kFig, 0.0, fig_vl()));
}

TEST_CASE("speed_control accelerates from standstill at a_max") {
  SpeedLimitConstraints vl({{0.0, 27.79}, {1000.0, 0.0}});
  auto out = speed_control(kFig, 0.0, vl);
  CHECK(out.dv == doctest::Approx(2.5));
  CHECK(out.dd == doctest::Approx(1.25));
}

TEST_CASE("speed_control on the reference set: 30 km/h free, 60 km/h capped") {
  auto out30 = speed_control(kFig, kmh_to_mps(30), fig_vl());
  CHECK(out30.dv == doctest::Approx(2.5));

  auto out60 = speed_control(kFig, kmh_to_mps(60), fig_vl());
  CHECK(out60.dv < 2.5);
  double a_grid = oracle::best_acceleration_grid(kmh_to_mps(60), to_oracle(fig_vl()), 3.4, 2.5, 1.0);
  CHECK(out60.dv == doctest::Approx(a_grid).epsilon(1e-3));

  CHECK_THROWS_AS(speed_control(kFig, kmh_to_mps(90), fig_vl()), PolicyPreconditionError);
}

namespace {

SpeedLimitConstraints random_controllable(std::mt19937& rng, const DynamicsParams& p, double& v_out) {
  std::uniform_real_distribution<double> uv(0.0, 35.0);
  std::uniform_real_distribution<double> ud(2.0, 120.0);
  std::uniform_int_distribution<int> un(0, 3);
  std::bernoulli_distribution stop(0.6);
  for (;;) {
    double v = uv(rng);
    std::vector<SpeedLimit> entries{{0.0, uv(rng) + 0.5}};
    int n = un(rng);
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      d += ud(rng);
      entries.push_back({d, uv(rng) + 0.1});
    }
    if (stop(rng)) entries.push_back({d + ud(rng), 0.0});
    SpeedLimitConstraints vl(entries);
    if (controllable(p, v, vl)) {
      v_out = v;
      return vl;
    }
  }
}

void check_contract(const DynamicsParams& p, double v, const SpeedLimitConstraints& vl) {
  auto [dv, dd] = speed_control(p, v, vl);
  CHECK(dd >= -1e-12);
  CHECK(v + dv >= -1e-12);
  const auto& es = vl.entries();
  for (size_t i = 0; i < es.size(); ++i) {
    double next_d = (i + 1 < es.size()) ? es[i + 1].d : kInf;
    // (i) the new speed respects the limit enforced where the vehicle lands
    if (es[i].d <= dd + 1e-9 && dd < next_d) CHECK(v + dv <= es[i].V + 1e-6);
    // (ii) braking envelopes of constraints still ahead are preserved
    if (dd <= es[i].d + 1e-9)
      CHECK(dd + braking_distance(p, v + dv) <= es[i].d + braking_distance(p, es[i].V) + 1e-6);
    // (iii) never drive past a stop constraint
    if (es[i].V == 0.0) CHECK(dd <= es[i].d + 1e-9);
  }
}

}  // namespace

TEST_CASE("speed_control satisfies its contract on random controllable inputs") {
  std::mt19937 rng(2024);
  for (const DynamicsParams& p : {DynamicsParams{3.4, 2.5, 1.0}, DynamicsParams{3.4, 2.5, 0.2},
                                  DynamicsParams{6.0, 1.5, 0.5}}) {
    for (int i = 0; i < 400; ++i) {
      double v = 0.0;
      auto vl = random_controllable(rng, p, v);
      check_contract(p, v, vl);
    }
  }
}

TEST_CASE("speed_control matches the acceleration-grid oracle") {
  std::mt19937 rng(99);
  DynamicsParams p{3.4, 2.5, 1.0};
  for (int i = 0; i < 300; ++i) {
    double v = 0.0;
    auto vl = random_controllable(rng, p, v);
    double a_star = speed_control(p, v, vl).dv / p.dt;
    double a_grid = oracle::best_acceleration_grid(v, to_oracle(vl), p.b_max, p.a_max, p.dt);
    CHECK(std::abs(a_star - a_grid) <= 1e-3);
  }
}

TEST_CASE("feasible set per constraint is never empty under controllability") {
  std::mt19937 rng(17);
  DynamicsParams p{3.4, 2.5, 1.0};
  for (int i = 0; i < 300; ++i) {
    double v = 0.0;
    auto vl = random_controllable(rng, p, v);
    for (const auto& c : vl.entries()) {
      std::vector<oracle::Constraint> one{{c.d, c.V}};
      // guarded fallback candidates
      if (c.d > 0 &&
          v * p.dt + p.a_max * p.dt * p.dt / 2 + braking_distance(p, v + p.a_max * p.dt) <=
              c.d + braking_distance(p, c.V))
        CHECK(oracle::compliant(v, p.a_max, one, p.b_max, p.dt));
      if ((c.d > 0 && v * p.dt + braking_distance(p, v) <= c.d + braking_distance(p, c.V)) ||
          (c.d == 0 && v <= c.V))
        CHECK(oracle::compliant(v, 0.0, one, p.b_max, p.dt));
      if (c.d > 0 && p.b_max * p.dt <= v) CHECK(oracle::compliant(v, -p.b_max, one, p.b_max, p.dt));
      if (c.d == 0 && 0 < v - c.V && v - c.V < p.b_max * p.dt)
        CHECK(oracle::compliant(v, (c.V - v) / p.dt, one, p.b_max, p.dt));
      // and at least one candidate is always available
      bool any = oracle::compliant(v, p.a_max, one, p.b_max, p.dt) ||
                 oracle::compliant(v, 0.0, one, p.b_max, p.dt) ||
                 oracle::compliant(v, std::max(-p.b_max, -v / p.dt), one, p.b_max, p.dt) ||
                 oracle::compliant(v, (c.V - v) / p.dt, one, p.b_max, p.dt);
      CHECK(any);
    }
  }
}

TEST_CASE("controllability is preserved across a control step") {
  std::mt19937 rng(31);
  DynamicsParams p{3.4, 2.5, 0.5};
  for (int i = 0; i < 500; ++i) {
    double v = 0.0;
    auto vl = random_controllable(rng, p, v);
    auto [dv, dd] = speed_control(p, v, vl);
    CHECK(controllable(p, v + dv, vl.shifted(dd)));
  }
}

TEST_CASE("constraint list validation") {
  CHECK_THROWS_AS(SpeedLimitConstraints({{5.0, 10.0}}), ScenarioError);
  CHECK_THROWS_AS(SpeedLimitConstraints({{0.0, 10.0}, {3.0, 8.0}, {3.0, 6.0}}), ScenarioError);
  CHECK_THROWS_AS(SpeedLimitConstraints({{0.0, 0.0}, {3.0, 8.0}}), ScenarioError);
  CHECK_THROWS_AS(SpeedLimitConstraints(std::vector<SpeedLimit>{}), ScenarioError);
}
