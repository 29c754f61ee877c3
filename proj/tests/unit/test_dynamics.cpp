#include <cmath>
#include <sstream>

#include "doctest.h"
#include "isodyn/dynamics.hpp"
#include "isodyn/errors.hpp"
#include "reference_runs.hpp"

using namespace isodyn;

namespace {

// Frozen outputs of tests/oracles/wong_rhs_oracle.py (scalar index loops).
struct RhsCase {
  double kappa;
  Vec3 x, pi, Q, piDot, QDot;
};

const RhsCase kRhsCases[] = {
    {0.0, {0, 0, 1}, {1, 0, 0}, {0, 0, 1}, {0, -1, 0}, {1, 0, 0}},
    {0.5,
     {0.4, -1.2, 0.7},
     {0.3, 0.2, -0.5},
     {0.6, 0.1, -0.3},
     {0.00710835374648016, 0.006335706600123623, 0.006799294887937547},
     {-0.03995215311004785, 0.09617224880382774, -0.04784688995215312}},
};

double finalError(const Trajectory& a, const Trajectory& b) {
  const auto& s = a.samples.back();
  const auto& r = b.samples.back();
  return std::max({(s.x - r.x).norm(), (s.pi - r.pi).norm(), (s.Q - r.Q).norm()});
}

}  // namespace

TEST_CASE("Kerner-Wong right-hand side matches the index-loop oracle") {
  for (const auto& c : kRhsCases) {
    const GaugeField f = c.kappa == 0.0 ? GaugeField::wuYang() : GaugeField::diatomic(c.kappa);
    const StateDerivative d = derivatives({0.0, c.x, c.pi, c.Q}, f, std::nullopt);
    CHECK((d.xDot - c.pi).norm() == 0.0);
    CHECK((d.piDot - c.piDot).norm() < 1e-14);
    CHECK((d.QDot - c.QDot).norm() < 1e-14);
  }
}

TEST_CASE("potential force is -grad V") {
  const ScalarPotential v{0.4, -1.0, 0.0};
  const ParticleState s{0.0, Vec3(1.0, 0.5, -0.2), Vec3::Zero(), Vec3(0, 0, 1)};
  const StateDerivative d = derivatives(s, GaugeField::vacuum(), v);
  CHECK((d.piDot + v.gradient(s.x)).norm() < 1e-15);
  CHECK(d.QDot.norm() == 0.0);
}

TEST_CASE("RK4 converges at fourth order") {
  const auto s0 = reference::initialState();
  const auto v = reference::goodPotential();
  const GaugeField f = GaugeField::wuYang();
  const Trajectory ref = integrate(s0, f, v, reference::rk4(1e-4, 2.0, 20000));
  const double e1 = finalError(integrate(s0, f, v, reference::rk4(0.04, 2.0, 1000)), ref);
  const double e2 = finalError(integrate(s0, f, v, reference::rk4(0.02, 2.0, 1000)), ref);
  const double e3 = finalError(integrate(s0, f, v, reference::rk4(0.01, 2.0, 1000)), ref);
  const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
  CAPTURE(p1);
  CAPTURE(p2);
  CHECK(p1 > 3.7);
  CHECK(p1 < 4.3);
  CHECK(p2 > 3.7);
  CHECK(p2 < 4.3);
}

TEST_CASE("adaptive RK45 agrees with fine RK4") {
  const auto s0 = reference::initialState();
  const auto v = reference::goodPotential();
  const GaugeField f = GaugeField::diatomic(0.5);
  IntegratorConfig c;
  c.method = Method::RK45;
  c.step = 1e-2;
  c.tEnd = 5.0;
  c.tolAbs = c.tolRel = 1e-11;
  c.sampleEvery = 1000000;
  const Trajectory a = integrate(s0, f, v, c);
  const Trajectory r = integrate(s0, f, v, reference::rk4(5e-4, 5.0, 100000));
  REQUIRE(a.completed());
  CHECK(a.samples.back().t == 5.0);
  CHECK(finalError(a, r) < 1e-8);
}

TEST_CASE("sampling keeps the first and last states") {
  const Trajectory t = integrate(reference::initialState(), GaugeField::wuYang(), std::nullopt,
                                 reference::rk4(0.01, 1.005, 10));
  CHECK(t.samples.front().t == 0.0);
  CHECK(t.samples.back().t == 1.005);
  CHECK(t.samples.size() == 12);
}

TEST_CASE("radial plunge into the Wu-Yang singularity terminates as singular") {
  const ParticleState s{0.0, Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(1, 0, 0)};
  const Trajectory t = integrate(s, GaugeField::wuYang(), std::nullopt, reference::rk4(1e-3, 3.0));
  CHECK(toString(t.termination) == std::string("singular-trajectory"));
  CHECK_FALSE(t.completed());
  CHECK(t.samples.size() > 900);
  CHECK(t.samples.back().t < 1.0);
  const bool named = toString(t.termination) == "singular-trajectory";
  CHECK(named);
}

TEST_CASE("integrator configuration is validated") {
  const auto s0 = reference::initialState();
  const GaugeField f = GaugeField::wuYang();
  auto bad = reference::rk4(0.0, 1.0);
  CHECK_THROWS_AS(integrate(s0, f, std::nullopt, bad), ValidationError);
  bad = reference::rk4(1e-3, 1.0, 0);
  CHECK_THROWS_AS(integrate(s0, f, std::nullopt, bad), ValidationError);
  bad = reference::rk4(1e-3, NAN);
  CHECK_THROWS_AS(integrate(s0, f, std::nullopt, bad), ValidationError);
  bad = reference::rk4(1e-3, 1.0);
  bad.tolAbs = -1.0;
  CHECK_THROWS_AS(integrate(s0, f, std::nullopt, bad), ValidationError);
  CHECK_THROWS_AS(rk4Step(s0, f, std::nullopt, 0.0), ValidationError);
}

TEST_CASE("adaptive step underflow is reported") {
  IntegratorConfig c;
  c.method = Method::RK45;
  c.tolAbs = c.tolRel = 1e-300;
  c.tEnd = 1.0;
  const Trajectory t = integrate(reference::initialState(), GaugeField::wuYang(), reference::goodPotential(), c);
  CHECK(toString(t.termination) == std::string("step-underflow"));
}

TEST_CASE("isospin is covariantly constant along the run") {
  const Trajectory t = integrate(reference::initialState(), GaugeField::diatomic(0.5), reference::goodPotential(),
                                 reference::rk4(1e-3, 5.0, 10));
  const auto res = covariantDerivativeQ(t);
  REQUIRE(res.size() > 100);
  double worst = 0.0;
  for (const auto& r : res) worst = std::max(worst, r.value.norm());
  CHECK(worst < 1e-6);
  // A wrong transport sign would show up at O(1).
  Trajectory wrong = t;
  for (auto& s : wrong.samples) s.Q = t.samples.front().Q;
  double off = 0.0;
  for (const auto& r : covariantDerivativeQ(wrong)) off = std::max(off, r.value.norm());
  CHECK(off > 1e-2);
}

TEST_CASE("pure gauge runs are free motion") {
  const GaugeField f = GaugeField::pureGauge(GaugeFunction::random(4));
  const auto s0 = reference::initialState();
  const Trajectory t = integrate(s0, f, std::nullopt, reference::rk4(1e-3, 3.0, 100));
  for (const auto& s : t.samples) {
    CHECK((s.pi - s0.pi).norm() < 1e-12);
    CHECK((s.x - (s0.x + s.t * s0.pi)).norm() < 1e-12);
  }
}

TEST_CASE("trajectory output is deterministic") {
  auto run = [] {
    const Trajectory t = integrate(reference::initialState(), GaugeField::wuYang(), reference::goodPotential(),
                                   reference::rk4(1e-2, 2.0, 10));
    std::ostringstream csv, json;
    writeTrajectoryCsv(csv, t);
    writeTrajectoryJson(json, t);
    return csv.str() + json.str();
  };
  const std::string a = run();
  CHECK(a == run());
  CHECK(a.rfind("t,x1,x2,x3,pi1,pi2,pi3,Q1,Q2,Q3\n", 0) == 0);
}
