#include <cmath>
#include <sstream>

#include "doctest.h"
#include "isodyn/errors.hpp"
#include "isodyn/kaluza_klein.hpp"

using namespace isodyn;
using namespace isodyn::kk;

namespace {

// Frozen output of tests/oracles/kk_christoffel_oracle.py: {A, B, C, Gamma^A_BC}
// for B <= C; every entry not listed vanishes.
struct Entry {
  int a, b, c;
  double value;
};

const Entry kUniform[] = {
    {1, 1, 2, -0.1125},    {1, 2, 2, -0.3375},    {1, 2, 4, -0.75},        {2, 1, 1, 0.225},
    {2, 1, 2, 0.16875},    {2, 1, 4, 0.75},       {4, 1, 1, -0.050625},    {4, 1, 2, -0.02109375},
    {4, 1, 4, -0.16875},   {4, 2, 2, 0.050625},   {4, 2, 4, 0.1125},
};

const Entry kMonopole[] = {
    {1, 1, 2, -0.04955940317545707},  {1, 1, 3, -0.022026401411314253}, {1, 2, 2, -0.14867820952637121},
    {1, 2, 3, -0.03303960211697138},  {1, 2, 4, -0.29338307239537894},  {1, 3, 4, -0.13039247662016842},
    {2, 1, 1, 0.09911880635091414},   {2, 1, 2, 0.074339104763185605},  {2, 1, 3, -0.03303960211697138},
    {2, 1, 4, 0.29338307239537894},   {2, 2, 3, -0.04955940317545707},  {2, 3, 4, -0.19558871493025263},
    {3, 1, 1, 0.044052802822628507},  {3, 1, 2, 0.06607920423394276},   {3, 1, 4, 0.13039247662016842},
    {3, 2, 2, 0.09911880635091414},   {3, 2, 4, 0.19558871493025263},   {4, 1, 1, -0.14412446342410169},
    {4, 1, 2, -0.060051859760042371}, {4, 1, 3, -0.11829992566898694},  {4, 1, 4, -0.074339104763185605},
    {4, 2, 2, 0.14412446342410169},   {4, 2, 3, -0.17744988850348041},  {4, 2, 4, 0.04955940317545707},
    {4, 3, 4, 0.071585804586771324},
};

template <std::size_t N>
double christoffelError(const Christoffel& g, const Entry (&expected)[N]) {
  Christoffel ref;
  for (auto& m : ref) m.setZero();
  for (const auto& e : expected) ref[e.a](e.b, e.c) = ref[e.a](e.c, e.b) = e.value;
  double worst = 0.0;
  for (int a = 0; a < 5; ++a) worst = std::max(worst, (g[a] - ref[a]).cwiseAbs().maxCoeff());
  return worst;
}

Vec5 point(double x1, double x2, double x3) {
  Vec5 X;
  X << 0.0, x1, x2, x3, 0.0;
  return X;
}

}  // namespace

TEST_CASE("Christoffel symbols match the symbolic oracle") {
  CHECK(christoffelError(christoffelAt(FiveMetric(AbelianPotential::uniformMagnetic(1.5)), point(0.3, -0.2, 0.1)),
                         kUniform) < 1e-8);
  CHECK(christoffelError(christoffelAt(FiveMetric(AbelianPotential::diracMonopole(1.0)), point(0.6, -0.4, 0.9)),
                         kMonopole) < 1e-8);
  // Flat metric for the zero potential.
  const Christoffel z = christoffelAt(FiveMetric(AbelianPotential::zero()), point(1, 2, 3));
  for (const auto& m : z) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(christoffelAt(FiveMetric(AbelianPotential::zero()), point(1, 2, 3), 0.0), ValidationError);
}

TEST_CASE("five-metric blocks") {
  const FiveMetric m(AbelianPotential::uniformMagnetic(2.0));
  const Mat5 g = m.at(point(1.0, 0.5, 0.0));
  const Vec4 a(0.0, -0.5, 1.0, 0.0);
  CHECK((g.topRightCorner<4, 1>() - a).norm() == 0.0);
  CHECK(g(4, 4) == 1.0);
  CHECK(g(0, 0) == -1.0);
  CHECK(g(1, 2) == doctest::Approx(-0.5));
  CHECK((g - g.transpose()).norm() == 0.0);
}

TEST_CASE("analytic field strengths agree with the finite-difference fallback") {
  for (const auto& p : {AbelianPotential::uniformMagnetic(1.5), AbelianPotential::diracMonopole(1.0)}) {
    AbelianPotential fd = p;
    fd.fieldStrength = nullptr;
    const Vec4 x(0.0, 0.6, -0.4, 0.9);
    CHECK((p.fieldStrengthAt(x) - fd.fieldStrengthAt(x)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("initial state has the requested velocity and charge") {
  const FiveMetric m(AbelianPotential::diracMonopole(1.0));
  const Vec3 x(0.6, -0.4, 0.9), v(0.1, 0.3, 0.0);
  const FiveState s = initialState(m, x, v, 0.7);
  CHECK(s.U(0) == 1.0);
  CHECK((s.U.segment<3>(1) - v).norm() == 0.0);
  CHECK((s.X.segment<3>(1) - x).norm() == 0.0);
  CHECK(chargeOf(m, s) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("uniform field: geodesic projects onto the cyclotron orbit") {
  const double B = 1.5, q = 1.0;
  const FiveMetric m(AbelianPotential::uniformMagnetic(B));
  const Vec3 x0(0.3, -0.2, 0.1), v(0.4, 0.3, 0.2);
  GeodesicConfig cfg;
  cfg.tauEnd = 20.0;
  cfg.step = 1e-3;
  cfg.sampleEvery = 10;
  const LorentzComparison cmp = lorentzCompare(m, initialState(m, x0, v, q), cfg);
  CHECK(cmp.maxDeviation < 1e-6);
  CHECK(cmp.qDrift < 1e-8);
  CHECK(cmp.normDrift < 1e-8);

  const Vec3 vPerp(v.x(), v.y(), 0.0);
  const Vec3 centre = x0 - Vec3::UnitZ().cross(vPerp) / (q * B);
  const double radius = vPerp.norm() / std::abs(q * B);
  double worst = 0.0;
  for (const auto& s : cmp.geodesic) {
    const Vec3 y = s.X.segment<3>(1);
    worst = std::max(worst, std::abs(std::hypot(y.x() - centre.x(), y.y() - centre.y()) - radius));
    CHECK(std::abs(y.z() - (x0.z() + v.z() * s.tau)) < 1e-8);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("zero charge gives a straight line") {
  const FiveMetric m(AbelianPotential::uniformMagnetic(1.5));
  GeodesicConfig cfg;
  cfg.tauEnd = 5.0;
  const auto g = geodesicIntegrate(m, initialState(m, Vec3(0.1, 0.2, 0.3), Vec3(0.5, -0.2, 0.1), 0.0), cfg);
  const auto& end = g.back();
  CHECK((end.X.segment<3>(1) - (Vec3(0.1, 0.2, 0.3) + 5.0 * Vec3(0.5, -0.2, 0.1))).norm() < 1e-10);
}

TEST_CASE("Dirac monopole geodesic reproduces the Lorentz force") {
  const FiveMetric m(AbelianPotential::diracMonopole(1.0));
  GeodesicConfig cfg;
  cfg.tauEnd = 10.0;
  const LorentzComparison cmp = lorentzCompare(m, initialState(m, Vec3(0.6, -0.4, 0.9), Vec3(0.1, 0.3, 0.0), 1.0), cfg);
  CHECK(cmp.maxDeviation < 1e-6);
  CHECK(cmp.qDrift < 1e-8);
}

TEST_CASE("a gauge shift A -> A + dLambda leaves the projected motion unchanged") {
  const AbelianPotential base = AbelianPotential::uniformMagnetic(1.5);
  const AbelianPotential shifted = AbelianPotential::gaugeShifted(
      base, [](const Vec4& x) { return Vec4(0.0, 0.3 * x(2), 0.3 * x(1) + 0.1, 0.0); });
  GeodesicConfig cfg;
  cfg.tauEnd = 5.0;
  const Vec3 x(0.3, -0.2, 0.1), v(0.4, 0.3, 0.2);
  const FiveMetric m1(base), m2(shifted);
  const auto g1 = geodesicIntegrate(m1, initialState(m1, x, v, 1.0), cfg);
  const auto g2 = geodesicIntegrate(m2, initialState(m2, x, v, 1.0), cfg);
  REQUIRE(g1.size() == g2.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < g1.size(); ++i)
    worst = std::max(worst, (g1[i].X.head<4>() - g2[i].X.head<4>()).norm());
  CHECK(worst < 1e-7);
}

TEST_CASE("monopole patch rejects its string") {
  const AbelianPotential p = AbelianPotential::diracMonopole(1.0);
  CHECK_THROWS_AS(p.covector(Vec4(0, 0, 0, -1)), SingularPoint);
  GeodesicConfig bad;
  bad.step = -1.0;
  const FiveMetric m(p);
  CHECK_THROWS_AS(geodesicIntegrate(m, initialState(m, Vec3(0, 0, 1), Vec3::Zero(), 1.0), bad), ValidationError);
}

TEST_CASE("geodesic CSV header") {
  const FiveMetric m(AbelianPotential::zero());
  GeodesicConfig cfg;
  cfg.tauEnd = 0.01;
  std::ostringstream os;
  writeGeodesicCsv(os, geodesicIntegrate(m, initialState(m, Vec3(1, 0, 0), Vec3(0, 1, 0), 0.0), cfg));
  CHECK(os.str().rfind("tau,x0,x1,x2,x3,x5,u0,u1,u2,u3,u5\n", 0) == 0);
}
