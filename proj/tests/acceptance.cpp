// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "isodyn/analysis.hpp"
#include "isodyn/conservation.hpp"
#include "isodyn/kaluza_klein.hpp"
#include "reference_runs.hpp"

using namespace isodyn;

namespace {

namespace tol {
constexpr double isospinNorm = 1e-9;
constexpr double runtimeSeconds = 5.0;
constexpr double covariantTransport = 1e-6;
constexpr double pureGaugePlainRate = 1e-1;  // plain |Qdot| must be visibly nonzero
constexpr double wuYangSet = 1e-7;
constexpr double coneAngle = 1e-6;
constexpr double offPlane = 1e-6;
constexpr double diatomicJ = 1e-7;
constexpr double diatomicChargeDrift = 1e-2;
constexpr double diatomicWuYangJDrift = 1e-3;
constexpr double gaugePosition = 1e-7;
constexpr double gaugeIsospin = 1e-6;
constexpr double kkPosition = 1e-6;
constexpr double kkCharge = 1e-8;
constexpr double kkRadius = 1e-6;
constexpr double ladderPass = 1e-6;
constexpr double ladderFail = 1e-2;
constexpr double orderFMin = 1.8, orderFMax = 2.2;
constexpr double orderRK4Min = 3.7, orderRK4Max = 4.3;
constexpr double bracketAlgebra = 1e-8;
constexpr double bracketFlow = 1e-5;
}  // namespace tol

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d  %-34s %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const GaugeField& pureGaugeField() {
  static const GaugeField f =
      GaugeField::pureGauge(GaugeFunction::fixedAxis(Vec3(1, 1, 0).normalized(), Vec3(0.5, -0.3, 0.8), 0.2));
  return f;
}

struct TimedRun {
  Trajectory trajectory;
  double seconds = 0.0;
};

TimedRun timedRun(const GaugeField& field, const std::optional<ScalarPotential>& v, double tEnd, int sampleEvery) {
  const auto start = std::chrono::steady_clock::now();
  TimedRun r{integrate(reference::initialState(), field, v, reference::rk4(1e-3, tEnd, sampleEvery)), 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double maxCovariantResidual(const Trajectory& t) {
  double worst = 0.0;
  for (const auto& r : covariantDerivativeQ(t)) worst = std::max(worst, r.value.norm());
  return worst;
}

double maxPlainIsospinRate(const Trajectory& t) {
  double worst = 0.0;
  for (std::size_t k = 1; k < t.samples.size(); ++k) {
    const auto& a = t.samples[k - 1];
    const auto& b = t.samples[k];
    worst = std::max(worst, (b.Q - a.Q).norm() / (b.t - a.t));
  }
  return worst;
}

// ---------------------------------------------------------------------------

void criterion1and2() {
  const auto v = reference::goodPotential();
  struct Case {
    const char* name;
    GaugeField field;
  };
  const Case cases[] = {{"wu-yang", GaugeField::wuYang()},
                        {"diatomic(0.5)", GaugeField::diatomic(0.5)},
                        {"pure-gauge", pureGaugeField()}};
  bool ok1 = true, ok2 = true;
  std::string d1, d2;
  double pureRate = 0.0;
  for (const auto& c : cases) {
    const TimedRun run = timedRun(c.field, v, 100.0, 10);
    const double drift = evaluateStandardSet(run.trajectory).at("isospin_norm2").maxRelDrift;
    const double resid = maxCovariantResidual(run.trajectory);
    ok1 = ok1 && run.trajectory.completed() && drift < tol::isospinNorm && run.seconds < tol::runtimeSeconds;
    ok2 = ok2 && resid < tol::covariantTransport;
    d1 += fmt("%s %.1e (%.2fs)  ", c.name, drift, run.seconds);
    d2 += fmt("%s %.1e  ", c.name, resid);
    if (c.field.kind() == FieldKind::PureGauge) pureRate = maxPlainIsospinRate(run.trajectory);
  }
  ok2 = ok2 && pureRate > tol::pureGaugePlainRate;
  d2 += fmt("| pure-gauge max|Qdot| %.2f", pureRate);
  report(1, "isospin norm conservation", ok1, d1);
  report(2, "covariant isospin transport", ok2, d2);
}

void criterion3() {
  const Trajectory t = timedRun(GaugeField::wuYang(), reference::goodPotential(), 100.0, 10).trajectory;
  const DriftReport d = evaluateStandardSet(t);
  double worst = 0.0;
  for (const char* q : {"radial_charge", "angular_momentum", "runge_lenz", "energy"})
    worst = std::max(worst, d.at(q).maxRelDrift);
  const ConeReport cone = coneCheck(t);
  const ConicReport conic = planeAndConic(t);
  const bool ok = t.completed() && worst < tol::wuYangSet && cone.applicable && cone.maxDeviation < tol::coneAngle &&
                  conic.maxOffPlaneDistance < tol::offPlane && conic.conic.type == ConicType::Ellipse;
  report(3, "Wu-Yang conserved set and conic", ok,
         fmt("max drift(q,J,K,H) %.1e  cone dev %.1e rad  off-plane %.1e  %s e=%.3f", worst, cone.maxDeviation,
             conic.maxOffPlaneDistance, toString(conic.conic.type).c_str(), conic.conic.eccentricity));
}

void criterion4() {
  const Trajectory t = timedRun(GaugeField::diatomic(0.5), std::nullopt, 100.0, 10).trajectory;
  const DriftReport d = evaluateStandardSet(t);
  const double jd = d.at("angular_momentum_diatomic").maxRelDrift;
  const double q = d.at("radial_charge").maxAbsDrift;
  const double jwy = d.at("angular_momentum").maxAbsDrift;
  const Trajectory t0 = timedRun(GaugeField::diatomic(0.0), std::nullopt, 100.0, 10).trajectory;
  const double q0 = evaluateStandardSet(t0).at("radial_charge").maxRelDrift;
  const bool ok = t.completed() && jd < tol::diatomicJ && q > tol::diatomicChargeDrift &&
                  jwy > tol::diatomicWuYangJDrift && q0 < tol::wuYangSet;
  report(4, "diatomic contrast", ok,
         fmt("J_d rel %.1e  q abs %.3f  J_WY abs %.3f  | kappa=0: q rel %.1e", jd, q, jwy, q0));
}

void criterion5() {
  const auto cfg = reference::rk4(1e-3, 20.0, 10);
  double pos = 0.0, iso = 0.0;
  for (const auto& f : {GaugeField::wuYang(), GaugeField::diatomic(0.5)})
    for (std::uint64_t seed : {7, 11, 2024}) {
      const auto r = gaugeCovarianceExperiment(reference::initialState(), f, reference::goodPotential(), cfg,
                                               GaugeFunction::random(seed));
      pos = std::max(pos, r.maxPositionDeviation);
      iso = std::max(iso, r.maxIsospinDeviation);
    }
  report(5, "gauge covariance", pos < tol::gaugePosition && iso < tol::gaugeIsospin,
         fmt("max |dx| %.1e  max |Q' - R Q| %.1e  (Wu-Yang, diatomic; seeds 7, 11, 2024)", pos, iso));
}

void criterion6() {
  const double B = 1.5, q = 1.0;
  const kk::FiveMetric m(kk::AbelianPotential::uniformMagnetic(B));
  const Vec3 x0(0.3, -0.2, 0.1), v(0.4, 0.3, 0.2);
  kk::GeodesicConfig cfg;
  cfg.tauEnd = 20.0;
  cfg.step = 1e-3;
  cfg.sampleEvery = 10;
  const auto cmp = kk::lorentzCompare(m, kk::initialState(m, x0, v, q), cfg);
  const Vec3 vPerp(v.x(), v.y(), 0.0);
  const Vec3 centre = x0 - Vec3::UnitZ().cross(vPerp) / (q * B);
  const double radius = vPerp.norm() / std::abs(q * B);
  double dr = 0.0;
  for (const auto& s : cmp.geodesic)
    dr = std::max(dr, std::abs(std::hypot(s.X(1) - centre.x(), s.X(2) - centre.y()) - radius));
  const bool ok = cmp.maxDeviation < tol::kkPosition && cmp.qDrift < tol::kkCharge && dr < tol::kkRadius;
  report(6, "Kaluza-Klein equivalence", ok,
         fmt("max |x5D - x4D| %.1e  q drift %.1e  radius dev %.1e (r=%.4f)", cmp.maxDeviation, cmp.qDrift, dr,
             radius));
}

void criterion7() {
  const auto samples = shellSamples(64);
  const Vec3 n = Vec3(1, 2, 2) / 3.0;
  const ScalarPotential good{1.0, -1.0, 0.0};
  const auto wy = GaugeField::wuYang();
  auto worst = [](const VanHoltenReport& r) {
    double w = 0.0;
    for (const auto& o : r.orders) w = std::max(w, o.maxResidual);
    return w;
  };
  double passWorst = 0.0;
  passWorst = std::max(passWorst, worst(vanHoltenCheck(ansatz::rotation(n), wy, correlatedPotential(good), samples)));
  passWorst = std::max(passWorst, worst(vanHoltenCheck(ansatz::radialCharge(), wy, correlatedPotential(good), samples)));
  passWorst =
      std::max(passWorst, worst(vanHoltenCheck(ansatz::rungeLenz(n, -1.0), wy, correlatedPotential(good), samples)));
  passWorst = std::max(passWorst, worst(vanHoltenCheck(ansatz::diatomicRotation(n, 0.5), GaugeField::diatomic(0.5),
                                                       noPotential(), samples)));
  const auto d = GaugeField::diatomic(0.5);
  const auto fixed = vanHoltenCheck(ansatz::rungeLenz(n, -1.0), d, fixedChargePotential(good), samples);
  const auto corr = vanHoltenCheck(ansatz::rungeLenz(n, -1.0), d, correlatedPotential(good), samples);
  const bool ok = passWorst < tol::ladderPass && !fixed.pass() && worst(fixed) > tol::ladderFail && !corr.pass() &&
                  worst(corr) > tol::ladderFail;
  report(7, "van Holten ladder", ok,
         fmt("built-ins max residual %.1e  | RL on diatomic: fixed V fails order %d (%.2f), correlated V fails order "
             "%d (%.2f)",
             passWorst, fixed.firstFailingOrder(), worst(fixed), corr.firstFailingOrder(), worst(corr)));
}

void criterion8() {
  const Vec3 x(0.8, -0.5, 0.6);
  double pfMin = 1e9, pfMax = -1e9;
  for (const auto& f : {GaugeField::wuYang(), GaugeField::diatomic(0.5)}) {
    const double r1 = checkFfromA(f, x, 2e-2), r2 = checkFfromA(f, x, 1e-2), r3 = checkFfromA(f, x, 5e-3);
    for (double p : {std::log2(r1 / r2), std::log2(r2 / r3)}) {
      pfMin = std::min(pfMin, p);
      pfMax = std::max(pfMax, p);
    }
  }
  const auto s0 = reference::initialState();
  const auto v = reference::goodPotential();
  const auto wy = GaugeField::wuYang();
  auto endError = [&](double h, const ParticleState& ref) {
    const auto e = integrate(s0, wy, v, reference::rk4(h, 2.0, 100000)).samples.back();
    return std::max({(e.x - ref.x).norm(), (e.pi - ref.pi).norm(), (e.Q - ref.Q).norm()});
  };
  const ParticleState ref = integrate(s0, wy, v, reference::rk4(1e-4, 2.0, 100000)).samples.back();
  const double e1 = endError(0.04, ref), e2 = endError(0.02, ref), e3 = endError(0.01, ref);
  const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
  const bool ok = pfMin >= tol::orderFMin && pfMax <= tol::orderFMax && std::min(p1, p2) >= tol::orderRK4Min &&
                  std::max(p1, p2) <= tol::orderRK4Max;
  report(8, "numerics hygiene", ok,
         fmt("checkFfromA order [%.3f, %.3f]  RK4 order %.3f, %.3f", pfMin, pfMax, p1, p2));
}

void criterion9() {
  std::mt19937_64 rng(2718);
  const GaugeField field = GaugeField::diatomic(0.5);
  double algebra = 0.0;
  for (int n = 0; n < 100; ++n) {
    const ParticleState s{0.0, reference::randomPoint(rng, 0.7, 2.5), reference::randomVector(rng),
                          reference::randomVector(rng)};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const PhaseFunction xi = [i](const ParticleState& p) { return p.x(i); };
        const PhaseFunction pj = [j, &field](const ParticleState& p) {
          return quantities::canonicalMomentum(p, field)(j);
        };
        const PhaseFunction qi = [i](const ParticleState& p) { return p.Q(i); };
        const PhaseFunction qj = [j](const ParticleState& p) { return p.Q(j); };
        const int k = 3 - i - j;
        const double eps = (i == j) ? 0.0 : ((j - i + 3) % 3 == 1 ? 1.0 : -1.0);
        const double expectedQQ = (i == j) ? 0.0 : -eps * s.Q(k);
        algebra = std::max(algebra, std::abs(poissonBracket(xi, pj, s, field) - (i == j ? 1.0 : 0.0)));
        algebra = std::max(algebra, std::abs(poissonBracket(qi, qj, s, field) - expectedQQ));
      }
  }

  // {f, H} against a centred time difference of f along sampled runs.
  const auto v = reference::goodPotential();
  const auto H = quantities::hamiltonian(v);
  std::vector<PhaseFunction> fs{[](const ParticleState& s) { return s.Q.dot(s.x.normalized()); },
                                quantities::isospinNormSquared};
  for (int a = 0; a < 3; ++a)
    fs.push_back([a](const ParticleState& s) {
      return quantities::angularMomentum(s, s.Q.dot(s.x.normalized()))(a);
    });
  double flow = 0.0;
  for (const auto& f : {GaugeField::wuYang(), GaugeField::diatomic(0.5)}) {
    const Trajectory t = integrate(reference::initialState(), f, v, reference::rk4(1e-3, 10.0, 1));
    for (std::size_t k = 1; k + 1 < t.samples.size(); k += 250) {
      const auto& prev = t.samples[k - 1];
      const auto& next = t.samples[k + 1];
      for (const auto& fn : fs) {
        const double dfdt = (fn(next) - fn(prev)) / (next.t - prev.t);
        flow = std::max(flow, std::abs(poissonBracket(fn, H, t.samples[k], f) - dfdt));
      }
    }
  }
  report(9, "Poisson-bracket algebra", algebra < tol::bracketAlgebra && flow < tol::bracketFlow,
         fmt("{x,p},{Q,Q} max error %.1e (100 points)  |{f,H} - df/dt| %.1e", algebra, flow));
}

}  // namespace

int main() {
  criterion1and2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("%s: %d of 9 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
