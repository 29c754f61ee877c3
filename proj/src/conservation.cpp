#include "isodyn/conservation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "isodyn/errors.hpp"

namespace isodyn {

namespace {

struct PhaseGradients {
  Vec3 dx;   // d f / d x_i at fixed (pi, Q)
  Vec3 dpi;  // d f / d pi_i
  Vec3 dQ;   // d f / d Q^a
};

PhaseGradients gradients(const PhaseFunction& f, const ParticleState& s, double h) {
  PhaseGradients g;
  for (int i = 0; i < 3; ++i) {
    ParticleState p = s, m = s;
    p.x(i) += h;
    m.x(i) -= h;
    g.dx(i) = (f(p) - f(m)) / (2.0 * h);
    p = m = s;
    p.pi(i) += h;
    m.pi(i) -= h;
    g.dpi(i) = (f(p) - f(m)) / (2.0 * h);
    p = m = s;
    p.Q(i) += h;
    m.Q(i) -= h;
    g.dQ(i) = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

// D_i f = d_i f - (Q x A_i) . dQ f, with A(i, a) = A_i^a.
Vec3 covariantize(const Vec3& dx, const Vec3& dQ, const Vec3& Q, const Mat3& A) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) out(i) = dx(i) - Q.cross(A.row(i).transpose()).dot(dQ);
  return out;
}


double radicalInverse(unsigned index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * (index % base);
    index /= base;
    f /= base;
  }
  return result;
}

Vec3 sphereDirection(double u, double v) {
  const double z = 2.0 * u - 1.0;
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * std::numbers::pi * v;
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

// Partial derivatives of a coefficient map T(x, Q) in x and in Q.
template <class T, class F>
std::array<T, 3> partialX(const F& f, const Vec3& x, const Vec3& Q, double h) {
  std::array<T, 3> out;
  for (int m = 0; m < 3; ++m) {
    const Vec3 e = Vec3::Unit(m) * h;
    out[m] = (f(x + e, Q) - f(x - e, Q)) / (2.0 * h);
  }
  return out;
}

template <class T, class F>
std::array<T, 3> partialQ(const F& f, const Vec3& x, const Vec3& Q, double h) {
  std::array<T, 3> out;
  for (int c = 0; c < 3; ++c) {
    const Vec3 e = Vec3::Unit(c) * h;
    out[c] = (f(x, Q + e) - f(x, Q - e)) / (2.0 * h);
  }
  return out;
}

// D_m T = d_m T - sum_c (Q x A_m)_c dT/dQ^c
template <class T>
std::array<T, 3> covariantPartials(const std::array<T, 3>& dx, const std::array<T, 3>& dQ, const Vec3& Q,
                                   const Mat3& A) {
  std::array<T, 3> out = dx;
  for (int m = 0; m < 3; ++m) {
    const Vec3 w = Q.cross(A.row(m).transpose());
    for (int c = 0; c < 3; ++c) out[m] = out[m] - w(c) * dQ[c];
  }
  return out;
}

// Kinds whose conservation pattern is inherited by gauge-invariant quantities.
const GaugeField& physicalBase(const GaugeField& field) {
  const GaugeField* f = &field;
  while (f->kind() == FieldKind::GaugeTransformed) f = f->base();
  return *f;
}

}  // namespace

Vec3 phaseDerivative(const PhaseFunction& f, const ParticleState& s, const GaugeField& field, double h) {
  const PhaseGradients g = gradients(f, s, h);
  return covariantize(g.dx, g.dQ, s.Q, field.potentialAt(s.x));
}

double poissonBracket(const PhaseFunction& f, const PhaseFunction& g, const ParticleState& s,
                      const GaugeField& field, double h) {
  const Mat3 A = field.potentialAt(s.x);
  const PhaseGradients gf = gradients(f, s, h);
  const PhaseGradients gg = gradients(g, s, h);
  const Vec3 Df = covariantize(gf.dx, gf.dQ, s.Q, A);
  const Vec3 Dg = covariantize(gg.dx, gg.dQ, s.Q, A);
  const Mat3 QF = field.fieldStrengthAt(s.x).contracted(s.Q);
  return Df.dot(gg.dpi) - gf.dpi.dot(Dg) + gf.dpi.dot(QF * gg.dpi) - gf.dQ.cross(gg.dQ).dot(s.Q);
}

namespace quantities {

double isospinNormSquared(const ParticleState& s) { return s.Q.squaredNorm(); }

double energy(const ParticleState& s, const std::optional<ScalarPotential>& potential) {
  return 0.5 * s.pi.squaredNorm() + (potential ? potential->valueAt(s.x) : 0.0);
}

Vec3 angularMomentum(const ParticleState& s, double q) { return s.x.cross(s.pi) - q * s.x.normalized(); }

Vec3 rungeLenz(const ParticleState& s, double q, double alpha) {
  return s.pi.cross(angularMomentum(s, q)) + alpha * s.x.normalized();
}

Vec3 spinFromIsospin(const ParticleState& s, double kappa) {
  const Vec3 n = s.x.normalized();
  const double q = s.Q.dot(n);
  return q * n + kappa * (s.Q - q * n);
}

Vec3 diatomicAngularMomentum(const ParticleState& s, double kappa) {
  return s.x.cross(s.pi) - spinFromIsospin(s, kappa);
}

Vec3 canonicalMomentum(const ParticleState& s, const GaugeField& field) {
  return s.pi + field.potentialAt(s.x) * s.Q;
}

Vec3 canonicalAngularMomentum(const ParticleState& s, const GaugeField& field) {
  return s.x.cross(canonicalMomentum(s, field)) - s.Q;
}

PhaseFunction hamiltonian(const std::optional<ScalarPotential>& potential) {
  return [potential](const ParticleState& s) { return energy(s, potential); };
}

}  // namespace quantities

bool DriftReport::allPass() const {
  return std::all_of(entries.begin(), entries.end(), [](const QuantityDrift& e) { return e.pass; });
}

const QuantityDrift& DriftReport::at(const std::string& quantity) const {
  for (const auto& e : entries)
    if (e.quantity == quantity) return e;
  throw std::out_of_range("no drift entry named " + quantity);
}

bool expectedConserved(const std::string& quantity, const GaugeField& field,
                       const std::optional<ScalarPotential>& potential, const ParticleState& initial) {
  if (quantity == "isospin_norm2" || quantity == "energy") return true;

  const bool transformed = field.kind() == FieldKind::GaugeTransformed;
  const GaugeField& base = physicalBase(field);
  const FieldKind kind = base.kind();
  const bool monopoleLike = kind == FieldKind::WuYang || kind == FieldKind::DiracMonopole ||
                            (kind == FieldKind::Diatomic && base.kappa() == 0.0);

  if (quantity == "radial_charge") return monopoleLike || kind == FieldKind::UniformMagnetic;
  if (quantity == "angular_momentum") return monopoleLike;
  if (quantity == "runge_lenz") {
    if (!monopoleLike) return false;
    const double q0 = field.radialCharge(initial.x, initial.Q);
    const double qp = potential ? potential->qParam : 0.0;
    return std::abs(qp * qp - q0 * q0) <= 1e-10 * std::max(1.0, q0 * q0);
  }
  if (quantity == "angular_momentum_diatomic")
    return !transformed && (kind == FieldKind::WuYang || kind == FieldKind::Diatomic);
  if (quantity == "angular_momentum_canonical")
    return !transformed && (kind == FieldKind::WuYang || kind == FieldKind::Diatomic || kind == FieldKind::Vacuum);
  throw std::invalid_argument("unknown quantity " + quantity);
}

DriftReport evaluateStandardSet(const Trajectory& trajectory, const GaugeField& field,
                                const std::optional<ScalarPotential>& potential, double tolerance) {
  DriftReport report;
  report.tolerance = tolerance;
  const auto& samples = trajectory.samples;
  if (samples.empty()) return report;

  const double kappa = physicalBase(field).kappa();
  const double alpha = potential ? potential->alpha : 0.0;
  auto charge = [&](const ParticleState& s) { return field.radialCharge(s.x, s.Q); };

  // Each quantity is flattened to a vector so scalars and vectors share one path.
  using Eval = std::function<Eigen::VectorXd(const ParticleState&)>;
  auto scalar = [](double v) { return Eigen::VectorXd::Constant(1, v); };
  const std::vector<std::pair<std::string, Eval>> table{
      {"isospin_norm2", [&](const ParticleState& s) { return scalar(quantities::isospinNormSquared(s)); }},
      {"radial_charge", [&](const ParticleState& s) { return scalar(charge(s)); }},
      {"energy", [&](const ParticleState& s) { return scalar(quantities::energy(s, potential)); }},
      {"angular_momentum",
       [&](const ParticleState& s) { return Eigen::VectorXd(quantities::angularMomentum(s, charge(s))); }},
      {"runge_lenz",
       [&](const ParticleState& s) { return Eigen::VectorXd(quantities::rungeLenz(s, charge(s), alpha)); }},
      {"angular_momentum_diatomic",
       [&](const ParticleState& s) { return Eigen::VectorXd(quantities::diatomicAngularMomentum(s, kappa)); }},
      {"angular_momentum_canonical",
       [&](const ParticleState& s) { return Eigen::VectorXd(quantities::canonicalAngularMomentum(s, field)); }},
  };

  for (const auto& [name, eval] : table) {
    QuantityDrift d;
    d.quantity = name;
    d.expectedConserved = expectedConserved(name, field, potential, samples.front());
    const Eigen::VectorXd ref = eval(samples.front());
    const double scale = std::max(ref.norm(), 1e-12);
    for (const auto& s : samples) {
      const double diff = (eval(s) - ref).norm();
      d.maxAbsDrift = std::max(d.maxAbsDrift, diff);
      d.maxRelDrift = std::max(d.maxRelDrift, diff / scale);
    }
    d.pass = !d.expectedConserved || d.maxRelDrift < tolerance;
    report.entries.push_back(d);
  }
  return report;
}

DriftReport evaluateStandardSet(const Trajectory& trajectory, double tolerance) {
  return evaluateStandardSet(trajectory, trajectory.field, trajectory.potential, tolerance);
}

nlohmann::json toJson(const DriftReport& report) {
  nlohmann::json j;
  j["tolerance"] = report.tolerance;
  j["all_pass"] = report.allPass();
  auto& rows = j["quantities"] = nlohmann::json::array();
  for (const auto& e : report.entries)
    rows.push_back({{"quantity", e.quantity},
                    {"expectedConserved", e.expectedConserved},
                    {"maxAbsDrift", e.maxAbsDrift},
                    {"maxRelDrift", e.maxRelDrift},
                    {"pass", e.pass}});
  return j;
}

// ---------------------------------------------------------------------------

double CoefficientAnsatz::evaluate(const ParticleState& s) const {
  double out = scalar ? scalar(s.x, s.Q) : 0.0;
  if (vector) out += vector(s.x, s.Q).dot(s.pi);
  if (tensor) out += 0.5 * s.pi.dot(tensor(s.x, s.Q) * s.pi);
  return out;
}

IsospinPotential noPotential() {
  return [](const Vec3&, const Vec3&) { return 0.0; };
}

IsospinPotential fixedChargePotential(const ScalarPotential& v) {
  return [v](const Vec3& x, const Vec3&) { return v.valueAt(x); };
}

IsospinPotential correlatedPotential(const ScalarPotential& v) {
  return [v](const Vec3& x, const Vec3& Q) { return v.correlatedValue(x, Q); };
}

namespace ansatz {

CoefficientAnsatz zero() { return {"zero", {}, {}, {}}; }

CoefficientAnsatz radialCharge() {
  return {"radial-charge", [](const Vec3& x, const Vec3& Q) { return Q.dot(x.normalized()); }, {}, {}};
}

CoefficientAnsatz rotation(const Vec3& n) {
  return {"rotation",
          [n](const Vec3& x, const Vec3& Q) {
            const Vec3 r = x.normalized();
            return -Q.dot(r) * n.dot(r);
          },
          [n](const Vec3& x, const Vec3&) { return n.cross(x).eval(); },
          {}};
}

CoefficientAnsatz diatomicRotation(const Vec3& n, double kappa) {
  return {"diatomic-rotation",
          [n, kappa](const Vec3& x, const Vec3& Q) {
            const Vec3 r = x.normalized();
            const double q = Q.dot(r);
            return -n.dot(q * r + kappa * (Q - q * r));
          },
          [n](const Vec3& x, const Vec3&) { return n.cross(x).eval(); },
          {}};
}

CoefficientAnsatz rungeLenz(const Vec3& n, double alpha) {
  return {"runge-lenz",
          [n, alpha](const Vec3& x, const Vec3&) { return alpha * n.dot(x.normalized()); },
          [n](const Vec3& x, const Vec3& Q) {
            const Vec3 r = x.normalized();
            return n.cross(Q.dot(r) * r).eval();
          },
          [n](const Vec3& x, const Vec3&) {
            Mat3 c = 2.0 * n.dot(x) * Mat3::Identity();
            c -= n * x.transpose() + x * n.transpose();
            return c;
          }};
}

}  // namespace ansatz

bool VanHoltenReport::pass() const { return firstFailingOrder() < 0; }

int VanHoltenReport::firstFailingOrder() const {
  for (const auto& o : orders)
    if (!o.pass) return o.order;
  return -1;
}

std::vector<SamplePoint> shellSamples(int count, double rMin, double rMax) {
  if (count < 1) throw ValidationError("sample count must be >= 1");
  if (!(rMin > 0.0) || !(rMax >= rMin)) throw ValidationError("need 0 < r_min <= r_max");
  std::vector<SamplePoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (unsigned k = 1; k <= static_cast<unsigned>(count); ++k) {
    const double r = rMin + (rMax - rMin) * radicalInverse(k, 5);
    out.push_back({r * sphereDirection(radicalInverse(k, 2), radicalInverse(k, 3)),
                   sphereDirection(radicalInverse(k, 7), radicalInverse(k, 11))});
  }
  return out;
}

VanHoltenReport vanHoltenCheck(const CoefficientAnsatz& ansatz, const GaugeField& field,
                               const IsospinPotential& potential, std::span<const SamplePoint> samples,
                               double tolerance) {
  constexpr double h = kPhaseStep;
  const auto C0 = ansatz.scalar ? ansatz.scalar : [](const Vec3&, const Vec3&) { return 0.0; };
  const auto C1 = ansatz.vector ? ansatz.vector : [](const Vec3&, const Vec3&) { return Vec3::Zero().eval(); };
  const auto C2 = ansatz.tensor ? ansatz.tensor : [](const Vec3&, const Vec3&) { return Mat3::Zero().eval(); };

  VanHoltenReport report;
  report.ansatz = ansatz.name;
  report.field = field.name();
  report.samples = samples.size();
  report.tolerance = tolerance;
  std::array<double, 4> worst{0.0, 0.0, 0.0, 0.0};

  for (const auto& [x, Q] : samples) {
    const Mat3 A = field.potentialAt(x);
    const Mat3 QF = field.fieldStrengthAt(x).contracted(Q);

    const auto dVx = partialX<double>(potential, x, Q, h);
    const auto dVQ = partialQ<double>(potential, x, Q, h);
    const auto DVa = covariantPartials(dVx, dVQ, Q, A);
    const Vec3 DV(DVa[0], DVa[1], DVa[2]);
    const Vec3 gV(dVQ[0], dVQ[1], dVQ[2]);

    const auto dCx = partialX<double>(C0, x, Q, h);
    const auto dCQ = partialQ<double>(C0, x, Q, h);
    const auto DCa = covariantPartials(dCx, dCQ, Q, A);
    const Vec3 DC(DCa[0], DCa[1], DCa[2]);
    const Vec3 gC(dCQ[0], dCQ[1], dCQ[2]);

    const Vec3 c1 = C1(x, Q);
    const auto dC1Q = partialQ<Vec3>(C1, x, Q, h);  // dC1Q[c](i) = dC_i/dQ^c
    const auto DC1 = covariantPartials(partialX<Vec3>(C1, x, Q, h), dC1Q, Q, A);  // DC1[m](i) = D_m C_i

    const Mat3 c2 = C2(x, Q);
    const auto dC2Q = partialQ<Mat3>(C2, x, Q, h);
    const auto DC2 = covariantPartials(partialX<Mat3>(C2, x, Q, h), dC2Q, Q, A);

    // Q.(u x dV/dQ) for u = gradient in Q of a coefficient component.
    auto isoTerm = [&](auto component) {
      const Vec3 u(component(0), component(1), component(2));
      return Q.dot(u.cross(gV));
    };

    const double r0 = c1.dot(DV) + Q.dot(gC.cross(gV));
    worst[0] = std::max(worst[0], std::abs(r0));

    for (int i = 0; i < 3; ++i) {
      const double r1 = DC(i) - QF.row(i).dot(c1) - c2.row(i).dot(DV) -
                        isoTerm([&](int c) { return dC1Q[c](i); });
      worst[1] = std::max(worst[1], std::abs(r1));
    }

    const Mat3 qfc = QF * c2;  // (QF C)_ij = Q^a F^a_ik C_kj
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double r2 = DC1[i](j) + DC1[j](i) - (qfc(i, j) + qfc(j, i)) -
                          isoTerm([&](int c) { return dC2Q[c](i, j); });
        worst[2] = std::max(worst[2], std::abs(r2));
        for (int k = 0; k < 3; ++k) {
          const double r3 = DC2[i](j, k) + DC2[j](k, i) + DC2[k](i, j);
          worst[3] = std::max(worst[3], std::abs(r3));
        }
      }
  }

  for (int k = 0; k < 4; ++k) report.orders.push_back({k, worst[k], worst[k] < tolerance});
  return report;
}

nlohmann::json toJson(const VanHoltenReport& report) {
  nlohmann::json j;
  j["ansatz"] = report.ansatz;
  j["field"] = report.field;
  j["samples"] = report.samples;
  j["tolerance"] = report.tolerance;
  j["pass"] = report.pass();
  j["first_failing_order"] = report.firstFailingOrder();
  auto& rows = j["orders"] = nlohmann::json::array();
  for (const auto& o : report.orders)
    rows.push_back({{"order", o.order}, {"maxResidual", o.maxResidual}, {"pass", o.pass}});
  return j;
}

double killingVectorCheck(const std::function<Vec3(const Vec3&)>& c, std::span<const Vec3> grid, double h) {
  double worst = 0.0;
  for (const Vec3& x : grid) {
    Mat3 d;  // d(m, j) = d_m C_j
    for (int m = 0; m < 3; ++m) {
      const Vec3 e = Vec3::Unit(m) * h;
      d.row(m) = ((c(x + e) - c(x - e)) / (2.0 * h)).transpose();
    }
    worst = std::max(worst, (d + d.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

double killingTensorCheck(const std::function<Mat3(const Vec3&)>& c, std::span<const Vec3> grid, double h) {
  double worst = 0.0;
  for (const Vec3& x : grid) {
    std::array<Mat3, 3> d;
    for (int m = 0; m < 3; ++m) {
      const Vec3 e = Vec3::Unit(m) * h;
      d[m] = (c(x + e) - c(x - e)) / (2.0 * h);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          worst = std::max(worst, std::abs(d[i](j, k) + d[j](k, i) + d[k](i, j)));
  }
  return worst;
}

}  // namespace isodyn
