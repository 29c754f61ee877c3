#include "isodyn/gauge_fields.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "isodyn/errors.hpp"

namespace isodyn {

namespace {

constexpr double levi(int i, int j, int k) { return 0.5 * (i - j) * (j - k) * (k - i); }

std::string formatPoint(const Vec3& x) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << x.x() << ", " << x.y() << ", " << x.z() << ")";
  return os.str();
}

// A_i^a = s eps_iak x_k / r^2
Mat3 hedgehogPotential(const Vec3& x, double s) {
  const double r2 = x.squaredNorm();
  Mat3 a = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int b = 0; b < 3; ++b)
      for (int k = 0; k < 3; ++k) a(i, b) += levi(i, b, k) * x(k);
  return (s / r2) * a;
}

// F_ij^a = s eps_ijk x_k x_a / r^4
FieldStrength hedgehogField(const Vec3& x, double s) {
  const double r2 = x.squaredNorm();
  FieldStrength f;
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double e = 0.0;
        for (int k = 0; k < 3; ++k) e += levi(i, j, k) * x(k);
        f.component[a](i, j) = s * e * x(a) / (r2 * r2);
      }
  return f;
}

// F_ij = eps_ijk b_k for an Abelian magnetic field b along isospin axis 3.
// F_ij = eps_ijk B_k along isospin axis 3.
FieldStrength abelianField(const Vec3& b) {
  FieldStrength f;
  f.component[2] = -su2::hat(b);
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------

GaugeFunction::GaugeFunction(std::string name, ParameterMap phi, ParameterJacobian jacobian)
    : name_(std::move(name)), phi_(std::move(phi)), jacobian_(std::move(jacobian)) {}

GaugeFunction GaugeFunction::identity() {
  GaugeFunction g("identity", [](const Vec3&) { return Vec3::Zero().eval(); },
                  [](const Vec3&) { return Mat3::Zero().eval(); });
  g.identity_ = true;
  return g;
}

GaugeFunction GaugeFunction::constant(const Vec3& phi) {
  return GaugeFunction("constant", [phi](const Vec3&) { return phi; },
                       [](const Vec3&) { return Mat3::Zero().eval(); });
}

GaugeFunction GaugeFunction::fixedAxis(const Vec3& axis, const Vec3& gradient, double curvature) {
  if (axis.norm() == 0.0) throw ValidationError("fixed-axis gauge function needs a nonzero axis");
  const Vec3 n = axis.normalized();
  return GaugeFunction(
      "fixed-axis",
      [n, gradient, curvature](const Vec3& x) -> Vec3 {
        return (gradient.dot(x) + curvature * x.squaredNorm()) * n;
      },
      [n, gradient, curvature](const Vec3& x) -> Mat3 {
        return n * (gradient + 2.0 * curvature * x).transpose();
      });
}

GaugeFunction GaugeFunction::random(std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vec3 c;
  Mat3 m;
  Vec3 d;
  Vec3 k;
  for (int i = 0; i < 3; ++i) c(i) = angle(rng);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = amplitude * unit(rng);
  for (int i = 0; i < 3; ++i) d(i) = amplitude * unit(rng);
  for (int i = 0; i < 3; ++i) k(i) = unit(rng);
  return GaugeFunction(
      "random(seed=" + std::to_string(seed) + ")",
      [c, m, d, k](const Vec3& x) -> Vec3 { return c + m * x + d * std::sin(k.dot(x)); },
      [m, d, k](const Vec3& x) -> Mat3 { return m + d * k.transpose() * std::cos(k.dot(x)); });
}

Mat3 GaugeFunction::connection(const Vec3& x) const {
  if (identity_) return Mat3::Zero();
  const Mat3 jl = su2::leftJacobian(phi_(x));
  const Mat3 dphi = jacobian_(x);
  // row i: J_l(phi) d_i phi
  return (jl * dphi).transpose();
}

// ---------------------------------------------------------------------------

struct GaugeField::Data {
  FieldKind kind = FieldKind::Vacuum;
  double kappa = 0.0;
  double strength = 0.0;
  std::optional<GaugeFunction> gauge;
  std::optional<GaugeField> base;
};

GaugeField GaugeField::vacuum() { return GaugeField(std::make_shared<Data>()); }

GaugeField GaugeField::wuYang() {
  auto d = std::make_shared<Data>();
  d->kind = FieldKind::WuYang;
  return GaugeField(d);
}

GaugeField GaugeField::diatomic(double kappa) {
  if (!std::isfinite(kappa)) throw ValidationError("diatomic kappa must be finite");
  auto d = std::make_shared<Data>();
  d->kind = FieldKind::Diatomic;
  d->kappa = kappa;
  return GaugeField(d);
}

GaugeField GaugeField::pureGauge(GaugeFunction g) {
  auto d = std::make_shared<Data>();
  d->kind = FieldKind::PureGauge;
  d->gauge = std::move(g);
  return GaugeField(d);
}

GaugeField GaugeField::diracMonopole(double strength) {
  if (!std::isfinite(strength)) throw ValidationError("monopole strength must be finite");
  auto d = std::make_shared<Data>();
  d->kind = FieldKind::DiracMonopole;
  d->strength = strength;
  return GaugeField(d);
}

GaugeField GaugeField::uniformMagnetic(double strength) {
  if (!std::isfinite(strength)) throw ValidationError("field strength must be finite");
  auto d = std::make_shared<Data>();
  d->kind = FieldKind::UniformMagnetic;
  d->strength = strength;
  return GaugeField(d);
}

GaugeField GaugeField::transformed(GaugeFunction g) const {
  auto d = std::make_shared<Data>();
  d->kind = FieldKind::GaugeTransformed;
  d->gauge = std::move(g);
  d->base = *this;
  return GaugeField(d);
}

FieldKind GaugeField::kind() const { return data_->kind; }

std::string GaugeField::name() const {
  switch (data_->kind) {
    case FieldKind::Vacuum: return "vacuum";
    case FieldKind::PureGauge: return "pure-gauge";
    case FieldKind::WuYang: return "wu-yang";
    case FieldKind::Diatomic: return "diatomic";
    case FieldKind::DiracMonopole: return "dirac-monopole";
    case FieldKind::UniformMagnetic: return "uniform-magnetic";
    case FieldKind::GaugeTransformed: return data_->base->name() + "+gauge";
  }
  return "unknown";
}

double GaugeField::kappa() const {
  if (data_->kind == FieldKind::GaugeTransformed) return data_->base->kappa();
  return data_->kappa;
}

double GaugeField::strength() const {
  if (data_->kind == FieldKind::GaugeTransformed) return data_->base->strength();
  return data_->strength;
}

bool GaugeField::isAbelian() const {
  switch (data_->kind) {
    case FieldKind::Vacuum:
    case FieldKind::DiracMonopole:
    case FieldKind::UniformMagnetic: return true;
    default: return false;
  }
}

bool GaugeField::singularAtOrigin() const {
  switch (data_->kind) {
    case FieldKind::WuYang:
    case FieldKind::Diatomic:
    case FieldKind::DiracMonopole: return true;
    case FieldKind::GaugeTransformed: return data_->base->singularAtOrigin();
    default: return false;
  }
}

const GaugeField* GaugeField::base() const { return data_->base ? &*data_->base : nullptr; }

const GaugeFunction* GaugeField::gauge() const { return data_->gauge ? &*data_->gauge : nullptr; }

void GaugeField::guard(const Vec3& x) const {
  if (!x.allFinite()) throw SingularPoint("non-finite position " + formatPoint(x));
  if (singularAtOrigin() && x.norm() <= kGuardRadius) {
    std::ostringstream os;
    os << name() << " field evaluated at " << formatPoint(x) << " inside guard radius r_min = " << kGuardRadius;
    throw SingularPoint(os.str());
  }
  if (data_->kind == FieldKind::DiracMonopole && x.norm() + x.z() <= kGuardRadius)
    throw SingularPoint("dirac-monopole potential evaluated on its string at " + formatPoint(x));
}

Mat3 GaugeField::potentialAt(const Vec3& x) const {
  guard(x);
  switch (data_->kind) {
    case FieldKind::Vacuum: return Mat3::Zero();
    case FieldKind::PureGauge: return data_->gauge->connection(x);
    case FieldKind::WuYang: return hedgehogPotential(x, 1.0);
    case FieldKind::Diatomic: return hedgehogPotential(x, 1.0 - data_->kappa);
    case FieldKind::DiracMonopole: {
      const double r = x.norm();
      Mat3 a = Mat3::Zero();
      const double s = data_->strength / (r * (r + x.z()));
      a(0, 2) = -s * x.y();
      a(1, 2) = s * x.x();
      return a;
    }
    case FieldKind::UniformMagnetic: {
      Mat3 a = Mat3::Zero();
      a(0, 2) = -0.5 * data_->strength * x.y();
      a(1, 2) = 0.5 * data_->strength * x.x();
      return a;
    }
    case FieldKind::GaugeTransformed: {
      const Mat3 r = data_->gauge->rotation(x);
      return data_->base->potentialAt(x) * r.transpose() + data_->gauge->connection(x);
    }
  }
  return Mat3::Zero();
}

FieldStrength GaugeField::fieldStrengthAt(const Vec3& x) const {
  guard(x);
  switch (data_->kind) {
    case FieldKind::Vacuum:
    case FieldKind::PureGauge: return FieldStrength{};
    case FieldKind::WuYang: return hedgehogField(x, 1.0);
    case FieldKind::Diatomic: return hedgehogField(x, 1.0 - data_->kappa * data_->kappa);
    case FieldKind::DiracMonopole: {
      const double r = x.norm();
      return abelianField(data_->strength * x / (r * r * r));
    }
    case FieldKind::UniformMagnetic: return abelianField(Vec3(0.0, 0.0, data_->strength));
    case FieldKind::GaugeTransformed: {
      const Mat3 r = data_->gauge->rotation(x);
      const FieldStrength f = data_->base->fieldStrengthAt(x);
      FieldStrength out;
      for (int a = 0; a < 3; ++a)
        out.component[a] = r(a, 0) * f.component[0] + r(a, 1) * f.component[1] + r(a, 2) * f.component[2];
      return out;
    }
  }
  return FieldStrength{};
}

Mat3 GaugeField::magneticFieldAt(const Vec3& x) const {
  const FieldStrength f = fieldStrengthAt(x);
  Mat3 b = Mat3::Zero();
  for (int a = 0; a < 3; ++a)
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b(k, a) += 0.5 * levi(i, j, k) * f.component[a](i, j);
  return b;
}

double GaugeField::radialCharge(const Vec3& x, const Vec3& Q) const {
  switch (data_->kind) {
    case FieldKind::DiracMonopole: return data_->strength * Q.z();
    case FieldKind::UniformMagnetic: return Q.z();
    case FieldKind::GaugeTransformed:
      return data_->base->radialCharge(x, data_->gauge->rotation(x).transpose() * Q);
    default: {
      const double r = x.norm();
      if (r == 0.0) throw SingularPoint("radial charge undefined at the origin");
      return Q.dot(x) / r;
    }
  }
}

// ---------------------------------------------------------------------------

double checkFfromA(const GaugeField& field, const Vec3& x, double h) {
  if (!(h > 0.0)) throw ValidationError("finite-difference step must be positive");
  if (field.singularAtOrigin() && x.norm() <= kGuardRadius + h)
    throw SingularPoint("checkFfromA stencil reaches inside the guard radius");

  std::array<Mat3, 3> dA;  // dA[i](j, a) = d_i A_j^a
  for (int i = 0; i < 3; ++i) {
    const Vec3 e = Vec3::Unit(i) * h;
    dA[i] = (field.potentialAt(x + e) - field.potentialAt(x - e)) / (2.0 * h);
  }
  const Mat3 a = field.potentialAt(x);
  const FieldStrength exact = field.fieldStrengthAt(x);

  double residual = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Vec3 ai = a.row(i).transpose();
      const Vec3 aj = a.row(j).transpose();
      const Vec3 f = dA[i].row(j).transpose() - dA[j].row(i).transpose() - ai.cross(aj);
      for (int c = 0; c < 3; ++c) residual = std::max(residual, std::abs(f(c) - exact.component[c](i, j)));
    }
  return residual;
}

// ---------------------------------------------------------------------------

double ScalarPotential::value(double r) const {
  if (!(r > 0.0)) throw SingularPoint("scalar potential evaluated at r <= 0");
  return qParam * qParam / (2.0 * r * r) + alpha / r + beta;
}

double ScalarPotential::radialDerivative(double r) const {
  if (!(r > 0.0)) throw SingularPoint("scalar potential evaluated at r <= 0");
  return -qParam * qParam / (r * r * r) - alpha / (r * r);
}

Vec3 ScalarPotential::gradient(const Vec3& x) const {
  const double r = x.norm();
  return (radialDerivative(r) / r) * x;
}

double ScalarPotential::correlatedValue(const Vec3& x, const Vec3& Q) const {
  const double r = x.norm();
  if (!(r > 0.0)) throw SingularPoint("scalar potential evaluated at r <= 0");
  const double q = Q.dot(x) / r;
  return q * q / (2.0 * r * r) + alpha / r + beta;
}

Vec3 HiggsHedgehog::value(const Vec3& x) const {
  const double r = x.norm();
  if (!(r > 0.0)) throw SingularPoint("hedgehog evaluated at the origin");
  return (1.0 - m / r) * x / r;
}

Vec3 HiggsHedgehog::direction(const Vec3& x) const {
  const double r = x.norm();
  if (!(r > 0.0)) throw SingularPoint("hedgehog direction undefined at the origin");
  return x / r;
}

}  // namespace isodyn
