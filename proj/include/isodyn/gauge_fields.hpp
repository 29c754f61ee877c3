#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "isodyn/su2.hpp"

namespace isodyn {

/// Points with |x| <= kGuardRadius are rejected by fields singular at the origin.
inline constexpr double kGuardRadius = 1e-6;

/// A smooth gauge function g(x) = expMap(phi(x)).
class GaugeFunction {
 public:
  using ParameterMap = std::function<Vec3(const Vec3&)>;
  /// J(a, i) = d phi^a / d x^i
  using ParameterJacobian = std::function<Mat3(const Vec3&)>;

  GaugeFunction(std::string name, ParameterMap phi, ParameterJacobian jacobian);

  static GaugeFunction identity();
  static GaugeFunction constant(const Vec3& phi);
  /// phi(x) = (k.x + c |x|^2) n with fixed unit axis n.
  static GaugeFunction fixedAxis(const Vec3& axis, const Vec3& gradient, double curvature);
  /// phi(x) = c + M x + d sin(k.x) with seeded random c, M, d, k.
  static GaugeFunction random(std::uint64_t seed, double amplitude = 0.3);

  const std::string& name() const { return name_; }
  bool isIdentity() const { return identity_; }

  Vec3 parameter(const Vec3& x) const { return phi_(x); }
  Mat3 parameterJacobian(const Vec3& x) const { return jacobian_(x); }
  su2::GroupElement at(const Vec3& x) const { return su2::expMap(phi_(x)); }
  Mat3 rotation(const Vec3& x) const { return at(x).rotation(); }

  /// Row i holds w_i, where hat(w_i) = (d_i R) R^T for R = rotation(x).
  Mat3 connection(const Vec3& x) const;

 private:
  std::string name_;
  ParameterMap phi_;
  ParameterJacobian jacobian_;
  bool identity_ = false;
};

enum class FieldKind { Vacuum, PureGauge, WuYang, Diatomic, DiracMonopole, UniformMagnetic, GaugeTransformed };

/// F_ij^a stored per isospin component: component[a](i, j).
struct FieldStrength {
  std::array<Mat3, 3> component{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};

  /// sum_a Q^a F^a_ij
  Mat3 contracted(const Vec3& Q) const {
    return Q.x() * component[0] + Q.y() * component[1] + Q.z() * component[2];
  }
};

/// Static magnetic gauge field configuration, evaluated pointwise.
///
/// Conventions (unit coupling, bracket = cross product):
///   potentialAt(x)(i, a)      = A_i^a
///   F_ij = d_i A_j - d_j A_i - A_i x A_j
///   isospin transport         Qdot = (A_i xdot^i) x Q
/// This is the sign set under which the Wu-Yang potential and field strength
/// are compatible and Q.rhat is covariantly constant. A gauge transformation
/// g(x) acts as Q -> R Q, A_i -> R A_i + w_i, F -> R F with R = adjoint(g).
///
/// Abelian kinds (DiracMonopole, UniformMagnetic) are embedded along isospin
/// axis 3. Instances are immutable and cheap to copy.
class GaugeField {
 public:
  static GaugeField vacuum();
  static GaugeField wuYang();
  static GaugeField diatomic(double kappa);
  static GaugeField pureGauge(GaugeFunction g);
  /// Dirac monopole of strength g with its string along the negative z axis.
  static GaugeField diracMonopole(double strength);
  static GaugeField uniformMagnetic(double strength);

  /// The gauge transform of this configuration by g.
  GaugeField transformed(GaugeFunction g) const;

  FieldKind kind() const;
  std::string name() const;
  /// Diatomic coupling; 0 for Wu-Yang and every other kind.
  double kappa() const;
  /// Dirac monopole strength or uniform field strength; 0 otherwise.
  double strength() const;
  bool isAbelian() const;
  bool singularAtOrigin() const;

  /// Base configuration and gauge function of a GaugeTransformed field.
  const GaugeField* base() const;
  const GaugeFunction* gauge() const;

  Mat3 potentialAt(const Vec3& x) const;
  FieldStrength fieldStrengthAt(const Vec3& x) const;
  /// B(k, a) = B_k^a = 1/2 eps_ijk F_ij^a
  Mat3 magneticFieldAt(const Vec3& x) const;

  /// Charge that plays the role of the monopole coupling for cone geometry:
  /// Q.rhat for the non-Abelian kinds, g Q^3 for the Dirac monopole, Q^3 for
  /// the uniform field. Gauge-transformed fields pull Q back to the base gauge.
  double radialCharge(const Vec3& x, const Vec3& Q) const;

 private:
  struct Data;
  explicit GaugeField(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  void guard(const Vec3& x) const;

  std::shared_ptr<const Data> data_;
};

/// Max-abs difference between the analytic field strength and the central
/// finite-difference reconstruction from potentialAt. O(h^2).
double checkFfromA(const GaugeField& field, const Vec3& x, double h);

/// V(r) = q^2 / (2 r^2) + alpha / r + beta.
struct ScalarPotential {
  double qParam = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  double value(double r) const;
  double radialDerivative(double r) const;
  double valueAt(const Vec3& x) const { return value(x.norm()); }
  /// grad V; equals the covariant gradient since V does not depend on Q.
  Vec3 gradient(const Vec3& x) const;
  /// V with the inverse-square coefficient set by the local charge Q.rhat.
  double correlatedValue(const Vec3& x, const Vec3& Q) const;
};

/// Asymptotic Higgs field of a self-dual monopole of charge m.
struct HiggsHedgehog {
  double m = 1.0;

  /// Phi^a = (1 - m/r) x^a / r
  Vec3 value(const Vec3& x) const;
  /// The hedgehog direction rhat. Phi/|Phi| agrees with it outside r = m.
  Vec3 direction(const Vec3& x) const;
  double chargeOf(const Vec3& x, const Vec3& Q) const { return Q.dot(direction(x)); }
};

}  // namespace isodyn
