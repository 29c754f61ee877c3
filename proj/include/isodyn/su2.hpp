#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace isodyn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

namespace su2 {

/// An element of su(2) in the basis T_a = sigma_a / (2i).
///
/// In this basis the matrix commutator reads [T_a, T_b] = eps_abc T_c, so the
/// Lie bracket on components is the 3D cross product and the trace metric
/// -2 tr(AB) is the Euclidean dot product. No complex matrices are stored.
using AlgebraElement = Eigen::Vector3d;

inline AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) { return a.cross(b); }

inline double inner(const AlgebraElement& a, const AlgebraElement& b) { return a.dot(b); }

/// Matrix of the linear map v -> a x v (the adjoint representation of a).
Mat3 hat(const Vec3& a);

/// An element of SU(2) stored as a unit quaternion (w, v).
///
/// Convention: the group acts on the algebra from the right, Q -> g^{-1} Q g,
/// and adjoint(g, .) is the rotation rotation() of the quaternion. Composition
/// follows the matrix product, so
///
///     adjoint(compose(g, h), a) == adjoint(h, adjoint(g, a)).
///
/// g and -g act identically on the algebra; equality of group elements is
/// only meaningful through the adjoint action.
class GroupElement {
 public:
  GroupElement() = default;

  static GroupElement identity() { return GroupElement{}; }
  /// Normalizes (w, v) onto the unit sphere.
  static GroupElement fromParameters(double w, const Vec3& v);

  double w() const { return q_.w(); }
  Vec3 v() const { return q_.vec(); }
  Eigen::Vector4d parameters() const { return {q_.w(), q_.x(), q_.y(), q_.z()}; }
  double normDefect() const { return std::abs(q_.squaredNorm() - 1.0); }

  Mat3 rotation() const { return q_.toRotationMatrix(); }

 private:
  explicit GroupElement(const Eigen::Quaterniond& q) : q_(q) {}

  Eigen::Quaterniond q_ = Eigen::Quaterniond::Identity();

  friend GroupElement compose(const GroupElement& g, const GroupElement& h);
  friend GroupElement inverse(const GroupElement& g);
  friend GroupElement expMap(const AlgebraElement& a);
};

/// Group element whose adjoint action is the rotation about a/|a| by angle |a|
/// (right-handed). expMap(0) is the identity.
GroupElement expMap(const AlgebraElement& a);

/// Rotation vector of g, |result| <= pi.
AlgebraElement logMap(const GroupElement& g);

/// g^{-1} a g in components.
AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& a);

/// Renormalized after every product.
GroupElement compose(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);

/// Left Jacobian of the exponential: d/dt expMap(a + t da) expMap(a)^{-1}
/// acts on the algebra as hat(leftJacobian(a) da).
Mat3 leftJacobian(const AlgebraElement& a);

}  // namespace su2
}  // namespace isodyn
