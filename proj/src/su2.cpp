#include "isodyn/su2.hpp"

#include <cmath>

namespace isodyn::su2 {

Mat3 hat(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

GroupElement GroupElement::fromParameters(double w, const Vec3& v) {
  Eigen::Quaterniond q(w, v.x(), v.y(), v.z());
  q.normalize();
  return GroupElement(q);
}

GroupElement expMap(const AlgebraElement& a) {
  const double theta = a.norm();
  Eigen::Quaterniond q;
  if (theta < 1e-8) {
    // second-order series of cos(theta/2), sin(theta/2)/theta
    q.w() = 1.0 - theta * theta / 8.0;
    q.vec() = (0.5 - theta * theta / 48.0) * a;
  } else {
    q.w() = std::cos(0.5 * theta);
    q.vec() = (std::sin(0.5 * theta) / theta) * a;
  }
  q.normalize();
  return GroupElement(q);
}

AlgebraElement logMap(const GroupElement& g) {
  double w = g.w();
  Vec3 v = g.v();
  if (w < 0.0) {
    w = -w;
    v = -v;
  }
  const double s = v.norm();
  if (s < 1e-12) return 2.0 * v;
  return (2.0 * std::atan2(s, w) / s) * v;
}

AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& a) { return g.rotation() * a; }

GroupElement compose(const GroupElement& g, const GroupElement& h) {
  Eigen::Quaterniond q = h.q_ * g.q_;
  q.normalize();
  return GroupElement(q);
}

GroupElement inverse(const GroupElement& g) { return GroupElement(g.q_.conjugate()); }

Mat3 leftJacobian(const AlgebraElement& a) {
  const double theta = a.norm();
  const Mat3 k = hat(a);
  if (theta < 1e-5) {
    return Mat3::Identity() + 0.5 * k + (1.0 / 6.0) * k * k;
  }
  const double t2 = theta * theta;
  return Mat3::Identity() + ((1.0 - std::cos(theta)) / t2) * k +
         ((theta - std::sin(theta)) / (t2 * theta)) * k * k;
}

}  // namespace isodyn::su2
