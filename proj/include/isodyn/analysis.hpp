#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "isodyn/dynamics.hpp"
#include "json.hpp"

namespace isodyn {

using Vec2 = Eigen::Vector2d;

/// Angle between the initial J and xhat(t) along a run.
struct ConeReport {
  bool applicable = true;
  std::string reason;             // why the cone does not apply, if it does not
  double q = 0.0;                 // charge used for J = x x pi - q xhat
  double chargeDrift = 0.0;       // max |q(t) - q(0)| (single-argument form)
  double meanAngle = 0.0;         // rad
  double maxDeviation = 0.0;      // max |angle - mean|
  double expectedAngle = 0.0;     // atan2(sqrt(J^2 - q^2), -q), from J.xhat = -q
  double maxExpectedDeviation = 0.0;
  std::size_t samples = 0;
};

/// Cone statistics for J = x x pi - q xhat at the first sample. Without an
/// explicit q the field's radial charge is used, and the cone is reported as
/// not applicable when that charge drifts by more than `chargeTolerance`.
ConeReport coneCheck(const Trajectory& trajectory, std::optional<double> q = std::nullopt,
                     double chargeTolerance = 1e-6);

enum class ConicType { Ellipse, Parabola, Hyperbola };
std::string toString(ConicType t);

/// Least-squares conic a u^2 + b uv + c v^2 + d u + e v + f = 0 (unit-norm
/// coefficients) in the plane coordinates of the input points.
struct ConicFit {
  ConicType type = ConicType::Ellipse;
  std::array<double, 6> coefficients{};
  double discriminant = 0.0;  // b^2 - 4ac on the normalized-coordinate fit
  double residual = 0.0;      // max Sampson distance, in input length units
  double eccentricity = 0.0;
};

/// Direct SVD fit on centred, isotropically scaled coordinates; |disc| < 1e-9
/// is classified as a parabola. Needs at least five points.
ConicFit fitConic(std::span<const Vec2> points);

/// Orthonormal frame of the plane {y : n.y = offset}.
struct PlaneFrame {
  Vec3 normal = Vec3::UnitZ();  // unit
  Vec3 origin = Vec3::Zero();   // foot of the perpendicular from 0
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();

  Vec2 project(const Vec3& y) const { return {(y - origin).dot(e1), (y - origin).dot(e2)}; }
};

/// Gram-Schmidt from the first coordinate axis that is not nearly parallel to n.
PlaneFrame planeFrame(const Vec3& n, double offset);

struct ConicReport {
  ConeReport cone;
  Vec3 normal = Vec3::Zero();  // N = K + (alpha/q) J
  double planeOffset = 0.0;    // J^2 - q^2
  double maxOffPlaneDistance = 0.0;
  PlaneFrame frame;
  ConicFit conic;
  std::vector<Vec2> projected;
};

/// Checks N.x(t) = J^2 - q^2 along the run and fits a conic to the orbit
/// projected into that plane. Throws DegenerateCharge when |q| < 1e-10.
ConicReport planeAndConic(const Trajectory& trajectory, const Vec3& J, const Vec3& K, double alpha, double q);
/// J, K and q taken from the first sample; alpha from the run's potential.
ConicReport planeAndConic(const Trajectory& trajectory);

nlohmann::json toJson(const ConeReport& report);
nlohmann::json toJson(const ConicReport& report);

/// In-plane orbit as a polyline plus the fitted conic overlay.
void writeOrbitSvg(std::ostream& os, const ConicReport& report);
/// Orbit projected on the x1-x2 plane, for runs without a conic.
void writeProjectionSvg(std::ostream& os, const Trajectory& trajectory);

struct GaugeCovarianceReport {
  std::string gauge;
  double maxPositionDeviation = 0.0;  // max |x'(t) - x(t)|
  double maxIsospinDeviation = 0.0;   // max |Q'(t) - R(x(t)) Q(t)|
  std::size_t samples = 0;
  Termination original = Termination::Completed;
  Termination transformed = Termination::Completed;
};

/// Integrates the run and its gauge transform by g (same x0 and pi0,
/// Q0' = R(x0) Q0) with identical settings and compares them sample by sample.
GaugeCovarianceReport gaugeCovarianceExperiment(const ParticleState& initial, const GaugeField& field,
                                                const std::optional<ScalarPotential>& potential,
                                                const IntegratorConfig& cfg, const GaugeFunction& g);

nlohmann::json toJson(const GaugeCovarianceReport& report);

}  // namespace isodyn
