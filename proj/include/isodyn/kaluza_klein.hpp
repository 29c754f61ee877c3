#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "isodyn/su2.hpp"

namespace isodyn::kk {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

/// Static Abelian potential A_mu(x) on flat Minkowski space, coordinates
/// (x0, x1, x2, x3). `fieldStrength` is optional; F_mu_nu is taken from
/// central differences of `covector` when it is empty.
struct AbelianPotential {
  std::string name;
  std::function<Vec4(const Vec4&)> covector;
  std::function<Mat4(const Vec4&)> fieldStrength;

  static AbelianPotential zero();
  /// A = (0, -B y/2, B x/2, 0)
  static AbelianPotential uniformMagnetic(double strength);
  /// Dirac monopole patch with its string along the negative z axis.
  static AbelianPotential diracMonopole(double strength);
  /// A -> A + d Lambda for a gauge function with gradient `gradLambda`.
  static AbelianPotential gaugeShifted(const AbelianPotential& base,
                                       std::function<Vec4(const Vec4&)> gradLambda);

  Mat4 fieldStrengthAt(const Vec4& x) const;
};

/// g_AB = [[eta + A A, A], [A, 1]] in coordinates (x0, x1, x2, x3, x5),
/// eta = diag(-1, 1, 1, 1). Independent of x5.
class FiveMetric {
 public:
  explicit FiveMetric(AbelianPotential potential) : potential_(std::move(potential)) {}

  Mat5 at(const Vec5& X) const;
  Vec4 potentialAt(const Vec5& X) const { return potential_.covector(X.head<4>()); }
  const AbelianPotential& potential() const { return potential_; }

 private:
  AbelianPotential potential_;
};

struct FiveState {
  double tau = 0.0;
  Vec5 X = Vec5::Zero();
  Vec5 U = Vec5::Zero();
};

/// gamma[A](B, C) = Gamma^A_BC
using Christoffel = std::array<Mat5, 5>;

/// Christoffel symbols from central differences of the metric with step hg.
Christoffel christoffelAt(const FiveMetric& metric, const Vec5& X, double hg = 1e-5);

struct GeodesicConfig {
  double step = 1e-3;
  double tauEnd = 20.0;
  int sampleEvery = 1;
  double christoffelStep = 1e-5;
};

/// RK4 solution of the geodesic equation; samples include the initial state.
std::vector<FiveState> geodesicIntegrate(const FiveMetric& metric, const FiveState& initial,
                                         const GeodesicConfig& cfg);

/// Killing charge of d/dx5: q = U^5 + A_mu U^mu.
double chargeOf(const FiveMetric& metric, const FiveState& s);
/// g_AB U^A U^B
double velocityNorm(const FiveMetric& metric, const FiveState& s);

/// State at x0 = 0 with U0 = 1, spatial velocity v and Killing charge q.
FiveState initialState(const FiveMetric& metric, const Vec3& x, const Vec3& velocity, double charge);

struct LorentzComparison {
  double charge = 0.0;
  double maxDeviation = 0.0;  // max |x5D^mu - x4D^mu| over samples
  double qDrift = 0.0;        // max relative drift of the Killing charge
  double normDrift = 0.0;     // max relative drift of g_AB U^A U^B
  std::vector<FiveState> geodesic;
  std::vector<Vec4> lorentz;  // 4D positions on the same tau grid
};

/// Integrates the 5D geodesic and the 4D equation xddot^mu = q F^mu_nu xdot^nu
/// with the same RK4 step and compares the base-space tracks.
LorentzComparison lorentzCompare(const FiveMetric& metric, const FiveState& initial, const GeodesicConfig& cfg);

/// Header tau,x0,x1,x2,x3,x5,u0,u1,u2,u3,u5; 17 significant digits.
void writeGeodesicCsv(std::ostream& os, const std::vector<FiveState>& samples);

}  // namespace isodyn::kk
