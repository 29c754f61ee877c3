#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "isodyn/gauge_fields.hpp"

namespace isodyn {

/// Phase point of a unit-mass particle with isospin: pi = xdot is the
/// covariant (kinetic) momentum.
struct ParticleState {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
  Vec3 pi = Vec3::Zero();
  Vec3 Q = Vec3::Zero();
};

struct StateDerivative {
  Vec3 xDot = Vec3::Zero();
  Vec3 piDot = Vec3::Zero();
  Vec3 QDot = Vec3::Zero();
};

enum class Method { RK4, RK45 };

struct IntegratorConfig {
  Method method = Method::RK4;
  double step = 1e-3;  // fixed step, or initial step for RK45
  double tolAbs = 1e-10;
  double tolRel = 1e-10;
  double tEnd = 10.0;
  int sampleEvery = 1;  // record every n-th step

  void validate() const;
};

enum class Termination { Completed, SingularTrajectory, StepUnderflow };

std::string toString(Method m);
std::string toString(Termination t);

struct Trajectory {
  std::vector<ParticleState> samples;
  GaugeField field = GaugeField::vacuum();
  std::optional<ScalarPotential> potential;
  IntegratorConfig integrator;
  Termination termination = Termination::Completed;
  std::string terminationDetail;

  bool completed() const { return termination == Termination::Completed; }
};

/// Flat-space Kerner-Wong right-hand side:
///   xdot = pi,  pidot_i = Q^a F^a_ij pi_j - d_i V,  Qdot = (A_i pi_i) x Q.
/// Throws SingularPoint when the field cannot be evaluated at s.x.
StateDerivative derivatives(const ParticleState& s, const GaugeField& field,
                            const std::optional<ScalarPotential>& potential);

/// One classical fourth-order Runge-Kutta step.
ParticleState rk4Step(const ParticleState& s, const GaugeField& field,
                      const std::optional<ScalarPotential>& potential, double h);

/// Integrates to cfg.tEnd. Entering the guard radius (or any other singular
/// evaluation) ends the run with Termination::SingularTrajectory and keeps the
/// samples recorded so far; the adaptive method reports StepUnderflow when
/// the step drops below 1e-14. Isospin is never renormalized.
Trajectory integrate(const ParticleState& initial, const GaugeField& field,
                     const std::optional<ScalarPotential>& potential, const IntegratorConfig& cfg);

struct CovariantResidual {
  double t = 0.0;
  Vec3 value = Vec3::Zero();
};

/// Finite-difference estimate of D_s Q = Qdot - (A_i xdot^i) x Q at interior
/// samples. Uses a five-point stencil where the spacing is uniform. Needs at
/// least three samples.
std::vector<CovariantResidual> covariantDerivativeQ(const Trajectory& trajectory);

/// Header t,x1,x2,x3,pi1,pi2,pi3,Q1,Q2,Q3; 17 significant digits.
void writeTrajectoryCsv(std::ostream& os, const Trajectory& trajectory);
void writeTrajectoryJson(std::ostream& os, const Trajectory& trajectory);

}  // namespace isodyn
