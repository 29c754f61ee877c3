#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isodyn/dynamics.hpp"
#include "json.hpp"

namespace isodyn {

/// A function on phase space (x, pi, Q); ParticleState::t is ignored.
using PhaseFunction = std::function<double(const ParticleState&)>;

/// Step of every central difference in this module.
inline constexpr double kPhaseStep = 1e-5;

/// Covariant phase-space derivative D_i f = d_i f - eps_abc Q^a A_i^b df/dQ^c,
/// with d_i taken at fixed covariant momentum and isospin.
Vec3 phaseDerivative(const PhaseFunction& f, const ParticleState& s, const GaugeField& field,
                     double h = kPhaseStep);

/// Covariant Poisson bracket
///   {f,g} = D_j f dg/dpi_j - df/dpi_j D_j g + Q^a F^a_jk df/dpi_j dg/dpi_k
///           - eps_abc df/dQ^a dg/dQ^b Q^c.
double poissonBracket(const PhaseFunction& f, const PhaseFunction& g, const ParticleState& s,
                      const GaugeField& field, double h = kPhaseStep);

namespace quantities {

double isospinNormSquared(const ParticleState& s);
double energy(const ParticleState& s, const std::optional<ScalarPotential>& potential);
/// J = x x pi - q xhat
Vec3 angularMomentum(const ParticleState& s, double q);
/// K = pi x J + alpha xhat
Vec3 rungeLenz(const ParticleState& s, double q, double alpha);
/// Psi = q xhat + kappa (Q - q xhat), q = Q.xhat
Vec3 spinFromIsospin(const ParticleState& s, double kappa);
/// J = x x pi - Psi
Vec3 diatomicAngularMomentum(const ParticleState& s, double kappa);
/// p = pi + A^a Q^a
Vec3 canonicalMomentum(const ParticleState& s, const GaugeField& field);
/// J = x x p - Q
Vec3 canonicalAngularMomentum(const ParticleState& s, const GaugeField& field);

PhaseFunction hamiltonian(const std::optional<ScalarPotential>& potential);

}  // namespace quantities

struct QuantityDrift {
  std::string quantity;
  bool expectedConserved = false;
  double maxAbsDrift = 0.0;
  double maxRelDrift = 0.0;
  bool pass = true;  // expected quantities: maxRelDrift < tolerance; others always pass
};

struct DriftReport {
  std::vector<QuantityDrift> entries;
  double tolerance = 1e-7;

  bool allPass() const;
  const QuantityDrift& at(const std::string& quantity) const;
};

/// Quantity names used in DriftReport, in report order.
inline const std::vector<std::string> kStandardQuantities{
    "isospin_norm2", "radial_charge", "energy", "angular_momentum",
    "runge_lenz", "angular_momentum_diatomic", "angular_momentum_canonical"};

/// Whether `quantity` is a constant of motion for this field and potential,
/// given the trajectory's initial state. Drift of the others is physics.
bool expectedConserved(const std::string& quantity, const GaugeField& field,
                       const std::optional<ScalarPotential>& potential, const ParticleState& initial);

/// Drift of every standard quantity against its t = 0 value. Relative drift
/// uses max(|value_0|, 1e-12) as denominator (vector norms for vectors).
DriftReport evaluateStandardSet(const Trajectory& trajectory, const GaugeField& field,
                                const std::optional<ScalarPotential>& potential, double tolerance = 1e-7);
DriftReport evaluateStandardSet(const Trajectory& trajectory, double tolerance = 1e-7);

nlohmann::json toJson(const DriftReport& report);

// ---------------------------------------------------------------------------
// van Holten constraint ladder

/// Candidate constant q = C + C_i pi_i + 1/2 C_ij pi_i pi_j with coefficients
/// depending on (x, Q). Empty maps are zero.
struct CoefficientAnsatz {
  std::string name;
  std::function<double(const Vec3&, const Vec3&)> scalar;
  std::function<Vec3(const Vec3&, const Vec3&)> vector;
  std::function<Mat3(const Vec3&, const Vec3&)> tensor;

  /// Number of nonzero levels p in the truncated series.
  int truncationOrder() const { return tensor ? 3 : vector ? 2 : scalar ? 1 : 0; }
  /// The candidate as a phase function.
  double evaluate(const ParticleState& s) const;
};

/// V(x, Q); isospin-independent potentials simply ignore Q.
using IsospinPotential = std::function<double(const Vec3&, const Vec3&)>;

IsospinPotential noPotential();
/// V(|x|) with the scenario's constant q_param.
IsospinPotential fixedChargePotential(const ScalarPotential& v);
/// V with the inverse-square coefficient set by the local Q.xhat.
IsospinPotential correlatedPotential(const ScalarPotential& v);

namespace ansatz {

CoefficientAnsatz zero();
/// C = Q.xhat: covariantly constant on Wu-Yang.
CoefficientAnsatz radialCharge();
/// C = -q n.xhat, C_i = (n x x)_i: the component n.J.
CoefficientAnsatz rotation(const Vec3& n);
/// C = -n.Psi, C_i = (n x x)_i.
CoefficientAnsatz diatomicRotation(const Vec3& n, double kappa);
/// C = alpha n.xhat, C_i = (n x q xhat)_i, C_ij = 2 delta_ij n.x - (n_i x_j + n_j x_i).
CoefficientAnsatz rungeLenz(const Vec3& n, double alpha);

}  // namespace ansatz

/// One ladder equation: order k collects the pi^k terms of {q, H}.
struct LadderOrder {
  int order = 0;
  double maxResidual = 0.0;
  bool pass = true;
};

struct VanHoltenReport {
  std::string ansatz;
  std::string field;
  std::size_t samples = 0;
  double tolerance = 1e-6;
  std::vector<LadderOrder> orders;  // orders 0..3

  bool pass() const;
  /// Lowest failing order, or -1.
  int firstFailingOrder() const;
};

struct SamplePoint {
  Vec3 x;
  Vec3 Q;
};

/// Halton quasi-random points with r in [rMin, rMax] and isospin on the unit sphere.
std::vector<SamplePoint> shellSamples(int count = 64, double rMin = 0.5, double rMax = 5.0);

/// Evaluates the generalized constraints
///   order 0: C_i D_i V + Q.(dC/dQ x dV/dQ)                              = 0
///   order 1: D_i C - Q^a F^a_ij C_j - C_ij D_j V - Q.(dC_i/dQ x dV/dQ)  = 0
///   order 2: D_(i C_j) - Q^a (F^a_ik C_kj + F^a_jk C_ki) - Q.(dC_ij/dQ x dV/dQ) = 0
///   order 3: D_i C_jk + D_j C_ki + D_k C_ij                             = 0
/// at every sample and reports the max-abs residual per order.
VanHoltenReport vanHoltenCheck(const CoefficientAnsatz& ansatz, const GaugeField& field,
                               const IsospinPotential& potential, std::span<const SamplePoint> samples,
                               double tolerance = 1e-6);

nlohmann::json toJson(const VanHoltenReport& report);

/// max over grid of |d_i C_j + d_j C_i| (flat space).
double killingVectorCheck(const std::function<Vec3(const Vec3&)>& c, std::span<const Vec3> grid,
                          double h = kPhaseStep);
/// max over grid of |d_i C_jk + d_j C_ki + d_k C_ij|.
double killingTensorCheck(const std::function<Mat3(const Vec3&)>& c, std::span<const Vec3> grid,
                          double h = kPhaseStep);

}  // namespace isodyn
