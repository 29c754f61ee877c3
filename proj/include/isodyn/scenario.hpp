#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "isodyn/dynamics.hpp"
#include "isodyn/kaluza_klein.hpp"

namespace isodyn {

/// Field section of a scenario file.
struct FieldSpec {
  std::string kind = "wu-yang";  // wu-yang | diatomic | vacuum | pure-gauge | dirac-monopole | uniform-magnetic
  double kappa = 0.0;
  double strength = 1.0;
  // pure-gauge: phi(x) = (k.x + c |x|^2) n
  Vec3 gaugeAxis = Vec3::UnitZ();
  Vec3 gaugeGradient = Vec3::Zero();
  double gaugeCurvature = 0.0;

  GaugeField build() const;
};

struct OutputSpec {
  bool trajectory = true;
  bool drift = true;
  bool cone = false;
  bool conic = false;
  bool svg = false;
  std::string format = "csv";  // trajectory format: csv | json
  double driftTolerance = 1e-7;
};

/// [kk] section: a charged particle in an Abelian potential, run as a 5D geodesic.
struct KKSpec {
  std::string potential = "uniform-magnetic";  // zero | uniform-magnetic | dirac-monopole
  double strength = 1.0;
  double charge = 1.0;
  Vec3 x = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  kk::GeodesicConfig geodesic;

  kk::AbelianPotential build() const;
};

/// [ansatz] section used by killing-check files.
struct AnsatzSpec {
  std::string name = "rotation";  // rotation | radial-charge | runge-lenz | diatomic-rotation
  Vec3 axis = Vec3::UnitZ();
  double alpha = -1.0;
  double beta = 0.0;
  double qParam = 1.0;                   // inverse-square coefficient of the fixed form
  std::string potential = "correlated";  // correlated | fixed | none
  int samples = 64;
  double rMin = 0.5;
  double rMax = 5.0;
};

/// A validated run description loaded from an INI file.
struct Scenario {
  std::string name;
  std::string command = "simulate";  // what `batch` runs for this file
  int expectExit = 0;                // exit code `batch` treats as success
  std::uint64_t seed = 1;
  FieldSpec fieldSpec;
  GaugeField field = GaugeField::wuYang();
  std::optional<ScalarPotential> potential;
  ParticleState initial;
  IntegratorConfig integrator;
  OutputSpec outputs;
  std::optional<KKSpec> kk;
  std::optional<AnsatzSpec> ansatz;
  std::vector<std::string> warnings;
};

/// Parses INI text (sections [scenario] [field] [potential] [initial]
/// [integrator] [outputs] [kk] [ansatz]; vectors as comma-separated numbers)
/// and validates it. Throws ValidationError with a message naming the rule.
Scenario parseScenario(std::istream& in, const std::string& name);
Scenario loadScenario(const std::filesystem::path& file);

/// The [scenario] command and expect_exit of a file, read without validating
/// the rest (so batch runs know what to expect from files that fail validation).
struct ScenarioHeader {
  std::string command = "simulate";
  int expectExit = 0;
};
ScenarioHeader peekScenarioHeader(const std::filesystem::path& file);

/// Guard radius, finiteness and positivity rules; appends non-fatal warnings
/// (such as a q_param that does not match the initial charge).
void validate(Scenario& scenario);

}  // namespace isodyn
