#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "isodyn/conservation.hpp"
#include "isodyn/scenario.hpp"

namespace isodyn {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 2;
inline constexpr int singular = 3;
inline constexpr int internal = 4;
}  // namespace exit_code

struct CommandOptions {
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;  // overrides [outputs] format
  bool svg = false;                   // forces SVG output
  std::ostream* log = nullptr;        // human-readable summary; stdout when null
  std::ostream* err = nullptr;        // diagnostics; stderr when null
};

/// Integrates a scenario and writes <name>_trajectory.{csv,json},
/// <name>_drift.json and, when requested, <name>_conic.json / <name>_orbit.svg.
/// Singular runs still write the partial trajectory and return exit_code::singular.
int cmdSimulate(const std::filesystem::path& scenario, const CommandOptions& opts);

/// Gauge-covariance experiment with a seeded random gauge function (seed 0 is
/// the identity). Writes <name>_gauge.json.
int cmdGaugeTest(const std::filesystem::path& scenario, const CommandOptions& opts);

/// 5D geodesic versus 4D Lorentz force. Uses the [kk] section, or maps an
/// Abelian [field] onto a potential; non-Abelian fields are rejected.
int cmdKKCompare(const std::filesystem::path& scenario, const CommandOptions& opts);

/// Built-in field/potential pairing for a named ansatz, optionally on another field.
struct KillingRequest {
  std::string ansatz;                  // built-in name, or a path to an INI file
  std::optional<std::string> field;    // field kind override for built-ins
  std::optional<double> kappa;
};
int cmdKillingCheck(const KillingRequest& request, const CommandOptions& opts);

/// Runs every *.ini file in `directory` concurrently with the command named in
/// its [scenario] section. Succeeds when every file exits with its expect_exit.
int cmdBatch(const std::filesystem::path& directory, const CommandOptions& opts);

/// The van Holten report for one ansatz spec on a field (library form of killing-check).
VanHoltenReport runAnsatz(const AnsatzSpec& spec, const GaugeField& field);

}  // namespace isodyn
