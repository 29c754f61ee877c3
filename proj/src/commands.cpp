#include "isodyn/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <vector>

#include "isodyn/analysis.hpp"
#include "isodyn/errors.hpp"

namespace isodyn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ostream& logStream(const CommandOptions& o) { return o.log ? *o.log : std::cout; }
std::ostream& errStream(const CommandOptions& o) { return o.err ? *o.err : std::cerr; }

// Maps the library's exception types onto exit codes.
template <class F>
int guarded(const CommandOptions& opts, F&& body) {
  std::ostream& err = errStream(opts);
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return exit_code::validation;
  } catch (const DegenerateCharge& e) {
    err << "validation error: " << e.what() << '\n';
    return exit_code::validation;
  } catch (const SingularPoint& e) {
    err << "singular trajectory: " << e.what() << '\n';
    return exit_code::singular;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_code::internal;
  }
}

std::ofstream openOutput(const fs::path& file) {
  fs::create_directories(file.parent_path().empty() ? fs::path(".") : file.parent_path());
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  return os;
}

void writeJson(const fs::path& file, const json& j) { openOutput(file) << j.dump(2) << '\n'; }

Scenario load(const fs::path& file, const CommandOptions& opts) {
  Scenario s = loadScenario(file);
  if (opts.format) {
    if (*opts.format != "csv" && *opts.format != "json") throw ValidationError("--format must be csv or json");
    s.outputs.format = *opts.format;
  }
  if (opts.svg) s.outputs.svg = true;
  for (const auto& w : s.warnings) errStream(opts) << "warning: " << w << '\n';
  return s;
}

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

bool terminatedAbnormally(Termination t) { return t != Termination::Completed; }

}  // namespace

int cmdSimulate(const fs::path& scenarioFile, const CommandOptions& opts) {
  return guarded(opts, [&] {
    const Scenario s = load(scenarioFile, opts);
    std::ostream& log = logStream(opts);
    const Trajectory traj = integrate(s.initial, s.field, s.potential, s.integrator);
    const fs::path base = opts.out / s.name;

    if (s.outputs.trajectory) {
      if (s.outputs.format == "json") {
        auto os = openOutput(base.string() + "_trajectory.json");
        writeTrajectoryJson(os, traj);
      } else {
        auto os = openOutput(base.string() + "_trajectory.csv");
        writeTrajectoryCsv(os, traj);
      }
    }

    log << s.name << ": " << s.field.name() << ", " << traj.samples.size() << " samples, "
        << toString(traj.termination) << '\n';

    if (s.outputs.drift && traj.samples.size() > 1) {
      const DriftReport drift = evaluateStandardSet(traj, s.outputs.driftTolerance);
      json j = toJson(drift);
      j["scenario"] = s.name;
      j["termination"] = toString(traj.termination);
      writeJson(base.string() + "_drift.json", j);
      for (const auto& e : drift.entries)
        log << "  " << e.quantity << (e.expectedConserved ? " (conserved)" : "") << ": max rel drift "
            << e.maxRelDrift << (e.pass ? "" : "  FAIL") << '\n';
      log << "  drift report: " << (drift.allPass() ? "all pass" : "FAILED") << '\n';
    }

    std::optional<ConicReport> conic;
    if ((s.outputs.cone || s.outputs.conic) && traj.samples.size() > 1) {
      json j;
      j["scenario"] = s.name;
      if (s.outputs.cone) {
        const ConeReport cone = coneCheck(traj);
        j["cone"] = toJson(cone);
        if (cone.applicable)
          log << "  cone: half-angle " << cone.expectedAngle << " rad, max deviation " << cone.maxExpectedDeviation
              << " rad\n";
        else
          log << "  cone: " << cone.reason << '\n';
      }
      if (s.outputs.conic) {
        try {
          conic = planeAndConic(traj);
          j["conic"] = toJson(*conic);
          log << "  plane: max off-plane " << conic->maxOffPlaneDistance << "; conic " << toString(conic->conic.type)
              << ", residual " << conic->conic.residual << ", e = " << conic->conic.eccentricity << '\n';
        } catch (const DegenerateCharge& e) {
          j["conic"] = {{"error", e.what()}};
          log << "  conic: " << e.what() << '\n';
        }
      }
      writeJson(base.string() + "_analysis.json", j);
    }

    if (s.outputs.svg && !traj.samples.empty()) {
      auto os = openOutput(base.string() + "_orbit.svg");
      if (conic)
        writeOrbitSvg(os, *conic);
      else
        writeProjectionSvg(os, traj);
    }

    if (terminatedAbnormally(traj.termination)) {
      errStream(opts) << "singular trajectory: " << traj.terminationDetail << " (partial trajectory written)\n";
      return exit_code::singular;
    }
    return exit_code::ok;
  });
}

int cmdGaugeTest(const fs::path& scenarioFile, const CommandOptions& opts) {
  return guarded(opts, [&] {
    const Scenario s = load(scenarioFile, opts);
    const std::uint64_t seed = opts.seed.value_or(s.seed);
    const GaugeFunction g = seed == 0 ? GaugeFunction::identity() : GaugeFunction::random(seed);
    const GaugeCovarianceReport r = gaugeCovarianceExperiment(s.initial, s.field, s.potential, s.integrator, g);

    json j = toJson(r);
    j["scenario"] = s.name;
    j["seed"] = seed;
    j["positionPass"] = r.maxPositionDeviation < 1e-7;
    j["isospinPass"] = r.maxIsospinDeviation < 1e-6;
    writeJson(opts.out / (s.name + "_gauge.json"), j);
    logStream(opts) << s.name << ": gauge " << r.gauge << ", max |dx| = " << r.maxPositionDeviation
                    << ", max |Q' - R Q| = " << r.maxIsospinDeviation << '\n';
    if (terminatedAbnormally(r.original) || terminatedAbnormally(r.transformed)) return exit_code::singular;
    return exit_code::ok;
  });
}

int cmdKKCompare(const fs::path& scenarioFile, const CommandOptions& opts) {
  return guarded(opts, [&] {
    const Scenario s = load(scenarioFile, opts);
    KKSpec spec;
    if (s.kk) {
      spec = *s.kk;
    } else {
      switch (s.field.kind()) {
        case FieldKind::Vacuum: spec.potential = "zero"; break;
        case FieldKind::UniformMagnetic: spec.potential = "uniform-magnetic"; break;
        case FieldKind::DiracMonopole: spec.potential = "dirac-monopole"; break;
        default:
          throw ValidationError("kk-compare needs an Abelian field (vacuum, uniform-magnetic, dirac-monopole); got " +
                                s.field.name());
      }
      spec.strength = s.field.strength();
      spec.x = s.initial.x;
      spec.velocity = s.initial.pi;
      spec.geodesic.tauEnd = s.integrator.tEnd;
      spec.geodesic.step = s.integrator.step;
      spec.geodesic.sampleEvery = s.integrator.sampleEvery;
    }

    const kk::FiveMetric metric(spec.build());
    const kk::FiveState initial = kk::initialState(metric, spec.x, spec.velocity, spec.charge);
    const kk::LorentzComparison cmp = kk::lorentzCompare(metric, initial, spec.geodesic);

    json j;
    j["scenario"] = s.name;
    j["potential"] = spec.potential;
    j["charge"] = cmp.charge;
    j["maxDeviation"] = cmp.maxDeviation;
    j["qDrift"] = cmp.qDrift;
    j["normDrift"] = cmp.normDrift;
    std::ostream& log = logStream(opts);
    log << s.name << ": " << spec.potential << ", max |x5D - x4D| = " << cmp.maxDeviation
        << ", charge drift = " << cmp.qDrift << '\n';

    const double qb = spec.charge * spec.strength;
    if (spec.potential == "uniform-magnetic" && qb != 0.0) {
      // Guiding centre c = x - zhat x v_perp / (qB); radius |v_perp| / |qB|.
      const Vec3 vPerp(spec.velocity.x(), spec.velocity.y(), 0.0);
      const double radius = vPerp.norm() / std::abs(qb);
      const Vec3 centre = Vec3(spec.x.x(), spec.x.y(), 0.0) - Vec3::UnitZ().cross(vPerp) / qb;
      double worst = 0.0;
      for (const auto& g : cmp.geodesic) {
        const Vec3 p(g.X(1), g.X(2), 0.0);
        worst = std::max(worst, std::abs((p - centre).norm() - radius));
      }
      j["cyclotron"] = {{"analyticRadius", radius}, {"maxRadiusDeviation", worst}, {"centre", vec(centre)}};
      log << "  cyclotron radius " << radius << ", max deviation " << worst << '\n';
    }
    if (spec.potential == "dirac-monopole") {
      // Cone cross-check: J = x x v - q g xhat is conserved and J.xhat = -q g.
      const double qg = qb;
      auto angularMomentum = [&](const kk::FiveState& st) {
        const Vec3 x = st.X.segment<3>(1), v = st.U.segment<3>(1);
        return Vec3(x.cross(v) - qg * x.normalized());
      };
      const Vec3 J0 = angularMomentum(cmp.geodesic.front());
      const double expected = std::atan2(std::sqrt(std::max(0.0, J0.squaredNorm() - qg * qg)), -qg);
      double worst = 0.0;
      for (const auto& st : cmp.geodesic) {
        const Vec3 x = st.X.segment<3>(1);
        worst = std::max(worst, std::abs(std::atan2(J0.cross(x).norm(), J0.dot(x)) - expected));
      }
      j["cone"] = {{"expectedAngle", expected}, {"maxDeviation", worst}};
      log << "  cone half-angle " << expected << ", max deviation " << worst << " rad\n";
    }

    writeJson(opts.out / (s.name + "_kk.json"), j);
    auto os = openOutput(opts.out / (s.name + "_geodesic.csv"));
    kk::writeGeodesicCsv(os, cmp.geodesic);
    return exit_code::ok;
  });
}

VanHoltenReport runAnsatz(const AnsatzSpec& spec, const GaugeField& field) {
  const Vec3 n = spec.axis.normalized();
  CoefficientAnsatz c;
  if (spec.name == "rotation")
    c = ansatz::rotation(n);
  else if (spec.name == "radial-charge")
    c = ansatz::radialCharge();
  else if (spec.name == "runge-lenz")
    c = ansatz::rungeLenz(n, spec.alpha);
  else if (spec.name == "diatomic-rotation")
    c = ansatz::diatomicRotation(n, field.kappa());
  else
    throw ValidationError("unknown ansatz '" + spec.name +
                          "'; expected rotation, radial-charge, runge-lenz or diatomic-rotation");

  IsospinPotential v;
  const ScalarPotential scalar{spec.qParam, spec.alpha, spec.beta};
  if (spec.potential == "correlated")
    v = correlatedPotential(scalar);
  else if (spec.potential == "fixed")
    v = fixedChargePotential(scalar);
  else
    v = noPotential();

  const auto samples = shellSamples(spec.samples, spec.rMin, spec.rMax);
  return vanHoltenCheck(c, field, v, samples);
}

int cmdKillingCheck(const KillingRequest& request, const CommandOptions& opts) {
  return guarded(opts, [&] {
    AnsatzSpec spec;
    GaugeField field = GaugeField::wuYang();
    std::string label;

    const fs::path asFile(request.ansatz);
    if (asFile.extension() == ".ini" || fs::is_regular_file(asFile)) {
      const Scenario s = load(asFile, opts);
      if (!s.ansatz) throw ValidationError(asFile.string() + " has no [ansatz] section");
      spec = *s.ansatz;
      field = s.field;
      label = s.name;
    } else {
      spec.name = request.ansatz;
      FieldSpec fieldSpec;
      if (spec.name == "diatomic-rotation") {
        fieldSpec.kind = "diatomic";
        fieldSpec.kappa = 0.5;
        spec.potential = "none";
      } else if (spec.name != "rotation" && spec.name != "radial-charge" && spec.name != "runge-lenz") {
        throw ValidationError("unknown ansatz '" + spec.name +
                              "'; expected rotation, radial-charge, runge-lenz or diatomic-rotation");
      }
      if (request.field) fieldSpec.kind = *request.field;
      if (request.kappa) fieldSpec.kappa = *request.kappa;
      field = fieldSpec.build();
      label = spec.name + "_" + fieldSpec.kind;
    }

    const VanHoltenReport report = runAnsatz(spec, field);
    json j = toJson(report);
    j["potential"] = spec.potential;

    // Flat-space Killing condition on the highest coefficient at fixed isospin.
    const auto samples = shellSamples(spec.samples, spec.rMin, spec.rMax);
    const Vec3 n = spec.axis.normalized();
    double killing = 0.0;
    std::string killingKind = "none";
    for (const auto& [x, Q] : samples) {
      const std::array<Vec3, 1> grid{x};
      const Vec3 isospin = Q;
      if (spec.name == "runge-lenz") {
        killingKind = "tensor";
        const auto c = ansatz::rungeLenz(n, spec.alpha);
        killing = std::max(killing, killingTensorCheck([&](const Vec3& y) { return c.tensor(y, isospin); }, grid));
      } else if (spec.name == "rotation" || spec.name == "diatomic-rotation") {
        killingKind = "vector";
        const auto c = ansatz::rotation(n);
        killing = std::max(killing, killingVectorCheck([&](const Vec3& y) { return c.vector(y, isospin); }, grid));
      }
    }
    j["killing"] = {{"kind", killingKind}, {"maxResidual", killing}};
    writeJson(opts.out / (label + "_killing.json"), j);

    std::ostream& log = logStream(opts);
    log << report.ansatz << " on " << report.field << " (" << report.samples << " samples, V " << spec.potential
        << ")\n";
    for (const auto& o : report.orders)
      log << "  order " << o.order << ": max residual " << o.maxResidual << (o.pass ? "  pass" : "  FAIL") << '\n';
    if (killingKind != "none") log << "  Killing " << killingKind << " residual " << killing << '\n';
    log << "  " << (report.pass() ? "all orders pass" : "fails at order " + std::to_string(report.firstFailingOrder()))
        << '\n';
    return exit_code::ok;
  });
}

int cmdBatch(const fs::path& directory, const CommandOptions& opts) {
  if (!fs::is_directory(directory)) {
    errStream(opts) << "validation error: " << directory.string() << " is not a directory\n";
    return exit_code::validation;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory))
    if (entry.is_regular_file() && entry.path().extension() == ".ini") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    errStream(opts) << "validation error: no *.ini scenarios in " << directory.string() << '\n';
    return exit_code::validation;
  }

  struct Outcome {
    std::string command = "simulate";
    int expected = 0;
    int code = 0;
    std::string log, err;
  };

  auto run = [&opts](const fs::path& file) {
    Outcome o;
    std::ostringstream log, err;
    CommandOptions local = opts;
    local.log = &log;
    local.err = &err;
    const ScenarioHeader header = peekScenarioHeader(file);
    o.command = header.command;
    o.expected = header.expectExit;
    if (o.command == "gauge-test")
      o.code = cmdGaugeTest(file, local);
    else if (o.command == "kk-compare")
      o.code = cmdKKCompare(file, local);
    else if (o.command == "killing-check")
      o.code = cmdKillingCheck({file.string(), {}, {}}, local);
    else
      o.code = cmdSimulate(file, local);
    o.log = log.str();
    o.err = err.str();
    return o;
  };

  std::vector<std::future<Outcome>> jobs;
  jobs.reserve(files.size());
  for (const auto& f : files) jobs.push_back(std::async(std::launch::async, run, f));

  std::ostream& log = logStream(opts);
  json summary = json::array();
  int result = exit_code::ok;
  for (std::size_t k = 0; k < files.size(); ++k) {
    const Outcome o = jobs[k].get();
    const bool ok = o.code == o.expected;
    log << (ok ? "[ok]   " : "[FAIL] ") << files[k].filename().string() << " (" << o.command << ") exit " << o.code
        << ", expected " << o.expected << '\n'
        << o.log;
    if (!o.err.empty()) errStream(opts) << files[k].filename().string() << ": " << o.err;
    summary.push_back({{"file", files[k].filename().string()},
                       {"command", o.command},
                       {"exit", o.code},
                       {"expected", o.expected},
                       {"ok", ok}});
    if (!ok) result = std::max(result, o.code == exit_code::ok ? exit_code::internal : o.code);
  }
  writeJson(opts.out / "batch_summary.json", summary);
  return result;
}

}  // namespace isodyn
