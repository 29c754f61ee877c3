#include "isodyn/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "isodyn/errors.hpp"

namespace isodyn {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kKnownKeys{
    {"scenario", {"name", "command", "expect_exit", "seed"}},
    {"field", {"kind", "kappa", "strength", "gauge_axis", "gauge_gradient", "gauge_curvature"}},
    {"potential", {"q_param", "alpha", "beta"}},
    {"initial", {"t", "x", "pi", "Q"}},
    {"integrator", {"method", "h", "t_end", "tol_abs", "tol_rel", "sample_every"}},
    {"outputs", {"trajectory", "drift", "cone", "conic", "svg", "format", "drift_tolerance"}},
    {"kk", {"potential", "strength", "charge", "x", "v", "tau_end", "step", "sample_every", "christoffel_step"}},
    {"ansatz", {"name", "axis", "alpha", "beta", "q_param", "potential", "samples", "r_min", "r_max"}},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double parseNumber(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ValidationError(key + ": '" + t + "' is not a number");
  }
  if (used != t.size()) throw ValidationError(key + ": '" + t + "' is not a number");
  if (!std::isfinite(v)) throw ValidationError(key + " must be finite");
  return v;
}

Vec3 parseVector(const std::string& text, const std::string& key) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(parseNumber(item, key));
  if (parts.size() != 3) throw ValidationError(key + " needs three comma-separated numbers");
  return {parts[0], parts[1], parts[2]};
}

bool parseBool(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ValidationError(key + ": expected true or false, got '" + t + "'");
}

// Typed reads from one INI section.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool present() const { return tree_ != nullptr; }
  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? trim(tree_->get<std::string>(key)) : fallback;
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? parseNumber(tree_->get<std::string>(key), qualified(key)) : fallback;
  }
  int integer(const std::string& key, int fallback) const {
    const double v = number(key, fallback);
    if (v != std::floor(v)) throw ValidationError(qualified(key) + " must be an integer");
    return static_cast<int>(v);
  }
  Vec3 vector(const std::string& key, const Vec3& fallback) const {
    return has(key) ? parseVector(tree_->get<std::string>(key), qualified(key)) : fallback;
  }
  bool flag(const std::string& key, bool fallback) const {
    return has(key) ? parseBool(tree_->get<std::string>(key), qualified(key)) : fallback;
  }

 private:
  std::string qualified(const std::string& key) const { return "[" + name_ + "] " + key; }

  const pt::ptree* tree_;
  std::string name_;
};

Section section(const pt::ptree& root, const std::string& name) {
  const auto child = root.get_child_optional(name);
  return {child ? &*child : nullptr, name};
}

void rejectUnknownKeys(const pt::ptree& root) {
  for (const auto& [sec, body] : root) {
    const auto known = kKnownKeys.find(sec);
    if (known == kKnownKeys.end()) throw ValidationError("unknown section [" + sec + "]");
    for (const auto& [key, value] : body)
      if (!known->second.contains(key)) throw ValidationError("unknown key '" + key + "' in [" + sec + "]");
  }
}

}  // namespace

GaugeField FieldSpec::build() const {
  if (kind == "wu-yang") return GaugeField::wuYang();
  if (kind == "diatomic") return GaugeField::diatomic(kappa);
  if (kind == "vacuum") return GaugeField::vacuum();
  if (kind == "pure-gauge") {
    if (gaugeAxis.norm() == 0.0) throw ValidationError("[field] gauge_axis must be nonzero");
    return GaugeField::pureGauge(GaugeFunction::fixedAxis(gaugeAxis.normalized(), gaugeGradient, gaugeCurvature));
  }
  if (kind == "dirac-monopole") return GaugeField::diracMonopole(strength);
  if (kind == "uniform-magnetic") return GaugeField::uniformMagnetic(strength);
  throw ValidationError("[field] kind '" + kind +
                        "' is not one of wu-yang, diatomic, vacuum, pure-gauge, dirac-monopole, uniform-magnetic");
}

kk::AbelianPotential KKSpec::build() const {
  if (potential == "zero") return kk::AbelianPotential::zero();
  if (potential == "uniform-magnetic") return kk::AbelianPotential::uniformMagnetic(strength);
  if (potential == "dirac-monopole") return kk::AbelianPotential::diracMonopole(strength);
  throw ValidationError("[kk] potential '" + potential + "' is not one of zero, uniform-magnetic, dirac-monopole");
}

Scenario parseScenario(std::istream& in, const std::string& name) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("malformed scenario file: ") + e.what());
  }
  rejectUnknownKeys(root);

  Scenario s;
  const Section meta = section(root, "scenario");
  s.name = meta.text("name", name);
  s.command = meta.text("command", "simulate");
  s.expectExit = meta.integer("expect_exit", 0);
  const double seed = meta.number("seed", 1.0);
  if (seed < 0.0 || seed != std::floor(seed)) throw ValidationError("[scenario] seed must be a non-negative integer");
  s.seed = static_cast<std::uint64_t>(seed);

  const Section field = section(root, "field");
  s.fieldSpec.kind = field.text("kind", "wu-yang");
  s.fieldSpec.kappa = field.number("kappa", 0.0);
  s.fieldSpec.strength = field.number("strength", 1.0);
  s.fieldSpec.gaugeAxis = field.vector("gauge_axis", Vec3::UnitZ());
  s.fieldSpec.gaugeGradient = field.vector("gauge_gradient", Vec3::Zero());
  s.fieldSpec.gaugeCurvature = field.number("gauge_curvature", 0.0);

  const Section potential = section(root, "potential");
  if (potential.present())
    s.potential = ScalarPotential{potential.number("q_param", 0.0), potential.number("alpha", 0.0),
                                  potential.number("beta", 0.0)};

  const Section initial = section(root, "initial");
  s.initial.t = initial.number("t", 0.0);
  s.initial.x = initial.vector("x", Vec3::UnitX());
  s.initial.pi = initial.vector("pi", Vec3::Zero());
  s.initial.Q = initial.vector("Q", Vec3::UnitZ());

  const Section integ = section(root, "integrator");
  const std::string method = integ.text("method", "rk4");
  if (method == "rk4")
    s.integrator.method = Method::RK4;
  else if (method == "rk45")
    s.integrator.method = Method::RK45;
  else
    throw ValidationError("[integrator] method must be rk4 or rk45");
  s.integrator.step = integ.number("h", 1e-3);
  s.integrator.tEnd = integ.number("t_end", 10.0);
  s.integrator.tolAbs = integ.number("tol_abs", 1e-10);
  s.integrator.tolRel = integ.number("tol_rel", 1e-10);
  s.integrator.sampleEvery = integ.integer("sample_every", 1);

  const Section out = section(root, "outputs");
  s.outputs.trajectory = out.flag("trajectory", true);
  s.outputs.drift = out.flag("drift", true);
  s.outputs.cone = out.flag("cone", false);
  s.outputs.conic = out.flag("conic", false);
  s.outputs.svg = out.flag("svg", false);
  s.outputs.format = out.text("format", "csv");
  s.outputs.driftTolerance = out.number("drift_tolerance", 1e-7);

  const Section kks = section(root, "kk");
  if (kks.present()) {
    KKSpec k;
    k.potential = kks.text("potential", "uniform-magnetic");
    k.strength = kks.number("strength", 1.0);
    k.charge = kks.number("charge", 1.0);
    k.x = kks.vector("x", Vec3::UnitX());
    k.velocity = kks.vector("v", Vec3::UnitY());
    k.geodesic.tauEnd = kks.number("tau_end", 20.0);
    k.geodesic.step = kks.number("step", 1e-3);
    k.geodesic.sampleEvery = kks.integer("sample_every", 1);
    k.geodesic.christoffelStep = kks.number("christoffel_step", 1e-5);
    s.kk = k;
  }

  const Section ans = section(root, "ansatz");
  if (ans.present()) {
    AnsatzSpec a;
    a.name = ans.text("name", "rotation");
    a.axis = ans.vector("axis", Vec3::UnitZ());
    a.alpha = ans.number("alpha", -1.0);
    a.beta = ans.number("beta", 0.0);
    a.qParam = ans.number("q_param", 1.0);
    a.potential = ans.text("potential", "correlated");
    a.samples = ans.integer("samples", 64);
    a.rMin = ans.number("r_min", 0.5);
    a.rMax = ans.number("r_max", 5.0);
    s.ansatz = a;
  }

  s.field = s.fieldSpec.build();
  validate(s);
  return s;
}

Scenario loadScenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot read scenario file " + file.string());
  return parseScenario(in, file.stem().string());
}

ScenarioHeader peekScenarioHeader(const std::filesystem::path& file) {
  ScenarioHeader h;
  try {
    pt::ptree root;
    pt::read_ini(file.string(), root);
    h.command = root.get<std::string>("scenario.command", h.command);
    h.expectExit = root.get<int>("scenario.expect_exit", h.expectExit);
  } catch (const pt::ptree_error&) {
    // Unreadable headers keep the defaults; the command reports the error.
  }
  return h;
}

void validate(Scenario& s) {
  static const std::set<std::string> commands{"simulate", "gauge-test", "kk-compare", "killing-check"};
  if (!commands.contains(s.command))
    throw ValidationError("[scenario] command must be simulate, gauge-test, kk-compare or killing-check");
  if (s.expectExit != 0 && s.expectExit != 2 && s.expectExit != 3 && s.expectExit != 4)
    throw ValidationError("[scenario] expect_exit must be 0, 2, 3 or 4");
  if (s.outputs.format != "csv" && s.outputs.format != "json")
    throw ValidationError("[outputs] format must be csv or json");
  if (!(s.outputs.driftTolerance > 0.0)) throw ValidationError("[outputs] drift_tolerance must be > 0");

  s.integrator.validate();
  if (!(s.integrator.tEnd > s.initial.t)) throw ValidationError("[integrator] t_end must exceed [initial] t");

  const Vec3& x = s.initial.x;
  if (s.field.singularAtOrigin() && x.norm() <= kGuardRadius)
    throw ValidationError("[initial] x lies inside the guard radius |x| <= 1e-6 around the singular origin of the " +
                          s.field.name() + " field");
  if (s.field.kind() == FieldKind::DiracMonopole && x.norm() + x.z() <= kGuardRadius)
    throw ValidationError("[initial] x lies on the Dirac string (negative z axis) of the monopole patch");

  if (s.potential) {
    const FieldKind k = s.field.kind();
    const bool monopole = k == FieldKind::WuYang || k == FieldKind::Diatomic || k == FieldKind::DiracMonopole;
    if (monopole && x.norm() > kGuardRadius) {
      const double q0 = s.field.radialCharge(x, s.initial.Q);
      const double qp = s.potential->qParam;
      if (std::abs(qp * qp - q0 * q0) > 1e-9 * std::max(1.0, q0 * q0))
        s.warnings.push_back("[potential] q_param = " + std::to_string(qp) +
                             " does not match the initial charge q = " + std::to_string(q0) +
                             "; the Runge-Lenz vector is not expected to be conserved");
    }
  }

  if (s.kk) {
    const KKSpec& k = *s.kk;
    if (!(k.geodesic.step > 0.0) || !(k.geodesic.tauEnd > 0.0))
      throw ValidationError("[kk] step and tau_end must be > 0");
    if (k.geodesic.sampleEvery < 1) throw ValidationError("[kk] sample_every must be >= 1");
    if (!(k.geodesic.christoffelStep > 0.0)) throw ValidationError("[kk] christoffel_step must be > 0");
    if (k.potential == "dirac-monopole" && k.x.norm() + k.x.z() <= kGuardRadius)
      throw ValidationError("[kk] x lies on the Dirac string or inside the guard radius");
    (void)k.build();
  }

  if (s.ansatz) {
    const AnsatzSpec& a = *s.ansatz;
    static const std::set<std::string> names{"rotation", "radial-charge", "runge-lenz", "diatomic-rotation"};
    if (!names.contains(a.name))
      throw ValidationError("[ansatz] name '" + a.name +
                            "' is not one of rotation, radial-charge, runge-lenz, diatomic-rotation");
    if (a.potential != "correlated" && a.potential != "fixed" && a.potential != "none")
      throw ValidationError("[ansatz] potential must be correlated, fixed or none");
    if (a.samples < 1) throw ValidationError("[ansatz] samples must be >= 1");
    if (!(a.rMin > kGuardRadius) || !(a.rMax >= a.rMin)) throw ValidationError("[ansatz] need 1e-6 < r_min <= r_max");
    if (a.axis.norm() == 0.0) throw ValidationError("[ansatz] axis must be nonzero");
  }
}

}  // namespace isodyn
