#include "isodyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "isodyn/errors.hpp"
#include "json.hpp"

namespace isodyn {

namespace {

using Vec9 = Eigen::Matrix<double, 9, 1>;

Vec9 pack(const ParticleState& s) {
  Vec9 y;
  y << s.x, s.pi, s.Q;
  return y;
}

ParticleState unpack(double t, const Vec9& y) {
  return ParticleState{t, y.segment<3>(0), y.segment<3>(3), y.segment<3>(6)};
}

Vec9 rhs(double t, const Vec9& y, const GaugeField& field, const std::optional<ScalarPotential>& potential) {
  const StateDerivative d = derivatives(unpack(t, y), field, potential);
  Vec9 out;
  out << d.xDot, d.piDot, d.QDot;
  return out;
}

bool uniformSpacing(const std::vector<ParticleState>& s) {
  const double h = s[1].t - s[0].t;
  for (std::size_t k = 1; k + 1 < s.size(); ++k)
    if (std::abs((s[k + 1].t - s[k].t) - h) > 1e-9 * std::abs(h)) return false;
  return true;
}

void appendNumber(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("integrator step h must be > 0");
  if (!(tolAbs > 0.0) || !(tolRel > 0.0)) throw ValidationError("integrator tolerances must be > 0");
  if (!std::isfinite(tEnd)) throw ValidationError("t_end must be finite");
  if (sampleEvery < 1) throw ValidationError("sample_every must be >= 1");
}

std::string toString(Method m) { return m == Method::RK4 ? "rk4" : "rk45"; }

std::string toString(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::SingularTrajectory: return "singular-trajectory";
    case Termination::StepUnderflow: return "step-underflow";
  }
  return "unknown";
}

StateDerivative derivatives(const ParticleState& s, const GaugeField& field,
                            const std::optional<ScalarPotential>& potential) {
  StateDerivative d;
  d.xDot = s.pi;
  d.piDot = field.fieldStrengthAt(s.x).contracted(s.Q) * s.pi;
  if (potential) d.piDot -= potential->gradient(s.x);
  // A_i pi_i as an algebra element
  const Vec3 transport = field.potentialAt(s.x).transpose() * s.pi;
  d.QDot = transport.cross(s.Q);
  return d;
}

ParticleState rk4Step(const ParticleState& s, const GaugeField& field,
                      const std::optional<ScalarPotential>& potential, double h) {
  if (!(h > 0.0)) throw ValidationError("rk4Step needs h > 0");
  const Vec9 y = pack(s);
  const Vec9 k1 = rhs(s.t, y, field, potential);
  const Vec9 k2 = rhs(s.t + 0.5 * h, y + 0.5 * h * k1, field, potential);
  const Vec9 k3 = rhs(s.t + 0.5 * h, y + 0.5 * h * k2, field, potential);
  const Vec9 k4 = rhs(s.t + h, y + h * k3, field, potential);
  return unpack(s.t + h, y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

namespace {

void integrateFixed(Trajectory& traj, const ParticleState& initial) {
  const IntegratorConfig& cfg = traj.integrator;
  const double span = cfg.tEnd - initial.t;
  const auto steps = static_cast<long long>(std::ceil(span / cfg.step - 1e-9));
  ParticleState s = initial;
  for (long long k = 1; k <= steps; ++k) {
    const double h = (k == steps) ? cfg.tEnd - s.t : cfg.step;
    ParticleState next = rk4Step(s, traj.field, traj.potential, h);
    next.t = (k == steps) ? cfg.tEnd : initial.t + static_cast<double>(k) * cfg.step;
    if (!pack(next).allFinite()) throw SingularPoint("state became non-finite");
    s = next;
    if (k % cfg.sampleEvery == 0 || k == steps) traj.samples.push_back(s);
  }
}

// Dormand-Prince 5(4) with PI step control.
void integrateAdaptive(Trajectory& traj, const ParticleState& initial) {
  const IntegratorConfig& cfg = traj.integrator;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double beta = 0.04, alpha = 0.2 - 0.75 * beta, safety = 0.9, facMin = 0.2, facMax = 10.0;
  constexpr double minStep = 1e-14;

  const auto& f = traj.field;
  const auto& v = traj.potential;
  double t = initial.t;
  Vec9 y = pack(initial);
  Vec9 k1 = rhs(t, y, f, v);
  double h = std::min(cfg.step, cfg.tEnd - t);
  double errOld = 1e-4;
  bool rejected = false;
  long long accepted = 0;

  while (t < cfg.tEnd) {
    if (h < minStep) {
      traj.termination = Termination::StepUnderflow;
      traj.terminationDetail = "adaptive step fell below 1e-14 at t = " + std::to_string(t);
      return;
    }
    const bool last = t + h >= cfg.tEnd;
    if (last) h = cfg.tEnd - t;
    const Vec9 k2 = rhs(t + c2 * h, y + h * a21 * k1, f, v);
    const Vec9 k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2), f, v);
    const Vec9 k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), f, v);
    const Vec9 k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), f, v);
    const Vec9 k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), f, v);
    const Vec9 yNew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec9 k7 = rhs(t + h, yNew, f, v);
    const Vec9 errVec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (int i = 0; i < 9; ++i) {
      const double sc = cfg.tolAbs + cfg.tolRel * std::max(std::abs(y(i)), std::abs(yNew(i)));
      err += (errVec(i) / sc) * (errVec(i) / sc);
    }
    err = std::sqrt(err / 9.0);
    if (!yNew.allFinite()) throw SingularPoint("state became non-finite");
    // Overflow of the scaled error (absurdly tight tolerances) is a rejection.
    if (!std::isfinite(err)) err = std::numeric_limits<double>::max();

    if (err <= 1.0) {
      t = last ? cfg.tEnd : t + h;
      y = yNew;
      k1 = k7;
      ++accepted;
      if (accepted % cfg.sampleEvery == 0 || last) traj.samples.push_back(unpack(t, y));
      double fac = safety * std::pow(std::max(err, 1e-16), -alpha) * std::pow(errOld, beta);
      fac = std::clamp(fac, facMin, rejected ? 1.0 : facMax);
      errOld = std::max(err, 1e-4);
      rejected = false;
      if (!last) h *= fac;
    } else {
      h *= std::max(facMin, safety * std::pow(err, -0.2));
      rejected = true;
    }
  }
}

}  // namespace

Trajectory integrate(const ParticleState& initial, const GaugeField& field,
                     const std::optional<ScalarPotential>& potential, const IntegratorConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  traj.field = field;
  traj.potential = potential;
  traj.integrator = cfg;
  traj.samples.push_back(initial);
  try {
    if (cfg.method == Method::RK4)
      integrateFixed(traj, initial);
    else
      integrateAdaptive(traj, initial);
  } catch (const SingularPoint& e) {
    traj.termination = Termination::SingularTrajectory;
    traj.terminationDetail = e.what();
  }
  return traj;
}

std::vector<CovariantResidual> covariantDerivativeQ(const Trajectory& trajectory) {
  const auto& s = trajectory.samples;
  std::vector<CovariantResidual> out;
  if (s.size() < 3) return out;
  const bool uniform = uniformSpacing(s);
  const std::size_t n = s.size();
  out.reserve(n - 2);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    Vec3 qDot;
    const double h = s[k + 1].t - s[k].t;
    if (uniform && k >= 2 && k + 2 < n) {
      qDot = (-s[k + 2].Q + 8.0 * s[k + 1].Q - 8.0 * s[k - 1].Q + s[k - 2].Q) / (12.0 * h);
    } else if (uniform && n >= 5 && k == 1) {
      // Off-centre five-point stencils keep the end samples fourth order.
      qDot = (-3.0 * s[0].Q - 10.0 * s[1].Q + 18.0 * s[2].Q - 6.0 * s[3].Q + s[4].Q) / (12.0 * h);
    } else if (uniform && n >= 5 && k == n - 2) {
      qDot = (3.0 * s[n - 1].Q + 10.0 * s[n - 2].Q - 18.0 * s[n - 3].Q + 6.0 * s[n - 4].Q - s[n - 5].Q) / (12.0 * h);
    } else {
      const double h1 = s[k].t - s[k - 1].t;
      const double h2 = s[k + 1].t - s[k].t;
      qDot = (-h2 / (h1 * (h1 + h2))) * s[k - 1].Q + ((h2 - h1) / (h1 * h2)) * s[k].Q +
             (h1 / (h2 * (h1 + h2))) * s[k + 1].Q;
    }
    const Vec3 transport = trajectory.field.potentialAt(s[k].x).transpose() * s[k].pi;
    out.push_back({s[k].t, qDot - transport.cross(s[k].Q)});
  }
  return out;
}

void writeTrajectoryCsv(std::ostream& os, const Trajectory& trajectory) {
  os << "t,x1,x2,x3,pi1,pi2,pi3,Q1,Q2,Q3\n";
  std::string line;
  for (const auto& s : trajectory.samples) {
    line.clear();
    appendNumber(line, s.t);
    for (const Vec3* v : {&s.x, &s.pi, &s.Q})
      for (int i = 0; i < 3; ++i) {
        line += ',';
        appendNumber(line, (*v)(i));
      }
    line += '\n';
    os << line;
  }
}

void writeTrajectoryJson(std::ostream& os, const Trajectory& trajectory) {
  nlohmann::json j;
  j["field"] = trajectory.field.name();
  j["method"] = toString(trajectory.integrator.method);
  j["step"] = trajectory.integrator.step;
  j["termination"] = toString(trajectory.termination);
  auto& rows = j["samples"] = nlohmann::json::array();
  for (const auto& s : trajectory.samples)
    rows.push_back({s.t, s.x(0), s.x(1), s.x(2), s.pi(0), s.pi(1), s.pi(2), s.Q(0), s.Q(1), s.Q(2)});
  os << j.dump(1) << '\n';
}

}  // namespace isodyn
