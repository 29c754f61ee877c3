#include "isodyn/kaluza_klein.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/LU>

#include "isodyn/errors.hpp"

namespace isodyn::kk {

namespace {

const Mat4 kEta = Eigen::Vector4d(-1.0, 1.0, 1.0, 1.0).asDiagonal();

constexpr double kFieldStep = 1e-5;

double relativeDrift(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-12);
}

using Vec10 = Eigen::Matrix<double, 10, 1>;

Vec10 geodesicRhs(const FiveMetric& metric, const Vec10& y, double hg) {
  const Vec5 X = y.head<5>();
  const Vec5 U = y.tail<5>();
  const Christoffel gamma = christoffelAt(metric, X, hg);
  Vec10 out;
  out.head<5>() = U;
  for (int a = 0; a < 5; ++a) out(5 + a) = -U.dot(gamma[a] * U);
  return out;
}

using Vec8 = Eigen::Matrix<double, 8, 1>;

Vec8 lorentzRhs(const AbelianPotential& potential, double q, const Vec8& y) {
  const Vec4 x = y.head<4>();
  const Vec4 u = y.tail<4>();
  Vec8 out;
  out.head<4>() = u;
  // eta^{mu alpha} F_alpha_nu u^nu (eta is its own inverse)
  out.tail<4>() = q * (kEta * (potential.fieldStrengthAt(x) * u));
  return out;
}

void appendNumber(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

}  // namespace

AbelianPotential AbelianPotential::zero() {
  return {"zero", [](const Vec4&) { return Vec4::Zero().eval(); }, [](const Vec4&) { return Mat4::Zero().eval(); }};
}

AbelianPotential AbelianPotential::uniformMagnetic(double b) {
  return {"uniform-magnetic",
          [b](const Vec4& x) { return Vec4(0.0, -0.5 * b * x(2), 0.5 * b * x(1), 0.0); },
          [b](const Vec4&) {
            Mat4 f = Mat4::Zero();
            f(1, 2) = b;
            f(2, 1) = -b;
            return f;
          }};
}

AbelianPotential AbelianPotential::diracMonopole(double g) {
  return {"dirac-monopole",
          [g](const Vec4& x) {
            const double r = x.tail<3>().norm();
            if (r + x(3) <= 1e-6) throw SingularPoint("monopole patch evaluated on its string");
            const double s = g / (r * (r + x(3)));
            return Vec4(0.0, -s * x(2), s * x(1), 0.0);
          },
          [g](const Vec4& x) {
            const Vec3 p = x.tail<3>();
            const double r = p.norm();
            const Vec3 b = g * p / (r * r * r);
            // F_ij = eps_ijk B_k
            Mat4 f = Mat4::Zero();
            f.block<3, 3>(1, 1) = -su2::hat(b);
            return f;
          }};
}

AbelianPotential AbelianPotential::gaugeShifted(const AbelianPotential& base,
                                                std::function<Vec4(const Vec4&)> gradLambda) {
  AbelianPotential out;
  out.name = base.name + "+dLambda";
  out.covector = [a = base.covector, gradLambda](const Vec4& x) { return (a(x) + gradLambda(x)).eval(); };
  out.fieldStrength = base.fieldStrength;
  return out;
}

Mat4 AbelianPotential::fieldStrengthAt(const Vec4& x) const {
  if (fieldStrength) return fieldStrength(x);
  std::array<Vec4, 4> d;
  for (int m = 0; m < 4; ++m) {
    const Vec4 e = Vec4::Unit(m) * kFieldStep;
    d[m] = (covector(x + e) - covector(x - e)) / (2.0 * kFieldStep);
  }
  Mat4 f;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) f(m, n) = d[m](n) - d[n](m);
  return f;
}

Mat5 FiveMetric::at(const Vec5& X) const {
  const Vec4 a = potentialAt(X);
  Mat5 g;
  g.topLeftCorner<4, 4>() = kEta + a * a.transpose();
  g.topRightCorner<4, 1>() = a;
  g.bottomLeftCorner<1, 4>() = a.transpose();
  g(4, 4) = 1.0;
  return g;
}

Christoffel christoffelAt(const FiveMetric& metric, const Vec5& X, double hg) {
  if (!(hg > 0.0)) throw ValidationError("Christoffel step must be positive");
  std::array<Mat5, 5> dg;  // dg[c](a, b) = d_c g_ab
  for (int c = 0; c < 5; ++c) {
    const Vec5 e = Vec5::Unit(c) * hg;
    dg[c] = (metric.at(X + e) - metric.at(X - e)) / (2.0 * hg);
  }
  const Mat5 ginv = metric.at(X).inverse();
  Christoffel gamma;
  for (int a = 0; a < 5; ++a) {
    gamma[a].setZero();
    for (int b = 0; b < 5; ++b)
      for (int c = b; c < 5; ++c) {
        double s = 0.0;
        for (int d = 0; d < 5; ++d) s += ginv(a, d) * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
        gamma[a](b, c) = gamma[a](c, b) = 0.5 * s;
      }
  }
  return gamma;
}

std::vector<FiveState> geodesicIntegrate(const FiveMetric& metric, const FiveState& initial,
                                         const GeodesicConfig& cfg) {
  if (!(cfg.step > 0.0)) throw ValidationError("geodesic step must be positive");
  if (cfg.sampleEvery < 1) throw ValidationError("sample_every must be >= 1");
  std::vector<FiveState> out{initial};
  Vec10 y;
  y << initial.X, initial.U;
  const auto steps = static_cast<long long>(std::ceil((cfg.tauEnd - initial.tau) / cfg.step - 1e-9));
  const double hg = cfg.christoffelStep;
  double tau = initial.tau;
  for (long long k = 1; k <= steps; ++k) {
    const double h = (k == steps) ? cfg.tauEnd - tau : cfg.step;
    const Vec10 k1 = geodesicRhs(metric, y, hg);
    const Vec10 k2 = geodesicRhs(metric, y + 0.5 * h * k1, hg);
    const Vec10 k3 = geodesicRhs(metric, y + 0.5 * h * k2, hg);
    const Vec10 k4 = geodesicRhs(metric, y + h * k3, hg);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    tau = (k == steps) ? cfg.tauEnd : initial.tau + static_cast<double>(k) * cfg.step;
    if (k % cfg.sampleEvery == 0 || k == steps) out.push_back({tau, y.head<5>(), y.tail<5>()});
  }
  return out;
}

double chargeOf(const FiveMetric& metric, const FiveState& s) {
  return s.U(4) + metric.potentialAt(s.X).dot(s.U.head<4>());
}

double velocityNorm(const FiveMetric& metric, const FiveState& s) { return s.U.dot(metric.at(s.X) * s.U); }

FiveState initialState(const FiveMetric& metric, const Vec3& x, const Vec3& velocity, double charge) {
  FiveState s;
  s.X << 0.0, x, 0.0;
  s.U.head<4>() << 1.0, velocity;
  s.U(4) = charge - metric.potentialAt(s.X).dot(s.U.head<4>());
  return s;
}

LorentzComparison lorentzCompare(const FiveMetric& metric, const FiveState& initial, const GeodesicConfig& cfg) {
  LorentzComparison out;
  out.charge = chargeOf(metric, initial);
  out.geodesic = geodesicIntegrate(metric, initial, cfg);

  const double norm0 = velocityNorm(metric, initial);
  for (const auto& s : out.geodesic) {
    out.qDrift = std::max(out.qDrift, relativeDrift(chargeOf(metric, s), out.charge));
    out.normDrift = std::max(out.normDrift, relativeDrift(velocityNorm(metric, s), norm0));
  }

  // 4D Lorentz-force run on the same grid.
  const AbelianPotential& pot = metric.potential();
  Vec8 y;
  y << initial.X.head<4>(), initial.U.head<4>();
  out.lorentz.push_back(y.head<4>());
  const auto steps = static_cast<long long>(std::ceil((cfg.tauEnd - initial.tau) / cfg.step - 1e-9));
  double tau = initial.tau;
  const double q = out.charge;
  for (long long k = 1; k <= steps; ++k) {
    const double h = (k == steps) ? cfg.tauEnd - tau : cfg.step;
    const Vec8 k1 = lorentzRhs(pot, q, y);
    const Vec8 k2 = lorentzRhs(pot, q, y + 0.5 * h * k1);
    const Vec8 k3 = lorentzRhs(pot, q, y + 0.5 * h * k2);
    const Vec8 k4 = lorentzRhs(pot, q, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    tau = (k == steps) ? cfg.tauEnd : initial.tau + static_cast<double>(k) * cfg.step;
    if (k % cfg.sampleEvery == 0 || k == steps) out.lorentz.push_back(y.head<4>());
  }

  for (std::size_t i = 0; i < out.geodesic.size() && i < out.lorentz.size(); ++i)
    out.maxDeviation = std::max(out.maxDeviation, (out.geodesic[i].X.head<4>() - out.lorentz[i]).norm());
  return out;
}

void writeGeodesicCsv(std::ostream& os, const std::vector<FiveState>& samples) {
  os << "tau,x0,x1,x2,x3,x5,u0,u1,u2,u3,u5\n";
  std::string line;
  for (const auto& s : samples) {
    line.clear();
    appendNumber(line, s.tau);
    for (int i = 0; i < 5; ++i) {
      line += ',';
      appendNumber(line, s.X(i));
    }
    for (int i = 0; i < 5; ++i) {
      line += ',';
      appendNumber(line, s.U(i));
    }
    line += '\n';
    os << line;
  }
}

}  // namespace isodyn::kk
