#include "isodyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/SVD>

#include "isodyn/conservation.hpp"
#include "isodyn/errors.hpp"

namespace isodyn {

namespace {

double angleBetween(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

void coneStatistics(ConeReport& r, const Trajectory& trajectory, const Vec3& J) {
  const auto& s = trajectory.samples;
  r.samples = s.size();
  if (J.norm() < 1e-12) {
    r.applicable = false;
    r.reason = "J vanishes; the motion is radial";
    return;
  }
  std::vector<double> angles;
  angles.reserve(s.size());
  for (const auto& p : s) angles.push_back(angleBetween(J, p.x));
  double sum = 0.0;
  for (double a : angles) sum += a;
  r.meanAngle = sum / static_cast<double>(angles.size());
  const double transverse = std::sqrt(std::max(0.0, J.squaredNorm() - r.q * r.q));
  r.expectedAngle = std::atan2(transverse, -r.q);
  for (double a : angles) {
    r.maxDeviation = std::max(r.maxDeviation, std::abs(a - r.meanAngle));
    r.maxExpectedDeviation = std::max(r.maxExpectedDeviation, std::abs(a - r.expectedAngle));
  }
}

std::string svgNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Conic value and gradient in the plane coordinates.
double conicValue(const std::array<double, 6>& c, const Vec2& p) {
  const double u = p.x(), v = p.y();
  return c[0] * u * u + c[1] * u * v + c[2] * v * v + c[3] * u + c[4] * v + c[5];
}

}  // namespace

ConeReport coneCheck(const Trajectory& trajectory, std::optional<double> q, double chargeTolerance) {
  ConeReport r;
  if (trajectory.samples.empty()) {
    r.applicable = false;
    r.reason = "empty trajectory";
    return r;
  }
  const auto& field = trajectory.field;
  const auto& s0 = trajectory.samples.front();
  r.q = q ? *q : field.radialCharge(s0.x, s0.Q);
  coneStatistics(r, trajectory, quantities::angularMomentum(s0, r.q));
  if (q) return r;
  const double q0 = r.q;
  for (const auto& s : trajectory.samples)
    r.chargeDrift = std::max(r.chargeDrift, std::abs(field.radialCharge(s.x, s.Q) - q0));
  if (r.chargeDrift > chargeTolerance) {
    r.applicable = false;
    r.reason = "cone not applicable: radial charge drifts by " + std::to_string(r.chargeDrift);
  }
  return r;
}

std::string toString(ConicType t) {
  switch (t) {
    case ConicType::Ellipse: return "ellipse";
    case ConicType::Parabola: return "parabola";
    case ConicType::Hyperbola: return "hyperbola";
  }
  return "unknown";
}

ConicFit fitConic(std::span<const Vec2> points) {
  if (points.size() < 5) throw ValidationError("conic fit needs at least five points");
  Vec2 mean = Vec2::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  double spread = 0.0;
  for (const auto& p : points) spread += (p - mean).squaredNorm();
  const double scale = std::sqrt(spread / (2.0 * static_cast<double>(points.size())));
  if (!(scale > 0.0)) throw ValidationError("conic fit needs non-coincident points");

  Eigen::MatrixXd design(points.size(), 6);
  for (Eigen::Index k = 0; k < design.rows(); ++k) {
    const Vec2 p = (points[static_cast<std::size_t>(k)] - mean) / scale;
    design.row(k) << p.x() * p.x(), p.x() * p.y(), p.y() * p.y(), p.x(), p.y(), 1.0;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinV);
  const Eigen::Matrix<double, 6, 1> n = svd.matrixV().col(5);
  const double a = n(0), b = n(1), c = n(2), d = n(3), e = n(4), f = n(5);

  ConicFit fit;
  fit.discriminant = b * b - 4.0 * a * c;
  if (std::abs(fit.discriminant) < 1e-9)
    fit.type = ConicType::Parabola;
  else
    fit.type = fit.discriminant < 0.0 ? ConicType::Ellipse : ConicType::Hyperbola;

  // Sampson distance |Q| / |grad Q|, measured in normalized units.
  for (const auto& pt : points) {
    const Vec2 p = (pt - mean) / scale;
    const double value = a * p.x() * p.x() + b * p.x() * p.y() + c * p.y() * p.y() + d * p.x() + e * p.y() + f;
    const Vec2 grad(2.0 * a * p.x() + b * p.y() + d, b * p.x() + 2.0 * c * p.y() + e);
    const double g = grad.norm();
    fit.residual = std::max(fit.residual, g > 0.0 ? std::abs(value) / g * scale : std::abs(value) * scale);
  }

  Eigen::Matrix3d m;
  m << a, b / 2, d / 2, b / 2, c, e / 2, d / 2, e / 2, f;
  const double root = std::hypot(a - c, b);
  const double eta = m.determinant() < 0.0 ? 1.0 : -1.0;
  const double denom = eta * (a + c) + root;
  fit.eccentricity = denom > 0.0 ? std::sqrt(std::max(0.0, 2.0 * root / denom)) : 1.0;

  // Back to the caller's coordinates.
  const double mu = mean.x(), mv = mean.y(), s = scale;
  Eigen::Matrix<double, 6, 1> back;
  back << a, b, c, -2.0 * a * mu - b * mv + s * d, -2.0 * c * mv - b * mu + s * e,
      a * mu * mu + b * mu * mv + c * mv * mv - s * d * mu - s * e * mv + s * s * f;
  back.normalize();
  for (int k = 0; k < 6; ++k) fit.coefficients[static_cast<std::size_t>(k)] = back(k);
  return fit;
}

PlaneFrame planeFrame(const Vec3& n, double offset) {
  PlaneFrame frame;
  const double norm = n.norm();
  if (!(norm > 0.0)) throw ValidationError("plane normal must be nonzero");
  frame.normal = n / norm;
  frame.origin = frame.normal * (offset / norm);
  int seed = 0;
  while (seed < 2 && std::abs(frame.normal(seed)) > 0.9) ++seed;
  Vec3 e1 = Vec3::Unit(seed) - frame.normal(seed) * frame.normal;
  frame.e1 = e1.normalized();
  frame.e2 = frame.normal.cross(frame.e1);
  return frame;
}

ConicReport planeAndConic(const Trajectory& trajectory, const Vec3& J, const Vec3& K, double alpha, double q) {
  if (std::abs(q) < 1e-10) throw DegenerateCharge("plane relation needs |q| >= 1e-10");
  ConicReport r;
  r.cone = coneCheck(trajectory, q);
  r.normal = K + (alpha / q) * J;
  r.planeOffset = J.squaredNorm() - q * q;
  const double nn = r.normal.norm();
  for (const auto& s : trajectory.samples)
    r.maxOffPlaneDistance = std::max(r.maxOffPlaneDistance, std::abs(r.normal.dot(s.x) - r.planeOffset) / nn);
  r.frame = planeFrame(r.normal, r.planeOffset);
  r.projected.reserve(trajectory.samples.size());
  for (const auto& s : trajectory.samples) r.projected.push_back(r.frame.project(s.x));
  r.conic = fitConic(r.projected);
  return r;
}

ConicReport planeAndConic(const Trajectory& trajectory) {
  if (trajectory.samples.empty()) throw ValidationError("empty trajectory");
  const auto& s0 = trajectory.samples.front();
  const double q = trajectory.field.radialCharge(s0.x, s0.Q);
  const double alpha = trajectory.potential ? trajectory.potential->alpha : 0.0;
  return planeAndConic(trajectory, quantities::angularMomentum(s0, q), quantities::rungeLenz(s0, q, alpha), alpha,
                       q);
}

nlohmann::json toJson(const ConeReport& r) {
  return {{"applicable", r.applicable}, {"reason", r.reason},
          {"q", r.q},                   {"chargeDrift", r.chargeDrift},
          {"meanAngle", r.meanAngle},   {"maxDeviation", r.maxDeviation},
          {"expectedAngle", r.expectedAngle}, {"maxExpectedDeviation", r.maxExpectedDeviation},
          {"samples", r.samples}};
}

nlohmann::json toJson(const ConicReport& r) {
  nlohmann::json j;
  j["coneAngleStats"] = toJson(r.cone);
  j["planarity"] = {{"normal", {r.normal.x(), r.normal.y(), r.normal.z()}},
                    {"offset", r.planeOffset},
                    {"maxOffPlaneDistance", r.maxOffPlaneDistance}};
  j["conicFit"] = {{"type", toString(r.conic.type)},
                   {"residual", r.conic.residual},
                   {"eccentricity", r.conic.eccentricity},
                   {"discriminant", r.conic.discriminant},
                   {"coefficients", r.conic.coefficients}};
  return j;
}

namespace {

struct SvgCanvas {
  Vec2 lo, hi;
  double size = 480.0;

  explicit SvgCanvas(std::span<const Vec2> pts) {
    lo = hi = pts.empty() ? Vec2::Zero() : pts.front();
    for (const auto& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vec2 pad = 0.1 * (hi - lo).cwiseMax(1e-9);
    lo -= pad;
    hi += pad;
    // Equal aspect ratio.
    const double span = std::max(hi.x() - lo.x(), hi.y() - lo.y());
    const Vec2 mid = 0.5 * (lo + hi);
    lo = mid - Vec2::Constant(span / 2);
    hi = mid + Vec2::Constant(span / 2);
  }

  Vec2 map(const Vec2& p) const {
    const double span = hi.x() - lo.x();
    return {(p.x() - lo.x()) / span * size, size - (p.y() - lo.y()) / span * size};
  }
  bool inside(const Vec2& p) const { return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all(); }
};

void writePolyline(std::ostream& os, const SvgCanvas& canvas, std::span<const Vec2> pts, const char* style) {
  if (pts.size() < 2) return;
  os << "<polyline fill=\"none\" " << style << " points=\"";
  for (const auto& p : pts) {
    const Vec2 m = canvas.map(p);
    os << svgNumber(m.x()) << ',' << svgNumber(m.y()) << ' ';
  }
  os << "\"/>\n";
}

void svgHeader(std::ostream& os, const SvgCanvas& canvas) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << canvas.size << "\" height=\"" << canvas.size
     << "\" viewBox=\"0 0 " << canvas.size << ' ' << canvas.size << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

void writeOrbitSvg(std::ostream& os, const ConicReport& report) {
  const SvgCanvas canvas(report.projected);
  svgHeader(os, canvas);

  // Conic overlay: nearest root along rays from the orbit centroid.
  Vec2 centre = Vec2::Zero();
  for (const auto& p : report.projected) centre += p;
  if (!report.projected.empty()) centre /= static_cast<double>(report.projected.size());
  const auto& c = report.conic.coefficients;
  const double reach = 2.0 * (canvas.hi - canvas.lo).norm();
  std::vector<Vec2> segment;
  auto flush = [&] {
    writePolyline(os, canvas, segment, "stroke=\"#d62728\" stroke-width=\"1\" stroke-dasharray=\"4 3\"");
    segment.clear();
  };
  constexpr int rays = 720;
  for (int k = 0; k <= rays; ++k) {
    const double th = 2.0 * std::numbers::pi * k / rays;
    const Vec2 dir(std::cos(th), std::sin(th));
    // Q(centre + t dir) = A t^2 + B t + C
    const double A = c[0] * dir.x() * dir.x() + c[1] * dir.x() * dir.y() + c[2] * dir.y() * dir.y();
    const double B = 2 * c[0] * centre.x() * dir.x() + c[1] * (centre.x() * dir.y() + centre.y() * dir.x()) +
                     2 * c[2] * centre.y() * dir.y() + c[3] * dir.x() + c[4] * dir.y();
    const double C = conicValue(c, centre);
    double t = -1.0;
    if (std::abs(A) < 1e-14) {
      if (std::abs(B) > 1e-14) t = -C / B;
    } else {
      const double disc = B * B - 4 * A * C;
      if (disc >= 0.0) {
        const double r1 = (-B - std::sqrt(disc)) / (2 * A), r2 = (-B + std::sqrt(disc)) / (2 * A);
        const double lo = std::min(r1, r2), hi = std::max(r1, r2);
        t = lo > 0.0 ? lo : hi;
      }
    }
    const Vec2 p = centre + t * dir;
    if (t > 0.0 && t < reach && canvas.inside(p))
      segment.push_back(p);
    else
      flush();
  }
  flush();

  writePolyline(os, canvas, report.projected, "stroke=\"#1f77b4\" stroke-width=\"1.5\"");
  os << "<text x=\"8\" y=\"18\" font-family=\"monospace\" font-size=\"12\">" << toString(report.conic.type)
     << " e=" << svgNumber(report.conic.eccentricity) << "</text>\n</svg>\n";
}

void writeProjectionSvg(std::ostream& os, const Trajectory& trajectory) {
  std::vector<Vec2> pts;
  pts.reserve(trajectory.samples.size());
  for (const auto& s : trajectory.samples) pts.emplace_back(s.x.x(), s.x.y());
  const SvgCanvas canvas(pts);
  svgHeader(os, canvas);
  writePolyline(os, canvas, pts, "stroke=\"#1f77b4\" stroke-width=\"1.5\"");
  os << "</svg>\n";
}

GaugeCovarianceReport gaugeCovarianceExperiment(const ParticleState& initial, const GaugeField& field,
                                                const std::optional<ScalarPotential>& potential,
                                                const IntegratorConfig& cfg, const GaugeFunction& g) {
  GaugeCovarianceReport r;
  r.gauge = g.name();
  const Trajectory original = integrate(initial, field, potential, cfg);
  ParticleState moved = initial;
  moved.Q = g.rotation(initial.x) * initial.Q;
  const Trajectory transformed = integrate(moved, field.transformed(g), potential, cfg);
  r.original = original.termination;
  r.transformed = transformed.termination;
  r.samples = std::min(original.samples.size(), transformed.samples.size());
  for (std::size_t k = 0; k < r.samples; ++k) {
    const auto& a = original.samples[k];
    const auto& b = transformed.samples[k];
    r.maxPositionDeviation = std::max(r.maxPositionDeviation, (b.x - a.x).norm());
    r.maxIsospinDeviation = std::max(r.maxIsospinDeviation, (b.Q - g.rotation(a.x) * a.Q).norm());
  }
  return r;
}

nlohmann::json toJson(const GaugeCovarianceReport& r) {
  return {{"gauge", r.gauge},
          {"maxPositionDeviation", r.maxPositionDeviation},
          {"maxIsospinDeviation", r.maxIsospinDeviation},
          {"samples", r.samples},
          {"original", toString(r.original)},
          {"transformed", toString(r.transformed)}};
}

}  // namespace isodyn
