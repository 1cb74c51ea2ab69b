#include "junction/geometry.hpp"

#include <cmath>
#include <string>

#include "junction/error.hpp"

namespace junction {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidPoint: return "invalid-point";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidProblem: return "invalid-problem";
    case ErrorKind::EmptyControlSet: return "empty-control-set";
    case ErrorKind::UnboundedMinimizer: return "unbounded-minimizer";
    case ErrorKind::UnknownAtom: return "unknown-atom";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::BudgetExceeded: return "budget-exceeded";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::Schema: return "schema";
  }
  return "unknown";
}

bool operator==(const JunctionPoint& a, const JunctionPoint& b) noexcept {
  if (a.xi == 0.0 && b.xi == 0.0) return a.x0 == b.x0;
  return a.plane == b.plane && a.x0 == b.x0 && a.xi == b.xi;
}

void JunctionShape::validate() const {
  if (n_planes < 2) {
    throw Error(ErrorKind::InvalidArgument,
                "a junction needs at least 2 half-planes, got " + std::to_string(n_planes));
  }
}

void validate_point(const JunctionPoint& p) {
  if (!std::isfinite(p.x0) || !std::isfinite(p.xi)) {
    throw Error(ErrorKind::InvalidPoint, "non-finite junction coordinate");
  }
  if (p.xi < 0.0) {
    throw Error(ErrorKind::InvalidPoint,
                "negative normal coordinate xi=" + std::to_string(p.xi));
  }
  if (p.xi > 0.0 && p.plane < 1) {
    throw Error(ErrorKind::InvalidPoint, "point off the interface needs a plane index >= 1");
  }
}

JunctionPoint make_point(PlaneIndex plane, double x0, double xi) {
  JunctionPoint p{plane, x0, xi};
  validate_point(p);
  return canonicalize(p);
}

JunctionPoint canonicalize(const JunctionPoint& p) {
  validate_point(p);
  if (p.xi == 0.0) return {kInterface, p.x0, 0.0};
  return p;
}

bool same_sheet(const JunctionPoint& x, const JunctionPoint& y) noexcept {
  return x.xi == 0.0 || y.xi == 0.0 || x.plane == y.plane;
}

double geodesic_distance(const JunctionPoint& x, const JunctionPoint& y) {
  validate_point(x);
  validate_point(y);
  const double d0 = x.x0 - y.x0;
  const double dn = same_sheet(x, y) ? x.xi - y.xi : x.xi + y.xi;
  return std::hypot(d0, dn);
}

}  // namespace junction

std::size_t std::hash<junction::JunctionPoint>::operator()(
    const junction::JunctionPoint& p) const noexcept {
  const std::hash<double> h;
  // +0.0 and -0.0 must hash alike since they compare equal.
  const double x0 = p.x0 == 0.0 ? 0.0 : p.x0;
  std::size_t seed = h(x0);
  if (p.xi != 0.0) {
    seed ^= h(p.xi) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    seed ^= std::hash<int>{}(p.plane) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  }
  return seed;
}
