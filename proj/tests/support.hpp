#pragma once

// Problem builders and independent reference computations shared by the
// unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "junction/hamiltonians.hpp"
#include "junction/problem.hpp"

namespace support {

using namespace junction;

inline std::string data(const std::string& name) { return std::string(JUNCTION_TEST_DATA) + "/" + name; }

/// Two half-planes with disc dynamics and constant costs c1, c2.
inline JunctionProblem disc_problem(double c1, double c2, int samples = 64, double radius = 1.0,
                                    double lambda = 1.0) {
  DiscFamily d;
  d.radius = radius;
  d.angle_samples = samples;
  return JunctionProblem({2}, {disc_atoms("a", d, {c1, 0, 0}), disc_atoms("b", d, {c2, 0, 0})}, {},
                         lambda, {radius, std::max(std::abs(c1), std::abs(c2)), 0.0}, false);
}

/// Random finite problem with atoms straddling the interface in every plane.
inline JunctionProblem random_problem(std::mt19937_64& rng, bool convexify, int n_planes = 2,
                                      bool interface_atoms = false) {
  std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.1, 2.0), cost(-1.0, 1.0);
  std::uniform_int_distribution<int> count(2, 6);
  std::vector<std::vector<ControlAtom>> planes;
  for (int p = 1; p <= n_planes; ++p) {
    std::vector<ControlAtom> atoms;
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
      double fi = u(rng);
      if (k == 0) fi = pos(rng);
      if (k == 1) fi = -pos(rng);
      if (k == 2 && n > 4) fi = 0.0;
      atoms.push_back(constant_atom("p" + std::to_string(p) + "_" + std::to_string(k), u(rng), fi,
                                    cost(rng)));
    }
    planes.push_back(std::move(atoms));
  }
  std::vector<ControlAtom> iface;
  if (interface_atoms) iface.push_back(constant_atom("z", u(rng), 0.0, cost(rng)));
  return JunctionProblem({n_planes}, std::move(planes), std::move(iface), 1.0, {4.0, 1.0, 0.0},
                         convexify);
}

/// Geodesic distance by minimizing |x - z| + |z - y| over a fine grid of interface points.
inline double geodesic_by_search(const JunctionPoint& x, const JunctionPoint& y) {
  if (x.on_interface() || y.on_interface() || x.plane == y.plane) {
    return std::hypot(x.x0 - y.x0, x.xi - y.xi);
  }
  const double lo = std::min(x.x0, y.x0), hi = std::max(x.x0, y.x0);
  double best = std::numeric_limits<double>::infinity();
  const int n = 200000;
  for (int k = 0; k <= n; ++k) {
    const double z = lo + (hi - lo) * k / n;
    best = std::min(best, std::hypot(x.x0 - z, x.xi) + std::hypot(z - y.x0, y.xi));
  }
  // Refine around the best grid point by ternary search.
  double a = lo, b = hi;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
    const double f1 = std::hypot(x.x0 - m1, x.xi) + std::hypot(m1 - y.x0, y.xi);
    const double f2 = std::hypot(x.x0 - m2, x.xi) + std::hypot(m2 - y.x0, y.xi);
    (f1 < f2 ? b : a) = (f1 < f2 ? m2 : m1);
  }
  return std::min(best, std::hypot(x.x0 - a, x.xi) + std::hypot(a - y.x0, y.xi));
}

/// Max of -p.f - ell over explicit points.
inline double brute_max(const std::vector<FLPoint>& set, const Covector& p) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& z : set) m = std::max(m, -p.p0 * z.f0 - p.pi * z.fi - z.ell);
  return m;
}

/// Minimum of d -> max_k (support_k - fi_k d), found by checking every pairwise
/// line intersection (the minimum of a convex piecewise-linear function sits at a kink).
inline double brute_phi_min(const std::vector<FLPoint>& set, const Covector& p) {
  auto phi = [&](double d) { return brute_max(set, {p.p0, p.pi + d}); };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = 0; b < set.size(); ++b) {
      if (set[a].fi == set[b].fi) continue;
      const double ca = -p.p0 * set[a].f0 - p.pi * set[a].fi - set[a].ell;
      const double cb = -p.p0 * set[b].f0 - p.pi * set[b].fi - set[b].ell;
      best = std::min(best, phi((ca - cb) / (set[a].fi - set[b].fi)));
    }
  return best;
}

}  // namespace support
