#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "junction/error.hpp"
#include "junction/problem.hpp"

namespace junction {

namespace {

constexpr double kFlagSlack = 1e-12;

bool exceeds(double estimate, double declared) {
  return estimate > declared * (1.0 + kFlagSlack) + kFlagSlack;
}

double euclid(const JunctionPoint& a, const JunctionPoint& b) {
  return std::hypot(a.x0 - b.x0, a.xi - b.xi);
}

JunctionPoint clamp_into(const Domain& d, PlaneIndex plane, double x0, double xi) {
  x0 = std::clamp(x0, d.x0_min, d.x0_max);
  xi = std::clamp(xi, 0.0, d.xi_max);
  return xi == 0.0 ? interface_point(x0) : JunctionPoint{plane, x0, xi};
}

struct Vec2 {
  double x, y;
};

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain; counter-clockwise, collinear points dropped.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

H0H1Report check_H0_H1(const JunctionProblem& problem, const Domain& domain, int samples,
                       std::uint64_t seed) {
  if (samples <= 0) throw Error(ErrorKind::InvalidArgument, "sampling budget must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double span0 = domain.x0_max - domain.x0_min;

  H0H1Report r;
  auto scan = [&](const std::vector<ControlAtom>& atoms, PlaneIndex plane, bool interface_only) {
    std::vector<JunctionPoint> pts;
    const double top = interface_only ? 0.0 : domain.xi_max;
    for (double x0 : {domain.x0_min, domain.x0_max})
      for (double xi : {0.0, top}) pts.push_back(clamp_into(domain, plane, x0, xi));
    for (int s = 0; s < samples; ++s) {
      pts.push_back(
          clamp_into(domain, plane, domain.x0_min + span0 * u01(rng), top * u01(rng)));
    }
    for (const auto& atom : atoms) {
      for (std::size_t s = 0; s < pts.size(); ++s) {
        const auto& x = pts[s];
        const FLPoint fx = atom.evaluate(x);
        r.M_f_est = std::max(r.M_f_est, std::hypot(fx.f0, fx.fi));
        r.M_ell_est = std::max(r.M_ell_est, std::abs(fx.ell));
        // Axis-aligned and random partners for difference quotients.
        const double h = 0.5 * u01(rng) + 1e-3;
        const JunctionPoint partners[] = {
            clamp_into(domain, plane, x.x0 + h * span0, x.xi),
            clamp_into(domain, plane, x.x0, interface_only ? 0.0 : x.xi + h * top),
            pts[(s * 7919 + 13) % pts.size()],
        };
        for (const auto& y : partners) {
          const double d = euclid(x, y);
          if (!(d > 0.0)) continue;
          const FLPoint fy = atom.evaluate(y);
          r.L_f_est = std::max(r.L_f_est, std::hypot(fx.f0 - fy.f0, fx.fi - fy.fi) / d);
          r.omega_ell_est = std::max(r.omega_ell_est, std::abs(fx.ell - fy.ell) / d);
        }
      }
    }
  };
  for (int i = 1; i <= problem.n_planes(); ++i) scan(problem.atoms(i), i, false);
  if (problem.has_interface_controls()) scan(problem.interface_atoms(), kInterface, true);

  const auto& declared = problem.declared();
  r.M_f_violated = exceeds(r.M_f_est, declared.M_f);
  r.M_ell_violated = exceeds(r.M_ell_est, declared.M_ell);
  r.L_f_violated = exceeds(r.L_f_est, declared.L_f);
  return r;
}

H2Report check_H2(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x) {
  const auto pts = fl_set(problem, i, x);
  H2Report r;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const FLPoint mid{0.5 * (pts[a].f0 + pts[b].f0), 0.5 * (pts[a].fi + pts[b].fi),
                        0.5 * (pts[a].ell + pts[b].ell)};
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& z : pts) {
        const double d0 = z.f0 - mid.f0, d1 = z.fi - mid.fi, d2 = z.ell - mid.ell;
        nearest = std::min(nearest, std::sqrt(d0 * d0 + d1 * d1 + d2 * d2));
      }
      r.max_hull_violation = std::max(r.max_hull_violation, nearest);
    }
  }
  return r;
}

double h3_radius(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x) {
  std::vector<Vec2> pts;
  for (const auto& z : fl_set(problem, i, x)) pts.push_back({z.f0, z.fi});
  const auto hull = convex_hull(std::move(pts));
  if (hull.size() < 3) return 0.0;
  double radius = std::numeric_limits<double>::infinity();
  const Vec2 origin{0.0, 0.0};
  for (std::size_t k = 0; k < hull.size(); ++k) {
    const Vec2& a = hull[k];
    const Vec2& b = hull[(k + 1) % hull.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    radius = std::min(radius, cross(a, b, origin) / len);
  }
  return std::max(radius, 0.0);
}

double h3_tilde_radius(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x) {
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& z : fl_set(problem, i, x)) {
    hi = std::max(hi, z.fi);
    lo = std::min(lo, z.fi);
  }
  return std::max(0.0, std::min(hi, -lo));
}

std::vector<double> check_H3(const JunctionProblem& problem, const JunctionPoint& x) {
  if (!x.on_interface()) throw Error(ErrorKind::InvalidArgument, "[H3] is checked on the interface");
  std::vector<double> out;
  for (int i = 1; i <= problem.n_planes(); ++i) out.push_back(h3_radius(problem, i, x));
  return out;
}

std::vector<double> check_H3_tilde(const JunctionProblem& problem, const JunctionPoint& x) {
  if (!x.on_interface()) {
    throw Error(ErrorKind::InvalidArgument, "normal controllability is checked on the interface");
  }
  std::vector<double> out;
  for (int i = 1; i <= problem.n_planes(); ++i) out.push_back(h3_tilde_radius(problem, i, x));
  return out;
}

RadiusReport controllability_radius(const JunctionProblem& problem, const Domain& domain,
                                    ControllabilityMode mode, int n0_samples, int levels) {
  if (n0_samples < 1 || levels < 2) {
    throw Error(ErrorKind::InvalidArgument, "controllability scan needs samples");
  }
  const auto estimate = mode == ControllabilityMode::H3 ? h3_radius : h3_tilde_radius;
  RadiusReport r;
  for (int k = 0; k < levels; ++k) r.levels.push_back(domain.xi_max * k / (levels - 1));

  auto x0_at = [&](int s) {
    return n0_samples == 1 ? 0.5 * (domain.x0_min + domain.x0_max)
                           : domain.x0_min + (domain.x0_max - domain.x0_min) * s / (n0_samples - 1);
  };
  auto level_min = [&](double xi) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= problem.n_planes(); ++i)
      for (int s = 0; s < n0_samples; ++s)
        m = std::min(m, estimate(problem, i, xi == 0.0 ? interface_point(x0_at(s))
                                                       : JunctionPoint{i, x0_at(s), xi}));
    return m;
  };

  r.delta = level_min(0.0);
  if (!(r.delta > 0.0)) return r;
  const double threshold = 0.5 * r.delta - kFlagSlack;
  for (double xi : r.levels) {
    if (level_min(xi) < threshold) break;
    r.radius = xi;
  }
  return r;
}

}  // namespace junction
