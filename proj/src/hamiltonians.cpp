#include "junction/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "junction/error.hpp"

namespace junction {

double max_support(std::span<const FLPoint> set, const Covector& p) {
  if (set.empty()) throw Error(ErrorKind::EmptyControlSet, "maximum over an empty control set");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& z : set) best = std::max(best, support(z, p));
  return best;
}

std::vector<FLPoint> zero_normal_mixtures(std::span<const FLPoint> set) {
  std::vector<FLPoint> out;
  for (std::size_t a = 0; a < set.size(); ++a) {
    for (std::size_t b = a + 1; b < set.size(); ++b) {
      if (set[a].fi > 0.0 && set[b].fi < 0.0) {
        out.push_back(mix_to_zero_normal(set[a], set[b]));
      } else if (set[b].fi > 0.0 && set[a].fi < 0.0) {
        out.push_back(mix_to_zero_normal(set[b], set[a]));
      }
    }
  }
  return out;
}

std::vector<FLPoint> tangential_mixing(std::span<const FLPoint> set) {
  std::vector<FLPoint> out;
  for (const auto& z : set)
    if (z.fi == 0.0) out.push_back(z);
  const auto mixed = zero_normal_mixtures(set);
  out.insert(out.end(), mixed.begin(), mixed.end());
  return out;
}

double hamiltonian(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x,
                   const Covector& p) {
  return max_support(fl_set(problem, i, x), p);
}

double hamiltonian_plus(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x,
                        const Covector& p) {
  const auto set = fl_plus_set(problem, i, x);
  if (set.empty()) {
    throw Error(ErrorKind::EmptyControlSet,
                "no control of half-plane " + std::to_string(i) + " points inward at x0=" +
                    std::to_string(x.x0));
  }
  return max_support(set, p);
}

double hamiltonian_interface(const JunctionProblem& problem, const JunctionPoint& x, double p0) {
  if (!x.on_interface()) throw Error(ErrorKind::InvalidArgument, "H_0 lives on the interface");
  return max_support(fl_interface_set(problem, x), Covector{p0, 0.0});
}

double hamiltonian_gamma(const JunctionProblem& problem, const JunctionPoint& x,
                         std::span<const Covector> per_plane) {
  if (!x.on_interface()) throw Error(ErrorKind::InvalidArgument, "H_Gamma lives on the interface");
  if (static_cast<int>(per_plane.size()) != problem.n_planes()) {
    throw Error(ErrorKind::InvalidArgument, "H_Gamma needs one covector per half-plane");
  }
  const double p0 = per_plane.front().p0;
  for (const auto& p : per_plane) {
    if (p.p0 != p0) {
      throw Error(ErrorKind::InvalidArgument,
                  "covectors of H_Gamma must share their tangential component");
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= problem.n_planes(); ++i) {
    best = std::max(best, hamiltonian_plus(problem, i, x, per_plane[i - 1]));
  }
  if (problem.has_interface_controls()) best = std::max(best, hamiltonian_interface(problem, x, p0));
  return best;
}

double hamiltonian_tangential(const JunctionProblem& problem, PlaneIndex i,
                              const JunctionPoint& x, double p0) {
  if (!x.on_interface()) {
    throw Error(ErrorKind::InvalidArgument, "tangential Hamiltonian lives on the interface");
  }
  const auto set = tangential_mixing(fl_set(problem, i, x));
  if (set.empty()) {
    throw Error(ErrorKind::EmptyControlSet,
                "half-plane " + std::to_string(i) + " has no zero-normal control at x0=" +
                    std::to_string(x.x0));
  }
  return max_support(set, Covector{p0, 0.0});
}

double hamiltonian_tangential(const JunctionProblem& problem, const JunctionPoint& x, double p0) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= problem.n_planes(); ++i) {
    best = std::max(best, hamiltonian_tangential(problem, i, x, p0));
  }
  if (problem.has_interface_controls()) best = std::max(best, hamiltonian_interface(problem, x, p0));
  return best;
}

MinimizerSet minimizer_set(std::span<const FLPoint> set, const Covector& p) {
  // phi(d) = max_k (c_k + s_k d) with intercept c_k = support_k(p) and slope s_k = -fi_k.
  struct Line {
    double slope, intercept;
  };
  std::vector<Line> lines;
  bool rising = false, falling = false;
  for (const auto& z : set) {
    lines.push_back({-z.fi, support(z, p)});
    rising = rising || z.fi < 0.0;
    falling = falling || z.fi > 0.0;
  }
  if (!rising || !falling) {
    throw Error(ErrorKind::UnboundedMinimizer,
                "d -> H_i(x, p + d e_i) is not coercive: normal components are one-sided");
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return a.slope < b.slope || (a.slope == b.slope && a.intercept > b.intercept);
  });
  // Upper envelope, slopes strictly increasing.
  auto meet = [](const Line& a, const Line& b) {
    return (a.intercept - b.intercept) / (b.slope - a.slope);
  };
  std::vector<Line> hull;
  for (const auto& l : lines) {
    if (!hull.empty() && hull.back().slope == l.slope) continue;
    while (hull.size() >= 2 && meet(hull[hull.size() - 2], hull.back()) >= meet(hull.back(), l)) {
      hull.pop_back();
    }
    hull.push_back(l);
  }
  // First envelope piece with non-negative slope.
  std::size_t k = 0;
  while (hull[k].slope < 0.0) ++k;
  MinimizerSet m;
  if (hull[k].slope == 0.0) {
    m.delta_min = meet(hull[k - 1], hull[k]);
    m.delta_max = meet(hull[k], hull[k + 1]);
  } else {
    m.delta_min = m.delta_max = meet(hull[k - 1], hull[k]);
  }
  m.value = -std::numeric_limits<double>::infinity();
  for (const auto& l : lines) m.value = std::max(m.value, l.intercept + l.slope * m.delta_min);
  return m;
}

MinimizerSet delta_min_set(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x,
                           const Covector& p) {
  if (!x.on_interface()) throw Error(ErrorKind::InvalidArgument, "Delta is defined on the interface");
  return minimizer_set(fl_set(problem, i, x), p);
}

std::vector<FLPoint> relaxed_fl(const JunctionProblem& problem, const JunctionPoint& x,
                                PlaneIndex i) {
  if (!x.on_interface()) throw Error(ErrorKind::InvalidArgument, "relaxed set is built on the interface");
  std::vector<FLPoint> out = fl_plus_set(problem, i, x);
  for (int j = 1; j <= problem.n_planes(); ++j) {
    if (j == i) continue;
    const auto tangential = tangential_mixing(fl_set(problem, j, x));
    out.insert(out.end(), tangential.begin(), tangential.end());
  }
  const auto iface = fl_interface_set(problem, x);
  out.insert(out.end(), iface.begin(), iface.end());
  return out;
}

double RegularityReport::worst() const {
  return std::max({lipschitz_x, lipschitz_p, coercivity, pi_monotonicity, pseudo_coercivity,
                   tech02});
}

RegularityReport hamiltonian_regularity_report(const JunctionProblem& problem,
                                               const Domain& domain, int samples,
                                               std::uint64_t seed) {
  if (samples <= 0) throw Error(ErrorKind::InvalidArgument, "sampling budget must be positive");
  const auto& declared = problem.declared();
  const double C_M = std::max(declared.M_f, declared.M_ell);

  RegularityReport r;
  r.samples = samples;
  const auto radius = controllability_radius(problem, domain, ControllabilityMode::H3Tilde);
  r.delta = radius.delta;
  r.radius = radius.radius;
  if (auto lip = problem.cost_lipschitz()) {
    r.cost_lipschitz = *lip;
  } else {
    r.cost_lipschitz = check_H0_H1(problem, domain, samples, seed).omega_ell_est;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_int_distribution<int> pick_plane(1, problem.n_planes());
  auto random_point = [&](PlaneIndex i) {
    const double x0 = domain.x0_min + (domain.x0_max - domain.x0_min) * u01(rng);
    const double xi = u01(rng) < 0.2 ? 0.0 : domain.xi_max * u01(rng);
    return xi == 0.0 ? interface_point(x0) : JunctionPoint{i, x0, xi};
  };
  auto random_covector = [&] { return Covector{coord(rng), coord(rng)}; };
  auto norm = [](const Covector& p) { return std::hypot(p.p0, p.pi); };
  auto dist = [](const JunctionPoint& a, const JunctionPoint& b) {
    return std::hypot(a.x0 - b.x0, a.xi - b.xi);
  };
  // Interface and near-interface points come from the scan lattice so that
  // the controllability estimates above apply to them exactly.
  const int n0 = 41;
  auto lattice_x0 = [&](int s) {
    return domain.x0_min + (domain.x0_max - domain.x0_min) * s / (n0 - 1);
  };
  std::uniform_int_distribution<int> pick_x0(0, n0 - 1);
  std::vector<double> near_levels;
  for (double level : radius.levels)
    if (level <= r.radius) near_levels.push_back(level);
  std::uniform_int_distribution<std::size_t> pick_level(0, near_levels.size() - 1);

  const double M_tech = r.delta > 0.0 ? declared.L_f * (1.0 + 2.0 * declared.M_f / r.delta) : 0.0;
  auto omega_tech = [&](double t) {
    return r.cost_lipschitz * t + 2.0 * declared.M_ell * declared.L_f * t / r.delta;
  };

  for (int s = 0; s < samples; ++s) {
    const PlaneIndex i = pick_plane(rng);
    {
      const auto x = random_point(i), y = random_point(i);
      const auto p = random_covector();
      const double gap = std::abs(hamiltonian(problem, i, x, p) - hamiltonian(problem, i, y, p));
      const double bound = declared.L_f * dist(x, y) * norm(p) + r.cost_lipschitz * dist(x, y);
      r.lipschitz_x = std::max(r.lipschitz_x, gap - bound);
    }
    {
      const auto x = random_point(i);
      const auto p = random_covector(), q = random_covector();
      const double gap = std::abs(hamiltonian(problem, i, x, p) - hamiltonian(problem, i, x, q));
      r.lipschitz_p =
          std::max(r.lipschitz_p, gap - declared.M_f * std::hypot(p.p0 - q.p0, p.pi - q.pi));
    }
    if (!(r.delta > 0.0)) continue;
    {
      const double level = near_levels[pick_level(rng)];
      const double x0 = lattice_x0(pick_x0(rng));
      const auto x = level == 0.0 ? interface_point(x0) : JunctionPoint{i, x0, level};
      const auto p = random_covector();
      const double floor = 0.5 * r.delta * std::abs(p.pi) - C_M * (1.0 + std::abs(p.p0));
      r.coercivity = std::max(r.coercivity, floor - hamiltonian(problem, i, x, p));
    }
    const auto x = interface_point(lattice_x0(pick_x0(rng)));
    const auto y = interface_point(lattice_x0(pick_x0(rng)));
    {
      const double p0 = coord(rng);
      double a = coord(rng), b = coord(rng);
      if (a > b) std::swap(a, b);
      r.pi_monotonicity =
          std::max(r.pi_monotonicity, hamiltonian_plus(problem, i, x, {p0, b}) -
                                          hamiltonian_plus(problem, i, x, {p0, a}));
    }
    {
      const auto p = random_covector();
      const double floor = -r.delta * p.pi - C_M * (1.0 + std::abs(p.p0));
      r.pseudo_coercivity =
          std::max(r.pseudo_coercivity, floor - hamiltonian_plus(problem, i, x, p));
    }
    {
      const auto p = random_covector();
      const double gap =
          std::abs(hamiltonian_plus(problem, i, x, p) - hamiltonian_plus(problem, i, y, p));
      const double t = dist(x, y);
      r.tech02 = std::max(r.tech02, gap - (M_tech * t * norm(p) + omega_tech(t)));
    }
  }
  return r;
}

}  // namespace junction
