#include "junction/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include "junction/error.hpp"
#include "junction/simd/kernels.hpp"

namespace junction {

void JunctionGrid::validate() const {
  if (n_planes < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least two planes");
  if (n0 < 2 || ni < 2) throw Error(ErrorKind::InvalidArgument, "grid needs two nodes per axis");
  if (!(x0_max > x0_min) || !(xi_max > 0.0) || !std::isfinite(x0_min) || !std::isfinite(x0_max) ||
      !std::isfinite(xi_max)) {
    throw Error(ErrorKind::InvalidArgument, "grid extents must be finite with positive spacing");
  }
  const double nodes = static_cast<double>(n0) * (1.0 + static_cast<double>(n_planes) * (ni - 1));
  if (nodes >= std::numeric_limits<std::int32_t>::max()) {
    throw Error(ErrorKind::InvalidArgument, "grid too large");
  }
}

std::size_t JunctionGrid::index(PlaneIndex plane, int i0, int ii) const {
  if (i0 < 0 || i0 >= n0 || ii < 0 || ii >= ni) {
    throw Error(ErrorKind::OutOfDomain, "grid index out of range");
  }
  if (ii == 0) return static_cast<std::size_t>(i0);
  if (plane < 1 || plane > n_planes) throw Error(ErrorKind::InvalidArgument, "no such plane");
  return static_cast<std::size_t>(n0) *
             (1 + static_cast<std::size_t>(plane - 1) * (ni - 1) + (ii - 1)) +
         i0;
}

JunctionPoint JunctionGrid::node(PlaneIndex plane, int i0, int ii) const {
  const double x0 = i0 == n0 - 1 ? x0_max : x0_min + i0 * dx0();
  if (ii == 0) return interface_point(x0);
  return {plane, x0, ii == ni - 1 ? xi_max : ii * dxi()};
}

ValueField make_field(const JunctionGrid& grid, double value) {
  grid.validate();
  ValueField f;
  f.grid = grid;
  f.values.assign(grid.node_count(), value);
  f.flagged.assign(grid.node_count(), 0);
  return f;
}

namespace {

constexpr double kDomainSlack = 1e-12;

struct Cell {
  std::int32_t lo = 0;
  std::int32_t hi = 0;
  double fx = 0.0;
  double fy = 0.0;
};

// Bilinear cell of a point already known to lie in the grid domain.
Cell locate(const JunctionGrid& g, const JunctionPoint& x) {
  const double s0 = std::clamp((x.x0 - g.x0_min) / g.dx0(), 0.0, double(g.n0 - 1));
  const int i0 = std::min(static_cast<int>(s0), g.n0 - 2);
  Cell c;
  c.fx = s0 - i0;
  if (x.on_interface()) {
    c.lo = static_cast<std::int32_t>(g.index(kInterface, i0, 0));
    c.hi = static_cast<std::int32_t>(g.index(1, i0, 1));
    return c;
  }
  const double t = std::clamp(x.xi / g.dxi(), 0.0, double(g.ni - 1));
  const int r = std::min(static_cast<int>(t), g.ni - 2);
  c.fy = t - r;
  c.lo = static_cast<std::int32_t>(g.index(x.plane, i0, r));
  c.hi = static_cast<std::int32_t>(g.index(x.plane, i0, r + 1));
  return c;
}

double read(const std::vector<double>& v, const Cell& c) {
  const double gx = 1.0 - c.fx, gy = 1.0 - c.fy;
  const double a = gx * v[c.lo] + c.fx * v[c.lo + 1];
  const double b = gx * v[c.hi] + c.fx * v[c.hi + 1];
  return gy * a + c.fy * b;
}

bool in_grid(const JunctionGrid& g, const JunctionPoint& x) {
  return g.domain().contains(x, kDomainSlack * (1.0 + std::abs(g.x0_max) + std::abs(g.x0_min)));
}

simd::SweepView view_of(const Stencil& s) {
  return {s.offsets.data(), s.lo.data(), s.hi.data(),        s.fx.data(),     s.fy.data(),
          s.cost.data(),    s.discount.data(), s.flagged.data(), s.flagged_value};
}

int resolve_threads(int threads, std::size_t nodes) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<std::size_t>(threads, std::max<std::size_t>(1, nodes / 256)));
}

// One Jacobi sweep; returns the sup-norm update. Each thread owns a
// contiguous node range, so the result does not depend on the thread count.
double sweep(const Stencil& stencil, const std::vector<double>& v, std::vector<double>& next,
             int threads) {
  const auto& k = simd::active_kernels();
  const auto view = view_of(stencil);
  const std::size_t n = stencil.nodes();
  threads = resolve_threads(threads, n);
  if (threads == 1) {
    k.sweep(view, v.data(), next.data(), 0, n);
    return k.max_abs_diff(v.data(), next.data(), 0, n);
  }
  std::vector<double> part(threads, 0.0);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t b = n * t / threads, e = n * (t + 1) / threads;
      k.sweep(view, v.data(), next.data(), b, e);
      part[t] = k.max_abs_diff(v.data(), next.data(), b, e);
    });
  }
  for (auto& th : pool) th.join();
  return *std::max_element(part.begin(), part.end());
}

}  // namespace

double interpolate(const ValueField& field, const JunctionPoint& x) {
  validate_point(x);
  if (!in_grid(field.grid, x) || (!x.on_interface() && x.plane > field.grid.n_planes)) {
    throw Error(ErrorKind::OutOfDomain, "point outside the value field");
  }
  return read(field.values, locate(field.grid, canonicalize(x)));
}

Stencil build_stencil(const JunctionProblem& problem, const JunctionGrid& grid, double dt) {
  grid.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (grid.n_planes != problem.n_planes()) {
    throw Error(ErrorKind::InvalidArgument, "grid and problem disagree on the number of planes");
  }
  const double lambda = problem.lambda();
  if (!(lambda * dt < 1.0)) throw Error(ErrorKind::InvalidArgument, "lambda * dt must be below 1");
  const std::size_t nodes = grid.node_count();
  Stencil s;
  s.flagged_value = problem.declared().M_ell / lambda;
  s.flagged.assign(nodes, 0);
  s.offsets.assign(nodes + 1, 0);

  const double full_discount = std::exp(-lambda * dt);
  const double full_weight = -std::expm1(-lambda * dt) / lambda;
  auto push = [&](const JunctionPoint& foot, double step, double ell) {
    if (!in_grid(grid, foot)) return;
    const Cell c = locate(grid, foot);
    s.lo.push_back(c.lo);
    s.hi.push_back(c.hi);
    s.fx.push_back(c.fx);
    s.fy.push_back(c.fy);
    if (step == dt) {
      s.cost.push_back(ell * full_weight);
      s.discount.push_back(full_discount);
    } else {
      s.cost.push_back(ell * (-std::expm1(-lambda * step)) / lambda);
      s.discount.push_back(std::exp(-lambda * step));
    }
  };
  // Off the interface a foot that would cross it is cut at the crossing time.
  auto add = [&](const FLPoint& z, const JunctionPoint& x) {
    const double xi = x.xi + dt * z.fi;
    if (xi > 0.0) return push({x.plane, x.x0 + dt * z.f0, xi}, dt, z.ell);
    const double step = xi == 0.0 ? dt : std::min(dt, x.xi / -z.fi);
    push(interface_point(x.x0 + step * z.f0), step, z.ell);
  };

  std::vector<FLPoint> set;
  for (std::size_t n = 0; n < nodes; ++n) {
    const std::size_t before = s.cost.size();
    if (n < static_cast<std::size_t>(grid.n0)) {
      const int i0 = static_cast<int>(n);
      const JunctionPoint x = grid.node(kInterface, i0, 0);
      bool any = false;
      for (int k = 1; k <= problem.n_planes(); ++k) {
        for (const auto& z : fl_plus_set(problem, k, x)) {
          any = true;
          if (z.fi > 0.0) {
            push({k, x.x0 + dt * z.f0, dt * z.fi}, dt, z.ell);
          } else {
            push(interface_point(x.x0 + dt * z.f0), dt, z.ell);
          }
        }
      }
      for (const auto& z : fl_interface_set(problem, x)) {
        any = true;
        push(interface_point(x.x0 + dt * z.f0), dt, z.ell);
      }
      if (!any) {
        throw Error(ErrorKind::EmptyControlSet,
                    "no admissible control at interface node x0 = " + std::to_string(x.x0));
      }
    } else {
      const std::size_t r = n / grid.n0 - 1;
      const int plane = 1 + static_cast<int>(r / (grid.ni - 1));
      const int ii = 1 + static_cast<int>(r % (grid.ni - 1));
      const int i0 = static_cast<int>(n % grid.n0);
      const JunctionPoint x = grid.node(plane, i0, ii);
      set = fl_set(problem, plane, x);
      for (const auto& z : set) add(z, x);
      if (problem.convexify()) {
        const std::size_t m = set.size();
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = a + 1; b < m; ++b) {
            if (set[a].fi > 0.0 && set[b].fi < 0.0) add(mix_to_zero_normal(set[a], set[b]), x);
            if (set[b].fi > 0.0 && set[a].fi < 0.0) add(mix_to_zero_normal(set[b], set[a]), x);
          }
      }
    }
    if (s.cost.size() == before) s.flagged[n] = 1;
    if (s.cost.size() >= std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorKind::InvalidArgument, "stencil too large");
    }
    s.offsets[n + 1] = static_cast<std::uint32_t>(s.cost.size());
  }
  return s;
}

void apply_scheme(const Stencil& stencil, const std::vector<double>& v, std::vector<double>& next,
                  int threads) {
  if (v.size() != stencil.nodes()) throw Error(ErrorKind::InvalidArgument, "field size mismatch");
  next.resize(v.size());
  sweep(stencil, v, next, threads);
}

ValueField value_iteration(const JunctionProblem& problem, const JunctionGrid& grid,
                           const SchemeParams& params) {
  const Stencil stencil = build_stencil(problem, grid, params.dt);
  return value_iteration(stencil, grid, problem.lambda(), params);
}

ValueField value_iteration(const Stencil& stencil, const JunctionGrid& grid, double lambda,
                           const SchemeParams& params, std::vector<double>* history) {
  if (!(params.tol > 0.0) || params.max_iter < 1 || !(lambda > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "tol, max_iter and lambda must be positive");
  }
  ValueField field = make_field(grid, 0.0);
  if (stencil.nodes() != field.values.size()) {
    throw Error(ErrorKind::InvalidArgument, "stencil built for a different grid");
  }
  field.flagged = stencil.flagged;
  field.dt = params.dt;
  const double stop = params.tol * (-std::expm1(-lambda * params.dt));
  std::vector<double> next(field.values.size());
  for (int it = 1; it <= params.max_iter; ++it) {
    const double diff = sweep(stencil, field.values, next, params.threads);
    field.values.swap(next);
    field.iterations = it;
    field.residual = diff;
    if (history) history->push_back(diff);
    if (diff <= stop) {
      field.converged = true;
      return field;
    }
  }
  if (params.throw_on_stall) {
    throw Error(ErrorKind::NonConvergence,
                "value iteration did not converge in " + std::to_string(params.max_iter) +
                    " sweeps (last update " + std::to_string(field.residual) + ")");
  }
  return field;
}

void write_value_csv(std::ostream& os, const ValueField& field, PlaneIndex plane) {
  const auto& g = field.grid;
  os << "plane,i0,ii,x0,xi,value,flagged\n";
  char buf[160];
  for (int ii = 0; ii < g.ni; ++ii) {
    for (int i0 = 0; i0 < g.n0; ++i0) {
      const JunctionPoint x = g.node(plane, i0, ii);
      const std::size_t k = g.index(plane, i0, ii);
      std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g,%d\n", plane, i0, ii, x.x0, x.xi,
                    field.values[k], static_cast<int>(field.flagged[k]));
      os << buf;
    }
  }
}

double sup_convolution_window(double sup_norm, double alpha, double p_exp) {
  const double cap = std::pow(2.0 * sup_norm + std::pow(alpha, 0.5 * p_exp), 2.0 / p_exp);
  return alpha * std::sqrt(std::max(0.0, cap - alpha));
}

double sup_convolution_slope_bound(double reach, double alpha, double p_exp) {
  double z = reach;
  if (p_exp < 1.0) z = std::min(reach, std::sqrt(alpha * alpha * alpha / (1.0 - p_exp)));
  return p_exp * z / (alpha * alpha) * std::pow(z * z / (alpha * alpha) + alpha, 0.5 * p_exp - 1.0);
}

ValueField sup_convolution_x0(const ValueField& field, double alpha, double p_exp) {
  if (!(alpha > 0.0) || !(p_exp > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "sup-convolution needs alpha > 0 and p > 0");
  }
  const auto& g = field.grid;
  double sup = 0.0;
  for (double u : field.values) sup = std::max(sup, std::abs(u));
  const int reach = static_cast<int>(std::ceil(sup_convolution_window(sup, alpha, p_exp) / g.dx0()));
  ValueField out = field;
  const std::size_t rows = field.values.size() / g.n0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* u = field.values.data() + r * g.n0;
    double* w = out.values.data() + r * g.n0;
    for (int j = 0; j < g.n0; ++j) {
      double best = -std::numeric_limits<double>::infinity();
      for (int z = std::max(0, j - reach); z <= std::min(g.n0 - 1, j + reach); ++z) {
        const double d = (z - j) * g.dx0();
        best = std::max(best, u[z] - std::pow(d * d / (alpha * alpha) + alpha, 0.5 * p_exp));
      }
      w[j] = best;
    }
  }
  return out;
}

GradientReport gradient_bound_check(const ValueField& field, const JunctionProblem& problem,
                                    double R) {
  const auto& g = field.grid;
  GradientReport r;
  for (double u : field.values) r.sup_norm = std::max(r.sup_norm, std::abs(u));
  r.delta = controllability_radius(problem, g.domain(), ControllabilityMode::H3).delta;
  const double lambda = problem.lambda();
  r.c_star = r.delta > 0.0 ? 2.0 * (lambda * r.sup_norm + problem.declared().M_ell) / r.delta
                           : std::numeric_limits<double>::infinity();
  r.slack = 2.0 * std::max(g.dx0(), g.dxi()) * r.c_star;
  const double limit = r.c_star + r.slack;

  auto visit = [&](PlaneIndex pa, int a0, int ai, PlaneIndex pb, int b0, int bi, bool cross) {
    const std::size_t ia = g.index(pa, a0, ai), ib = g.index(pb, b0, bi);
    if (field.flagged[ia] || field.flagged[ib]) return;
    const JunctionPoint xa = g.node(pa, a0, ai), xb = g.node(pb, b0, bi);
    if (xa.xi > R || xb.xi > R) return;
    const double q = std::abs(field.values[ia] - field.values[ib]) / geodesic_distance(xa, xb);
    (cross ? r.max_cross_quotient : r.max_quotient) =
        std::max(cross ? r.max_cross_quotient : r.max_quotient, q);
    ++r.pairs;
    if (q > limit) ++r.violations;
  };
  for (int i0 = 0; i0 + 1 < g.n0; ++i0) visit(1, i0, 0, 1, i0 + 1, 0, false);
  for (int p = 1; p <= g.n_planes; ++p) {
    for (int ii = 1; ii < g.ni; ++ii) {
      for (int i0 = 0; i0 < g.n0; ++i0) {
        visit(p, i0, ii, p, i0, ii - 1, false);
        if (i0 + 1 < g.n0) visit(p, i0, ii, p, i0 + 1, ii, false);
      }
    }
    for (int q = p + 1; q <= g.n_planes; ++q)
      for (int i0 = 0; i0 < g.n0; ++i0) visit(p, i0, 1, q, i0, 1, true);
  }
  return r;
}

ContinuityReport continuity_across_gamma(const ValueField& field) {
  const auto& g = field.grid;
  if (g.ni < 3) throw Error(ErrorKind::InvalidArgument, "continuity check needs three xi rows");
  ContinuityReport r;
  r.per_plane.assign(g.n_planes, 0.0);
  for (int p = 1; p <= g.n_planes; ++p) {
    for (int i0 = 0; i0 < g.n0; ++i0) {
      const std::size_t k0 = g.index(kInterface, i0, 0), k1 = g.index(p, i0, 1),
                        k2 = g.index(p, i0, 2);
      if (field.flagged[k0] || field.flagged[k1] || field.flagged[k2]) continue;
      const double m =
          std::abs(2.0 * field.values[k1] - field.values[k2] - field.values[k0]);
      r.per_plane[p - 1] = std::max(r.per_plane[p - 1], m);
    }
    r.max_mismatch = std::max(r.max_mismatch, r.per_plane[p - 1]);
  }
  return r;
}

}  // namespace junction
