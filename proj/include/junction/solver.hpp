#pragma once

// Semi-Lagrangian value iteration on a truncated, discretized junction.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "junction/problem.hpp"

namespace junction {

/// Per-plane uniform grids x0 in [x0_min, x0_max] (n0 nodes) by xi in
/// [0, xi_max] (ni nodes). The xi = 0 row is stored once and shared.
///
/// Node layout: the interface row occupies [0, n0); row r >= 1 of plane i
/// starts at n0 + ((i - 1) * (ni - 1) + (r - 1)) * n0.
struct JunctionGrid {
  int n_planes = 2;
  double x0_min = -1.0;
  double x0_max = 1.0;
  int n0 = 3;
  double xi_max = 1.0;
  int ni = 3;

  void validate() const;
  double dx0() const { return (x0_max - x0_min) / (n0 - 1); }
  double dxi() const { return xi_max / (ni - 1); }
  std::size_t node_count() const {
    return static_cast<std::size_t>(n0) * (1 + static_cast<std::size_t>(n_planes) * (ni - 1));
  }
  std::size_t index(PlaneIndex plane, int i0, int ii) const;
  JunctionPoint node(PlaneIndex plane, int i0, int ii) const;
  Domain domain() const { return {x0_min, x0_max, xi_max}; }
};

struct ValueField {
  JunctionGrid grid;
  std::vector<double> values;
  /// Nodes where every control left the domain; their value is the bound M_ell / lambda.
  std::vector<std::uint8_t> flagged;
  int iterations = 0;
  double residual = 0.0;
  double dt = 0.0;
  bool converged = false;

  double at(PlaneIndex plane, int i0, int ii) const { return values[grid.index(plane, i0, ii)]; }
  double& at(PlaneIndex plane, int i0, int ii) { return values[grid.index(plane, i0, ii)]; }
};

/// A field of the grid filled with `value`.
ValueField make_field(const JunctionGrid& grid, double value = 0.0);

/// Bilinear interpolation inside the point's half-plane; interface points read
/// the shared row. Throws OutOfDomain outside the grid.
double interpolate(const ValueField& field, const JunctionPoint& x);

struct SchemeParams {
  double dt = 0.01;
  double tol = 1e-8;
  int max_iter = 100000;
  /// 0 picks the hardware concurrency.
  int threads = 0;
  /// Throw NonConvergence when max_iter is reached (otherwise return with converged = false).
  bool throw_on_stall = true;
};

/// One step of the scheme with a fixed control set per node, precomputed once
/// per (problem, grid, dt). Candidates of node n occupy [offsets[n], offsets[n+1]).
///
/// A candidate's foot is read by bilinear interpolation from the cell whose
/// lower row starts at node `lo` and upper row at node `hi`, with fractional
/// offsets fx (along x0) and fy (along xi).
struct Stencil {
  std::vector<std::uint32_t> offsets;
  std::vector<std::int32_t> lo;
  std::vector<std::int32_t> hi;
  std::vector<double> fx;
  std::vector<double> fy;
  /// Discounted running cost over the step and the step discount factor.
  std::vector<double> cost;
  std::vector<double> discount;
  std::vector<std::uint8_t> flagged;
  /// Value assigned to flagged nodes.
  double flagged_value = 0.0;

  std::size_t nodes() const { return flagged.size(); }
  std::size_t candidates() const { return cost.size(); }
};

/// Admissible controls at every node and the feet of their characteristics.
/// A foot crossing the interface is cut at the exact crossing time. Controls
/// whose foot leaves the truncated domain are excluded; a node left without
/// controls is flagged. Throws EmptyControlSet at an interface node with no
/// admissible control.
Stencil build_stencil(const JunctionProblem& problem, const JunctionGrid& grid, double dt);

/// v_next[n] = min over candidates of cost + discount * I[v](foot).
void apply_scheme(const Stencil& stencil, const std::vector<double>& v, std::vector<double>& next,
                  int threads = 1);

/// Fixed point of the scheme from v = 0, stopped when the sup-norm update is
/// at most tol * (1 - exp(-lambda dt)).
ValueField value_iteration(const JunctionProblem& problem, const JunctionGrid& grid,
                           const SchemeParams& params);

/// Same iteration with a prebuilt stencil; `history` receives successive sup-norm updates.
ValueField value_iteration(const Stencil& stencil, const JunctionGrid& grid, double lambda,
                           const SchemeParams& params, std::vector<double>* history = nullptr);

/// CSV columns plane, i0, ii, x0, xi, value, flagged for one plane, including
/// the shared interface row (ii = 0).
void write_value_csv(std::ostream& os, const ValueField& field, PlaneIndex plane);

// Diagnostics.

/// Sup-convolution in x0 along every (plane, xi) row:
/// u_a(x) = max_z { u(z, xi) - (|z - x0|^2 / alpha^2 + alpha)^(p/2) } over the row nodes.
ValueField sup_convolution_x0(const ValueField& field, double alpha, double p_exp);

/// Search half-width in x0 outside which no node can attain the sup-convolution.
double sup_convolution_window(double sup_norm, double alpha, double p_exp);

/// Bound on |d/dz (z^2/alpha^2 + alpha)^(p/2)| for |z| <= reach.
double sup_convolution_slope_bound(double reach, double alpha, double p_exp);

struct GradientReport {
  double max_quotient = 0.0;
  double max_cross_quotient = 0.0;
  double c_star = 0.0;
  double slack = 0.0;
  double delta = 0.0;
  double sup_norm = 0.0;
  int violations = 0;
  std::size_t pairs = 0;
};

/// Geodesic difference quotients of the field between neighbouring nodes with
/// distance to the interface below R, including pairs in different planes.
GradientReport gradient_bound_check(const ValueField& field, const JunctionProblem& problem,
                                    double R);

struct ContinuityReport {
  /// Max over interface nodes and planes of |2 u(dxi) - u(2 dxi) - u(0)|.
  double max_mismatch = 0.0;
  std::vector<double> per_plane;
};

ContinuityReport continuity_across_gamma(const ValueField& field);

}  // namespace junction
