#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "junction/geometry.hpp"

namespace junction {

/// Components of a vector field along e0 (tangential) and e_i (normal).
struct Velocity {
  double f0 = 0.0;
  double fi = 0.0;
};

/// A (dynamics, running cost) pair evaluated at one point.
struct FLPoint {
  double f0 = 0.0;
  double fi = 0.0;
  double ell = 0.0;

  friend bool operator==(const FLPoint&, const FLPoint&) = default;
};

/// c + a0*x0 + ai*xi
struct Affine {
  double c = 0.0;
  double a0 = 0.0;
  double ai = 0.0;

  double operator()(const JunctionPoint& x) const { return c + a0 * x.x0 + ai * x.xi; }
  double lipschitz() const;

  friend bool operator==(const Affine&, const Affine&) = default;
};

struct ControlAtom {
  std::string id;
  std::function<Velocity(const JunctionPoint&)> dynamics;
  std::function<double(const JunctionPoint&)> cost;
  /// Lipschitz constant of the cost when known analytically; empty for
  /// programmatic callables, in which case it is estimated by sampling.
  std::optional<double> cost_lipschitz;

  FLPoint evaluate(const JunctionPoint& x) const;
};

ControlAtom constant_atom(std::string id, double f0, double fi, double ell);
ControlAtom affine_atom(std::string id, Affine f0, Affine fi, Affine cost);

struct DiscFamily {
  double center0 = 0.0;
  double centeri = 0.0;
  double radius = 1.0;
  /// Radius at x is radius * (1 - shrink * xi).
  double shrink = 0.0;
  int angle_samples = 64;
  /// 1 samples only the boundary circle; k > 1 adds k-1 inner circles and the center.
  int rings = 1;
};

/// Expands a disc of velocities into atoms "<id>#<k>". The cost is shared.
std::vector<ControlAtom> disc_atoms(const std::string& id, const DiscFamily& disc, Affine cost);

struct DeclaredConstants {
  double M_f = 0.0;
  double M_ell = 0.0;
  double L_f = 0.0;

  friend bool operator==(const DeclaredConstants&, const DeclaredConstants&) = default;
};

/// Reference to an admissible control: a native atom of plane `owner`
/// (owner == kInterface for interface atoms) or, when `partner` >= 0, the
/// zero-normal mixture of two atoms of the same plane.
struct ControlRef {
  PlaneIndex owner = 1;
  int index = 0;
  int partner = -1;

  bool is_mix() const noexcept { return partner >= 0; }
  friend bool operator==(const ControlRef&, const ControlRef&) = default;
};

class JunctionProblem {
 public:
  JunctionProblem(JunctionShape shape, std::vector<std::vector<ControlAtom>> plane_controls,
                  std::vector<ControlAtom> interface_controls, double lambda,
                  DeclaredConstants declared, bool convexify);

  const JunctionShape& shape() const noexcept { return shape_; }
  int n_planes() const noexcept { return shape_.n_planes; }
  /// Atoms of plane i, 1-based.
  const std::vector<ControlAtom>& atoms(PlaneIndex i) const;
  const std::vector<ControlAtom>& interface_atoms() const noexcept { return interface_; }
  bool has_interface_controls() const noexcept { return !interface_.empty(); }
  double lambda() const noexcept { return lambda_; }
  const DeclaredConstants& declared() const noexcept { return declared_; }
  bool convexify() const noexcept { return convexify_; }

  /// Resolves "<id>" or "mix(<a>,<b>)". Throws UnknownAtom.
  ControlRef resolve(const std::string& id) const;
  std::string control_id(const ControlRef& ref) const;

  /// Evaluates a control at x. Mixtures exist only where the two normal
  /// components have strictly opposite signs; otherwise nullopt.
  std::optional<FLPoint> evaluate(const ControlRef& ref, const JunctionPoint& x) const;

  /// Native atoms of every plane, interface atoms, and same-plane pairs when
  /// convexify is set. Deterministic order.
  std::vector<ControlRef> control_alphabet() const;

  /// Largest analytic cost Lipschitz constant, or nullopt if some atom has none.
  std::optional<double> cost_lipschitz() const;

 private:
  JunctionShape shape_;
  std::vector<std::vector<ControlAtom>> planes_;
  std::vector<ControlAtom> interface_;
  double lambda_;
  DeclaredConstants declared_;
  bool convexify_;
  std::unordered_map<std::string, ControlRef> by_id_;
};

/// Convex combination of `up` (fi > 0) and `down` (fi < 0) whose normal
/// component vanishes; fi of the result is set to exactly 0.
FLPoint mix_to_zero_normal(const FLPoint& up, const FLPoint& down);

/// Truncated computational domain: x0 in [x0_min, x0_max], xi in [0, xi_max].
struct Domain {
  double x0_min = -1.0;
  double x0_max = 1.0;
  double xi_max = 1.0;

  bool contains(const JunctionPoint& p, double slack = 0.0) const noexcept;

  friend bool operator==(const Domain&, const Domain&) = default;
};

// Control-set constructors.

/// One FLPoint per atom of plane i evaluated at x (x in plane i or on the interface).
std::vector<FLPoint> fl_set(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x);
/// Atoms with non-negative normal component, plus zero-normal mixtures when convexify is set.
std::vector<FLPoint> fl_plus_set(const JunctionProblem& problem, PlaneIndex i,
                                 const JunctionPoint& x);
/// Interface atoms evaluated at x.
std::vector<FLPoint> fl_interface_set(const JunctionProblem& problem, const JunctionPoint& x);
/// FL(x): FL_i off the interface; union of every fl_plus_set and the interface set on it.
std::vector<FLPoint> fl_union(const JunctionProblem& problem, const JunctionPoint& x);

// Assumption checkers. Reports only; nothing here throws on a violated assumption.

struct H0H1Report {
  double M_f_est = 0.0;
  double M_ell_est = 0.0;
  double L_f_est = 0.0;
  /// Largest sampled difference quotient of the cost (linear modulus estimate).
  double omega_ell_est = 0.0;
  bool M_f_violated = false;
  bool M_ell_violated = false;
  bool L_f_violated = false;
};

H0H1Report check_H0_H1(const JunctionProblem& problem, const Domain& domain, int samples,
                       std::uint64_t seed = 1);

struct H2Report {
  /// Max over atom pairs of the distance from their midpoint to the nearest atom.
  double max_hull_violation = 0.0;
};

H2Report check_H2(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x);

/// Radius of the largest origin-centred disc inside the convex hull of the
/// plane-i velocities at x, 0 if the origin is not interior.
double h3_radius(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x);
/// min(max fi, -min fi) clamped at 0.
double h3_tilde_radius(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x);

/// Per-plane estimates at an interface point; entry k is plane k+1.
std::vector<double> check_H3(const JunctionProblem& problem, const JunctionPoint& x);
std::vector<double> check_H3_tilde(const JunctionProblem& problem, const JunctionPoint& x);

enum class ControllabilityMode { H3, H3Tilde };

struct RadiusReport {
  /// Controllability constant at the interface (min over sampled interface points and planes).
  double delta = 0.0;
  /// Largest scanned distance to the interface below which the delta/2 condition holds.
  double radius = 0.0;
  /// Scanned normal levels.
  std::vector<double> levels;
};

RadiusReport controllability_radius(const JunctionProblem& problem, const Domain& domain,
                                    ControllabilityMode mode, int n0_samples = 41,
                                    int levels = 41);

}  // namespace junction
