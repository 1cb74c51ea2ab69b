#pragma once

// Hamiltonians of the junction problem. Every control set is finite, so each
// Hamiltonian is a maximum of finitely many affine functions of the covector
// and is evaluated exactly.

#include <cstdint>
#include <span>
#include <vector>

#include "junction/problem.hpp"

namespace junction {

/// Covector p = p0 e0 + pi e_i.
struct Covector {
  double p0 = 0.0;
  double pi = 0.0;
};

/// -p.f - ell
inline double support(const FLPoint& z, const Covector& p) {
  return -p.p0 * z.f0 - p.pi * z.fi - z.ell;
}

/// Max of support over a non-empty set. Throws EmptyControlSet.
double max_support(std::span<const FLPoint> set, const Covector& p);

/// Zero-normal convex combinations of every pair with strictly opposite normal
/// components. The returned fi is exactly 0.
std::vector<FLPoint> zero_normal_mixtures(std::span<const FLPoint> set);

/// Native zero-normal points followed by zero_normal_mixtures(set).
std::vector<FLPoint> tangential_mixing(std::span<const FLPoint> set);

/// H_i(x, p): max over all atoms of plane i.
double hamiltonian(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x,
                   const Covector& p);

/// H_i^+(x, p): max over fl_plus_set. Throws EmptyControlSet when no atom
/// keeps the state in the closed half-plane.
double hamiltonian_plus(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x,
                        const Covector& p);

/// H_0(x, p0) over the interface controls. Throws EmptyControlSet if there are none.
double hamiltonian_interface(const JunctionProblem& problem, const JunctionPoint& x, double p0);

/// max_i H_i^+(x, p_i), and H_0 when interface controls exist. All covectors
/// must share the same tangential component (InvalidArgument otherwise).
double hamiltonian_gamma(const JunctionProblem& problem, const JunctionPoint& x,
                         std::span<const Covector> per_plane);

/// Tangential Hamiltonian of plane i: max over zero-normal atoms and mixtures.
double hamiltonian_tangential(const JunctionProblem& problem, PlaneIndex i,
                              const JunctionPoint& x, double p0);

/// max over planes of hamiltonian_tangential, and H_0 when interface controls exist.
double hamiltonian_tangential(const JunctionProblem& problem, const JunctionPoint& x, double p0);

/// Flat bottom of d -> H_i(x, p + d e_i).
struct MinimizerSet {
  double delta_min = 0.0;
  double delta_max = 0.0;
  double value = 0.0;
};

/// Exact minimizer interval of d -> max_k (support_k(p) - fi_k d) by building
/// the upper envelope of the lines in slope order. Needs at least one strictly
/// positive and one strictly negative normal component (UnboundedMinimizer).
MinimizerSet minimizer_set(std::span<const FLPoint> set, const Covector& p);

MinimizerSet delta_min_set(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x,
                           const Covector& p);

/// Generators of the relaxed set attached to plane i at an interface point:
/// FL_i^+(x), the zero-normal part of every other plane (mixed), and the
/// interface atoms. Its convex hull is never formed explicitly.
std::vector<FLPoint> relaxed_fl(const JunctionProblem& problem, const JunctionPoint& x,
                                PlaneIndex i);

/// Max violation (positive = violated) of each structural inequality on sampled data.
struct RegularityReport {
  double lipschitz_x = 0.0;
  double lipschitz_p = 0.0;
  double coercivity = 0.0;
  double pi_monotonicity = 0.0;
  double pseudo_coercivity = 0.0;
  double tech02 = 0.0;

  double delta = 0.0;
  double radius = 0.0;
  double cost_lipschitz = 0.0;
  int samples = 0;

  double worst() const;
};

RegularityReport hamiltonian_regularity_report(const JunctionProblem& problem,
                                               const Domain& domain, int samples,
                                               std::uint64_t seed = 7);

}  // namespace junction
