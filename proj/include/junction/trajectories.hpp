#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "junction/problem.hpp"

namespace junction {

struct ValueField;

struct LawSegment {
  double duration = 0.0;
  std::string atom;
};

/// Piecewise-constant control schedule.
struct ControlLaw {
  std::vector<LawSegment> schedule;

  double total_horizon() const;
};

struct ResolvedSegment {
  double duration = 0.0;
  ControlRef control;
};

/// Throws InvalidArgument for non-positive durations and UnknownAtom for unresolvable ids.
std::vector<ResolvedSegment> resolve_law(const JunctionProblem& problem, const ControlLaw& law);

enum class EventKind { HitInterface, EnterPlane };

struct Crossing {
  double t = 0.0;
  EventKind kind = EventKind::HitInterface;
  PlaneIndex plane = kInterface;
};

/// Knot k holds the state at time t and the control active on [t, t_{k+1}).
struct TrajectorySample {
  double t = 0.0;
  JunctionPoint point;
  ControlRef control;
  /// Events at this knot, ';'-joined: hit-gamma, enter-plane-<k>, infeasible.
  std::string event;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<Crossing> crossings;
  bool feasible = true;
  /// Time at which an inadmissible control was met (feasible == false).
  double infeasible_at = 0.0;
  std::string reason;
};

/// Explicit Euler with exact interface sub-stepping. A step that would cross
/// the interface stops at the crossing time; the rest of the step continues
/// from the interface, where a control of plane k enters plane k (fi > 0),
/// slides along it (fi == 0), or is inadmissible (fi < 0) and ends the
/// trajectory as infeasible.
Trajectory integrate(const JunctionProblem& problem, const JunctionPoint& start,
                     const ControlLaw& law, double dt);
Trajectory integrate(const JunctionProblem& problem, const JunctionPoint& start,
                     const std::vector<ResolvedSegment>& law, double dt);

struct CostResult {
  double value = 0.0;
  /// M_ell * exp(-lambda T) / lambda: the most the untraced tail can contribute.
  double truncation_bound = 0.0;
};

/// Discounted cost with the running cost frozen at each knot and the discount
/// integrated exactly. Throws Infeasible.
CostResult cost(const JunctionProblem& problem, const Trajectory& trajectory);

/// CSV columns t, plane, x0, xi, atom_id, event.
void write_trajectory_csv(std::ostream& os, const JunctionProblem& problem,
                          const Trajectory& trajectory);

struct OracleParams {
  int n_segments = 2;
  double seg_duration = 0.5;
  double dt = 0.01;
  /// Hard cap on the number of enumerated laws.
  std::uint64_t budget = 1'000'000;
  /// When larger than n_segments * seg_duration, the last control is held
  /// until this time.
  double tail_horizon = 0.0;
};

struct OracleResult {
  double value = 0.0;
  /// truncation + integration_term.
  double bracket = 0.0;
  double truncation = 0.0;
  double integration_term = 0.0;
  double horizon = 0.0;
  std::vector<ControlRef> best_law;
  std::uint64_t laws = 0;
  std::uint64_t feasible_laws = 0;
};

/// Exact minimum of the discounted cost over every law of n_segments
/// equal-length segments drawn from the control alphabet. Throws
/// BudgetExceeded before enumerating when the family is too large, and
/// Infeasible when no law is admissible.
OracleResult brute_force_value(const JunctionProblem& problem, const JunctionPoint& start,
                               const OracleParams& params);

/// |v(x) - min over laws of (running cost on [0, t] + exp(-lambda t) v(y(t)))|
/// with v read by interpolation. Laws ending outside the field are skipped;
/// OutOfDomain when all of them do.
double dpp_residual(const JunctionProblem& problem, const ValueField& field,
                    const JunctionPoint& start, double t, int n_segments = 1,
                    std::uint64_t budget = 1'000'000);

}  // namespace junction
