#pragma once

// Subcommands of the `junction` tool. Each returns a process exit code and
// writes human-readable output to `out`; library errors propagate as
// junction::Error and are mapped by exit_code().

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "junction/error.hpp"
#include "junction/geometry.hpp"
#include "junction/hamiltonians.hpp"

namespace junction::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kSchemaError = 2,
  kNonConvergence = 3,
  kInfeasible = 4,
  kBudgetExceeded = 5,
};

int exit_code(ErrorKind kind);

/// "plane,x0,xi"; xi == 0 gives the interface point.
JunctionPoint parse_point(const std::string& text);
/// "p0,pi"
Covector parse_covector(const std::string& text);

struct SolveOptions {
  std::string problem;
  std::string out = ".";
  std::optional<double> tol;
  std::optional<double> dt;
  int threads = 0;
};

/// Writes value_plane<k>.csv for every plane and report.json into `out`.
int cmd_solve(const SolveOptions& opts, std::ostream& out);

struct CheckOptions {
  std::string problem;
  std::uint64_t seed = 1;
  int samples = 2000;
  bool json = false;
};

int cmd_check(const CheckOptions& opts, std::ostream& out);

struct RolloutOptions {
  std::string problem;
  std::string start;
  std::string law;
  std::string out;
  std::optional<double> dt;
};

/// Writes the trajectory CSV to opts.out (to `out` when empty) and prints the
/// cost with its truncation bound. Infeasible laws exit with
/// kInfeasible after reporting the violating time.
int cmd_rollout(const RolloutOptions& opts, std::ostream& out);

struct CompareOptions {
  std::string problem;
  std::vector<std::string> points;
  /// Extra points drawn uniformly in the inner half of the domain.
  int random_points = 0;
  std::uint64_t seed = 1;
  std::uint64_t budget = 1'000'000;
  int segments = 2;
  /// Defaults per point to its distance to the interface (0.5 on it).
  std::optional<double> seg_duration;
  /// Allowance for the solver's grid error, added to the oracle integration term.
  double slack = 0.05;
  std::optional<double> tol;
  std::optional<double> dt;
  int threads = 0;
  bool json = false;
};

/// A point passes when the solver value lies within `allowed` of the interval
/// [oracle, oracle + untraced tail]. Returns kFailure when some point does not.
int cmd_compare(const CompareOptions& opts, std::ostream& out);

struct EvalOptions {
  std::string problem;
  std::string point;
  std::string covector;
  /// Interface quantities (H_Gamma, tangential Hamiltonians, minimizer sets).
  bool gamma = false;
  bool json = false;
};

int cmd_eval_hamiltonian(const EvalOptions& opts, std::ostream& out);

}  // namespace junction::cli
