#pragma once

// Declarative problem files (JSON). One file carries the problem, the grid and
// the scheme parameters so that every subcommand sees the same problem.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "junction/problem.hpp"
#include "junction/solver.hpp"
#include "junction/trajectories.hpp"

namespace junction {

inline constexpr int kSchemaVersion = 1;

enum class DynamicsType { Constant, Affine, Disc };
enum class CostType { Constant, Affine };

struct DynamicsSpec {
  DynamicsType type = DynamicsType::Constant;
  /// constant: f0 = f0.c, fi = fi.c; affine: both fields in full.
  Affine f0;
  Affine fi;
  /// disc only.
  double center0 = 0.0;
  double centeri = 0.0;
  double radius = 1.0;
  double shrink = 0.0;
  int rings = 1;

  friend bool operator==(const DynamicsSpec&, const DynamicsSpec&) = default;
};

struct CostSpec {
  CostType type = CostType::Constant;
  /// constant: coeffs.c is the value.
  Affine coeffs;

  friend bool operator==(const CostSpec&, const CostSpec&) = default;
};

struct AtomSpec {
  std::string id;
  DynamicsSpec dynamics;
  CostSpec cost;

  friend bool operator==(const AtomSpec&, const AtomSpec&) = default;
};

struct PlaneSpec {
  std::string name;
  std::vector<AtomSpec> controls;

  friend bool operator==(const PlaneSpec&, const PlaneSpec&) = default;
};

struct ProblemFile {
  int schema_version = kSchemaVersion;
  double lambda = 1.0;
  std::vector<PlaneSpec> planes;
  std::vector<AtomSpec> interface_controls;
  Domain domain;
  int n0 = 3;
  int ni = 3;
  double dt = 0.01;
  double tol = 1e-8;
  int max_iter = 100000;
  DeclaredConstants declared;
  bool convexify = false;
  int disc_samples = 64;

  friend bool operator==(const ProblemFile&, const ProblemFile&) = default;
};

/// Throws Error(Schema) naming the offending field, or the line and column of
/// a syntax error.
ProblemFile parse_problem_file(std::string_view text);
ProblemFile load_problem_file(const std::string& path);

/// Canonical JSON: sorted keys, every field written out.
std::string serialize(const ProblemFile& file);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string problem_hash(const ProblemFile& file);

JunctionProblem build_problem(const ProblemFile& file);
JunctionGrid build_grid(const ProblemFile& file);
SchemeParams build_scheme(const ProblemFile& file);

/// {"schedule": [{"duration": d, "atom": "id"}, ...]}
ControlLaw parse_law(std::string_view text);
ControlLaw load_law(const std::string& path);

}  // namespace junction
