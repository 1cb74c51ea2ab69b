#pragma once

// Intrinsic coordinates on a junction of N half-planes glued along a line.
//
// A point is stored as (plane, x0, xi): x0 runs along the shared line and xi
// is the distance to it inside half-plane `plane`. Points with xi == 0 lie on
// the interface; they carry the marker kInterface so that equality does not
// depend on which half-plane they were reached from.

#include <cstddef>
#include <functional>

namespace junction {

using PlaneIndex = int;

/// Plane marker of canonical interface points.
inline constexpr PlaneIndex kInterface = 0;

struct JunctionPoint {
  PlaneIndex plane = kInterface;
  double x0 = 0.0;
  double xi = 0.0;

  bool on_interface() const noexcept { return xi == 0.0; }

  /// Canonical equality: interface points compare by x0 only.
  friend bool operator==(const JunctionPoint& a, const JunctionPoint& b) noexcept;
};

struct JunctionShape {
  int n_planes = 2;

  /// Throws InvalidArgument unless n_planes >= 2.
  void validate() const;
  bool contains_plane(PlaneIndex p) const noexcept { return p >= 1 && p <= n_planes; }
};

/// Builds a point off the interface in `plane`, or the interface point when xi == 0.
JunctionPoint make_point(PlaneIndex plane, double x0, double xi);

/// Interface point with tangential coordinate x0.
inline JunctionPoint interface_point(double x0) { return {kInterface, x0, 0.0}; }

/// Throws InvalidPoint for negative or non-finite coordinates.
void validate_point(const JunctionPoint& p);

/// Identity off the interface; the plane marker is reset to kInterface on it.
JunctionPoint canonicalize(const JunctionPoint& p);

/// Shortest-path distance on the junction. Paths between distinct half-planes
/// go through the interface, which unfolds them into a straight segment.
double geodesic_distance(const JunctionPoint& x, const JunctionPoint& y);

inline double dist_to_interface(const JunctionPoint& p) { return p.xi; }

bool same_sheet(const JunctionPoint& x, const JunctionPoint& y) noexcept;

}  // namespace junction

template <>
struct std::hash<junction::JunctionPoint> {
  std::size_t operator()(const junction::JunctionPoint& p) const noexcept;
};
