#include "junction/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "junction/error.hpp"
#include "junction/hamiltonians.hpp"

namespace junction {

double Affine::lipschitz() const { return std::hypot(a0, ai); }

FLPoint ControlAtom::evaluate(const JunctionPoint& x) const {
  const Velocity v = dynamics(x);
  return {v.f0, v.fi, cost(x)};
}

ControlAtom constant_atom(std::string id, double f0, double fi, double ell) {
  ControlAtom atom;
  atom.id = std::move(id);
  atom.dynamics = [f0, fi](const JunctionPoint&) { return Velocity{f0, fi}; };
  atom.cost = [ell](const JunctionPoint&) { return ell; };
  atom.cost_lipschitz = 0.0;
  return atom;
}

ControlAtom affine_atom(std::string id, Affine f0, Affine fi, Affine cost) {
  ControlAtom atom;
  atom.id = std::move(id);
  atom.dynamics = [f0, fi](const JunctionPoint& x) { return Velocity{f0(x), fi(x)}; };
  atom.cost = [cost](const JunctionPoint& x) { return cost(x); };
  atom.cost_lipschitz = cost.lipschitz();
  return atom;
}

namespace {

// cos/sin of 2*pi*k/n, exact at quarter turns so that axis directions have
// exactly zero off-axis components.
std::pair<double, double> unit_direction(int k, int n) {
  if ((4 * k) % n == 0) {
    switch ((4 * k / n) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double theta = 2.0 * std::numbers::pi * k / n;
  return {std::cos(theta), std::sin(theta)};
}

}  // namespace

std::vector<ControlAtom> disc_atoms(const std::string& id, const DiscFamily& disc, Affine cost) {
  if (disc.angle_samples < 1 || disc.rings < 1 || !(disc.radius >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "disc family '" + id + "' has invalid sampling");
  }
  std::vector<ControlAtom> out;
  auto push = [&](std::string atom_id, double scale, double c, double s) {
    ControlAtom atom;
    atom.id = std::move(atom_id);
    atom.dynamics = [disc, scale, c, s](const JunctionPoint& x) {
      const double r = disc.radius * (1.0 - disc.shrink * x.xi) * scale;
      return Velocity{disc.center0 + r * c, disc.centeri + r * s};
    };
    atom.cost = [cost](const JunctionPoint& x) { return cost(x); };
    atom.cost_lipschitz = cost.lipschitz();
    out.push_back(std::move(atom));
  };
  for (int ring = disc.rings; ring >= 1; --ring) {
    const double scale = static_cast<double>(ring) / disc.rings;
    for (int k = 0; k < disc.angle_samples; ++k) {
      const auto [c, s] = unit_direction(k, disc.angle_samples);
      std::string atom_id = id + "#";
      if (disc.rings > 1) atom_id += std::to_string(ring) + ".";
      push(atom_id + std::to_string(k), scale, c, s);
    }
  }
  if (disc.rings > 1) push(id + "#c", 0.0, 0.0, 0.0);
  return out;
}

FLPoint mix_to_zero_normal(const FLPoint& up, const FLPoint& down) {
  const double theta = -down.fi / (up.fi - down.fi);
  return {theta * up.f0 + (1.0 - theta) * down.f0, 0.0,
          theta * up.ell + (1.0 - theta) * down.ell};
}

JunctionProblem::JunctionProblem(JunctionShape shape,
                                 std::vector<std::vector<ControlAtom>> plane_controls,
                                 std::vector<ControlAtom> interface_controls, double lambda,
                                 DeclaredConstants declared, bool convexify)
    : shape_(shape),
      planes_(std::move(plane_controls)),
      interface_(std::move(interface_controls)),
      lambda_(lambda),
      declared_(declared),
      convexify_(convexify) {
  shape_.validate();
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw Error(ErrorKind::InvalidProblem, "discount lambda must be positive");
  }
  if (static_cast<int>(planes_.size()) != shape_.n_planes) {
    throw Error(ErrorKind::InvalidProblem, "expected one control set per half-plane");
  }
  auto record = [this](const std::string& id, ControlRef ref) {
    if (id.empty()) throw Error(ErrorKind::InvalidProblem, "control with empty id");
    if (id.starts_with("mix(")) {
      throw Error(ErrorKind::InvalidProblem, "control id '" + id + "' uses the reserved mix( prefix");
    }
    if (!by_id_.emplace(id, ref).second) {
      throw Error(ErrorKind::InvalidProblem, "control id '" + id + "' is not unique");
    }
  };
  for (int p = 0; p < shape_.n_planes; ++p) {
    if (planes_[p].empty()) {
      throw Error(ErrorKind::EmptyControlSet,
                  "half-plane " + std::to_string(p + 1) + " has no controls");
    }
    for (int k = 0; k < static_cast<int>(planes_[p].size()); ++k) {
      record(planes_[p][k].id, ControlRef{p + 1, k});
    }
  }
  for (int k = 0; k < static_cast<int>(interface_.size()); ++k) {
    record(interface_[k].id, ControlRef{kInterface, k});
    // Interface dynamics point along the interface only.
    auto inner = interface_[k].dynamics;
    interface_[k].dynamics = [inner](const JunctionPoint& x) {
      return Velocity{inner(x).f0, 0.0};
    };
  }
}

const std::vector<ControlAtom>& JunctionProblem::atoms(PlaneIndex i) const {
  if (!shape_.contains_plane(i)) {
    throw Error(ErrorKind::InvalidArgument, "no half-plane " + std::to_string(i));
  }
  return planes_[i - 1];
}

ControlRef JunctionProblem::resolve(const std::string& id) const {
  if (id.starts_with("mix(") && id.ends_with(")")) {
    const std::string body = id.substr(4, id.size() - 5);
    const auto comma = body.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::UnknownAtom, "malformed mixture '" + id + "'");
    }
    const ControlRef a = resolve(body.substr(0, comma));
    const ControlRef b = resolve(body.substr(comma + 1));
    if (a.is_mix() || b.is_mix() || a.owner != b.owner || a.owner == kInterface ||
        a.index == b.index) {
      throw Error(ErrorKind::UnknownAtom,
                  "mixture '" + id + "' must combine two distinct atoms of one half-plane");
    }
    return {a.owner, a.index, b.index};
  }
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) throw Error(ErrorKind::UnknownAtom, "unknown control '" + id + "'");
  return it->second;
}

std::string JunctionProblem::control_id(const ControlRef& ref) const {
  const auto& set = ref.owner == kInterface ? interface_ : atoms(ref.owner);
  if (ref.is_mix()) return "mix(" + set.at(ref.index).id + "," + set.at(ref.partner).id + ")";
  return set.at(ref.index).id;
}

std::optional<FLPoint> JunctionProblem::evaluate(const ControlRef& ref,
                                                 const JunctionPoint& x) const {
  const auto& set = ref.owner == kInterface ? interface_ : atoms(ref.owner);
  const FLPoint a = set.at(ref.index).evaluate(x);
  if (!ref.is_mix()) return a;
  const FLPoint b = set.at(ref.partner).evaluate(x);
  if (a.fi > 0.0 && b.fi < 0.0) return mix_to_zero_normal(a, b);
  if (b.fi > 0.0 && a.fi < 0.0) return mix_to_zero_normal(b, a);
  return std::nullopt;
}

std::vector<ControlRef> JunctionProblem::control_alphabet() const {
  std::vector<ControlRef> out;
  for (int p = 1; p <= shape_.n_planes; ++p) {
    const int n = static_cast<int>(planes_[p - 1].size());
    for (int k = 0; k < n; ++k) out.push_back({p, k});
    if (convexify_) {
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) out.push_back({p, a, b});
    }
  }
  for (int k = 0; k < static_cast<int>(interface_.size()); ++k) out.push_back({kInterface, k});
  return out;
}

std::optional<double> JunctionProblem::cost_lipschitz() const {
  double best = 0.0;
  auto scan = [&best](const std::vector<ControlAtom>& set) {
    for (const auto& a : set) {
      if (!a.cost_lipschitz) return false;
      best = std::max(best, *a.cost_lipschitz);
    }
    return true;
  };
  for (const auto& set : planes_)
    if (!scan(set)) return std::nullopt;
  if (!scan(interface_)) return std::nullopt;
  return best;
}

bool Domain::contains(const JunctionPoint& p, double slack) const noexcept {
  return p.x0 >= x0_min - slack && p.x0 <= x0_max + slack && p.xi >= 0.0 &&
         p.xi <= xi_max + slack;
}

std::vector<FLPoint> fl_set(const JunctionProblem& problem, PlaneIndex i, const JunctionPoint& x) {
  const auto& set = problem.atoms(i);
  if (!x.on_interface() && x.plane != i) {
    throw Error(ErrorKind::InvalidArgument,
                "point lies in half-plane " + std::to_string(x.plane) + ", not " +
                    std::to_string(i));
  }
  std::vector<FLPoint> out;
  out.reserve(set.size());
  for (const auto& atom : set) out.push_back(atom.evaluate(x));
  return out;
}

std::vector<FLPoint> fl_plus_set(const JunctionProblem& problem, PlaneIndex i,
                                 const JunctionPoint& x) {
  if (!x.on_interface()) {
    throw Error(ErrorKind::InvalidArgument, "FL_i^+ is only defined on the interface");
  }
  const auto all = fl_set(problem, i, x);
  std::vector<FLPoint> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out),
               [](const FLPoint& z) { return z.fi >= 0.0; });
  if (problem.convexify()) {
    const auto mixed = zero_normal_mixtures(all);
    out.insert(out.end(), mixed.begin(), mixed.end());
  }
  return out;
}

std::vector<FLPoint> fl_interface_set(const JunctionProblem& problem, const JunctionPoint& x) {
  std::vector<FLPoint> out;
  for (const auto& atom : problem.interface_atoms()) out.push_back(atom.evaluate(x));
  return out;
}

std::vector<FLPoint> fl_union(const JunctionProblem& problem, const JunctionPoint& x) {
  if (!x.on_interface()) return fl_set(problem, x.plane, x);
  std::vector<FLPoint> out;
  for (int i = 1; i <= problem.n_planes(); ++i) {
    const auto part = fl_plus_set(problem, i, x);
    out.insert(out.end(), part.begin(), part.end());
  }
  const auto iface = fl_interface_set(problem, x);
  out.insert(out.end(), iface.begin(), iface.end());
  return out;
}

}  // namespace junction
