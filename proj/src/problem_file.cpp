#include "junction/problem_file.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "junction/error.hpp"

namespace junction {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Schema, "field '" + path + "': " + what);
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// Typed access to one JSON object; unknown keys are rejected.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) schema_error(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& get(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) schema_error(at(key), "missing");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number()) schema_error(at(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) schema_error(at(key), "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : (seen_.insert(key), fallback);
  }

  int integer(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number_integer()) schema_error(at(key), "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& key, int fallback) {
    return has(key) ? integer(key) : (seen_.insert(key), fallback);
  }

  std::string string(const std::string& key) {
    const json& v = get(key);
    if (!v.is_string()) schema_error(at(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_boolean()) schema_error(at(key), "expected true or false");
    return v.get<bool>();
  }

  const json& array(const std::string& key) {
    const json& v = get(key);
    if (!v.is_array()) schema_error(at(key), "expected an array");
    return v;
  }

  std::vector<double> numbers(const std::string& key, std::size_t n) {
    const json& v = array(key);
    if (v.size() != n) schema_error(at(key), "expected " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) schema_error(at(key), "expected numbers");
      out.push_back(e.get<double>());
      if (!std::isfinite(out.back())) schema_error(at(key), "must be finite");
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) schema_error(at(key), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Affine affine_from(Obj& o, const std::string& key) {
  const auto v = o.numbers(key, 3);
  return {v[0], v[1], v[2]};
}

DynamicsSpec parse_dynamics(const json& j, const std::string& path, bool interface) {
  Obj o(j, path);
  DynamicsSpec d;
  const std::string type = o.string("type");
  if (type == "constant") {
    d.type = DynamicsType::Constant;
    d.f0.c = o.number("f0");
    d.fi.c = interface ? o.number("fi", 0.0) : o.number("fi");
  } else if (type == "affine") {
    d.type = DynamicsType::Affine;
    d.f0 = affine_from(o, "f0");
    d.fi = interface && !o.has("fi") ? Affine{} : affine_from(o, "fi");
  } else if (type == "disc") {
    if (interface) schema_error(o.at("type"), "interface controls move along the interface only");
    d.type = DynamicsType::Disc;
    const auto c = o.numbers("center", 2);
    d.center0 = c[0];
    d.centeri = c[1];
    d.radius = o.number("radius");
    d.shrink = o.number("shrink", 0.0);
    d.rings = o.integer("rings", 1);
    if (!(d.radius > 0.0)) schema_error(o.at("radius"), "must be positive");
    if (d.shrink < 0.0) schema_error(o.at("shrink"), "must be non-negative");
    if (d.rings < 1) schema_error(o.at("rings"), "must be at least 1");
  } else {
    schema_error(o.at("type"), "expected constant, affine or disc, got '" + type + "'");
  }
  if (interface && !(d.fi == Affine{})) {
    schema_error(o.at("fi"), "interface dynamics have no normal component");
  }
  o.finish();
  return d;
}

CostSpec parse_cost(const json& j, const std::string& path) {
  Obj o(j, path);
  CostSpec c;
  const std::string type = o.string("type");
  if (type == "constant") {
    c.type = CostType::Constant;
    c.coeffs.c = o.number("value");
  } else if (type == "affine") {
    c.type = CostType::Affine;
    c.coeffs = affine_from(o, "coeffs");
  } else {
    schema_error(o.at("type"), "expected constant or affine, got '" + type + "'");
  }
  o.finish();
  return c;
}

std::vector<AtomSpec> parse_atoms(const json& arr, const std::string& path, bool interface,
                                  std::set<std::string>& ids) {
  std::vector<AtomSpec> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string here = path + "[" + std::to_string(k) + "]";
    Obj o(arr[k], here);
    AtomSpec a;
    a.id = o.string("id");
    if (a.id.empty()) schema_error(o.at("id"), "must not be empty");
    if (!ids.insert(a.id).second) schema_error(o.at("id"), "duplicate id '" + a.id + "'");
    a.dynamics = parse_dynamics(o.get("dynamics"), o.at("dynamics"), interface);
    a.cost = parse_cost(o.get("cost"), o.at("cost"));
    o.finish();
    out.push_back(std::move(a));
  }
  return out;
}

json affine_json(const Affine& a) { return json::array({a.c, a.a0, a.ai}); }

json atom_json(const AtomSpec& a) {
  json d;
  switch (a.dynamics.type) {
    case DynamicsType::Constant:
      d = {{"type", "constant"}, {"f0", a.dynamics.f0.c}, {"fi", a.dynamics.fi.c}};
      break;
    case DynamicsType::Affine:
      d = {{"type", "affine"}, {"f0", affine_json(a.dynamics.f0)}, {"fi", affine_json(a.dynamics.fi)}};
      break;
    case DynamicsType::Disc:
      d = {{"type", "disc"},
           {"center", {a.dynamics.center0, a.dynamics.centeri}},
           {"radius", a.dynamics.radius},
           {"shrink", a.dynamics.shrink},
           {"rings", a.dynamics.rings}};
      break;
  }
  json c = a.cost.type == CostType::Constant
               ? json{{"type", "constant"}, {"value", a.cost.coeffs.c}}
               : json{{"type", "affine"}, {"coeffs", affine_json(a.cost.coeffs)}};
  return {{"id", a.id}, {"dynamics", d}, {"cost", c}};
}

std::vector<ControlAtom> expand(const AtomSpec& a, int disc_samples) {
  const Affine cost = a.cost.coeffs;
  switch (a.dynamics.type) {
    case DynamicsType::Constant:
      if (a.cost.type == CostType::Constant) {
        return {constant_atom(a.id, a.dynamics.f0.c, a.dynamics.fi.c, cost.c)};
      }
      return {affine_atom(a.id, {a.dynamics.f0.c, 0, 0}, {a.dynamics.fi.c, 0, 0}, cost)};
    case DynamicsType::Affine:
      return {affine_atom(a.id, a.dynamics.f0, a.dynamics.fi, cost)};
    case DynamicsType::Disc: {
      DiscFamily d;
      d.center0 = a.dynamics.center0;
      d.centeri = a.dynamics.centeri;
      d.radius = a.dynamics.radius;
      d.shrink = a.dynamics.shrink;
      d.rings = a.dynamics.rings;
      d.angle_samples = disc_samples;
      return disc_atoms(a.id, d, cost);
    }
  }
  return {};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Schema, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, "syntax error at " + line_col(text, e.byte) + ": " + e.what());
  }
}

}  // namespace

ProblemFile parse_problem_file(std::string_view text) {
  const json root = parse_json(text);
  Obj o(root, "");
  ProblemFile f;
  f.schema_version = o.integer("schema_version");
  if (f.schema_version != kSchemaVersion) {
    schema_error("schema_version", "unsupported version " + std::to_string(f.schema_version));
  }
  f.lambda = o.number("lambda");
  if (!(f.lambda > 0.0)) schema_error("lambda", "must be positive");

  std::set<std::string> ids;
  const json& planes = o.array("planes");
  if (planes.size() < 2) schema_error("planes", "a junction needs at least two planes");
  for (std::size_t k = 0; k < planes.size(); ++k) {
    const std::string here = "planes[" + std::to_string(k) + "]";
    Obj p(planes[k], here);
    PlaneSpec plane;
    plane.name = p.has("name") ? p.string("name") : "P" + std::to_string(k + 1);
    const json& controls = p.array("controls");
    if (controls.empty()) schema_error(p.at("controls"), "must not be empty");
    plane.controls = parse_atoms(controls, p.at("controls"), false, ids);
    p.finish();
    f.planes.push_back(std::move(plane));
  }
  if (o.has("interface_controls")) {
    f.interface_controls =
        parse_atoms(o.array("interface_controls"), "interface_controls", true, ids);
  }

  {
    Obj d(o.get("domain"), "domain");
    const auto x0 = d.numbers("x0", 2);
    f.domain = {x0[0], x0[1], d.number("xi_max")};
    if (!(x0[1] > x0[0])) schema_error("domain.x0", "expected [min, max] with min < max");
    if (!(f.domain.xi_max > 0.0)) schema_error("domain.xi_max", "must be positive");
    d.finish();
  }
  {
    Obj g(o.get("grid"), "grid");
    f.n0 = g.integer("n0");
    f.ni = g.integer("ni");
    if (f.n0 < 2) schema_error("grid.n0", "must be at least 2");
    if (f.ni < 3) schema_error("grid.ni", "must be at least 3");
    g.finish();
  }
  if (o.has("scheme")) {
    Obj s(o.get("scheme"), "scheme");
    f.dt = s.number("dt", f.dt);
    f.tol = s.number("tol", f.tol);
    f.max_iter = s.integer("max_iter", f.max_iter);
    if (!(f.dt > 0.0)) schema_error("scheme.dt", "must be positive");
    if (!(f.lambda * f.dt < 1.0)) schema_error("scheme.dt", "lambda * dt must be below 1");
    if (!(f.tol > 0.0)) schema_error("scheme.tol", "must be positive");
    if (f.max_iter < 1) schema_error("scheme.max_iter", "must be at least 1");
    s.finish();
  }
  {
    Obj d(o.get("declared"), "declared");
    f.declared = {d.number("M_f"), d.number("M_ell"), d.number("L_f")};
    if (f.declared.M_f < 0.0) schema_error("declared.M_f", "must be non-negative");
    if (f.declared.M_ell < 0.0) schema_error("declared.M_ell", "must be non-negative");
    if (f.declared.L_f < 0.0) schema_error("declared.L_f", "must be non-negative");
    d.finish();
  }
  f.convexify = o.boolean("convexify", false);
  f.disc_samples = o.integer("disc_samples", f.disc_samples);
  if (f.disc_samples < 4) schema_error("disc_samples", "must be at least 4");
  o.finish();
  return f;
}

ProblemFile load_problem_file(const std::string& path) { return parse_problem_file(read_file(path)); }

std::string serialize(const ProblemFile& f) {
  json planes = json::array();
  for (const auto& p : f.planes) {
    json controls = json::array();
    for (const auto& a : p.controls) controls.push_back(atom_json(a));
    planes.push_back({{"name", p.name}, {"controls", controls}});
  }
  json iface = json::array();
  for (const auto& a : f.interface_controls) iface.push_back(atom_json(a));
  const json root = {
      {"schema_version", f.schema_version},
      {"lambda", f.lambda},
      {"planes", planes},
      {"interface_controls", iface},
      {"domain", {{"x0", {f.domain.x0_min, f.domain.x0_max}}, {"xi_max", f.domain.xi_max}}},
      {"grid", {{"n0", f.n0}, {"ni", f.ni}}},
      {"scheme", {{"dt", f.dt}, {"tol", f.tol}, {"max_iter", f.max_iter}}},
      {"declared", {{"M_f", f.declared.M_f}, {"M_ell", f.declared.M_ell}, {"L_f", f.declared.L_f}}},
      {"convexify", f.convexify},
      {"disc_samples", f.disc_samples},
  };
  return root.dump(2) + "\n";
}

std::string problem_hash(const ProblemFile& file) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : serialize(file)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

JunctionProblem build_problem(const ProblemFile& f) {
  std::vector<std::vector<ControlAtom>> planes;
  for (const auto& p : f.planes) {
    std::vector<ControlAtom> atoms;
    for (const auto& a : p.controls) {
      auto more = expand(a, f.disc_samples);
      atoms.insert(atoms.end(), std::make_move_iterator(more.begin()),
                   std::make_move_iterator(more.end()));
    }
    planes.push_back(std::move(atoms));
  }
  std::vector<ControlAtom> iface;
  for (const auto& a : f.interface_controls) {
    auto more = expand(a, f.disc_samples);
    iface.insert(iface.end(), std::make_move_iterator(more.begin()),
                 std::make_move_iterator(more.end()));
  }
  return JunctionProblem({static_cast<int>(f.planes.size())}, std::move(planes), std::move(iface),
                         f.lambda, f.declared, f.convexify);
}

JunctionGrid build_grid(const ProblemFile& f) {
  JunctionGrid g{static_cast<int>(f.planes.size()), f.domain.x0_min, f.domain.x0_max, f.n0,
                 f.domain.xi_max, f.ni};
  g.validate();
  return g;
}

SchemeParams build_scheme(const ProblemFile& f) {
  SchemeParams s;
  s.dt = f.dt;
  s.tol = f.tol;
  s.max_iter = f.max_iter;
  return s;
}

ControlLaw parse_law(std::string_view text) {
  const json root = parse_json(text);
  Obj o(root, "");
  const json& schedule = o.array("schedule");
  if (schedule.empty()) schema_error("schedule", "must not be empty");
  ControlLaw law;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    Obj s(schedule[k], "schedule[" + std::to_string(k) + "]");
    LawSegment seg;
    seg.duration = s.number("duration");
    seg.atom = s.string("atom");
    if (!(seg.duration > 0.0)) schema_error(s.at("duration"), "must be positive");
    s.finish();
    law.schedule.push_back(std::move(seg));
  }
  o.finish();
  return law;
}

ControlLaw load_law(const std::string& path) { return parse_law(read_file(path)); }

}  // namespace junction
