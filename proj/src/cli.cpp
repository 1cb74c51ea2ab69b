#include "junction/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "junction/problem_file.hpp"
#include "junction/solver.hpp"
#include "junction/trajectories.hpp"

namespace junction::cli {

using nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Schema:
    case ErrorKind::InvalidProblem:
      return kSchemaError;
    case ErrorKind::NonConvergence:
      return kNonConvergence;
    case ErrorKind::Infeasible:
    case ErrorKind::EmptyControlSet:
      return kInfeasible;
    case ErrorKind::BudgetExceeded:
      return kBudgetExceeded;
    default:
      return kFailure;
  }
}

namespace {

std::vector<double> split_numbers(const std::string& text, std::size_t n, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, std::string("cannot parse ") + what + " '" + text + "'");
    }
  }
  if (out.size() != n) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + " needs " + std::to_string(n) + " comma-separated numbers");
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v + 0.0);
  return buf;
}

std::string describe(const JunctionPoint& x) {
  if (x.on_interface()) return "(G, " + fmt(x.x0) + ")";
  return "(P" + std::to_string(x.plane) + ", " + fmt(x.x0) + ", " + fmt(x.xi) + ")";
}

struct Loaded {
  ProblemFile file;
  JunctionProblem problem;
};

Loaded load(const std::string& path) {
  ProblemFile file = load_problem_file(path);
  JunctionProblem problem = build_problem(file);
  return {std::move(file), std::move(problem)};
}

SchemeParams scheme_for(const ProblemFile& file, std::optional<double> tol, std::optional<double> dt,
                        int threads) {
  SchemeParams s = build_scheme(file);
  if (tol) s.tol = *tol;
  if (dt) s.dt = *dt;
  s.threads = threads;
  return s;
}

}  // namespace

JunctionPoint parse_point(const std::string& text) {
  const auto v = split_numbers(text, 3, "point");
  const double plane = v[0];
  if (plane != std::floor(plane)) throw Error(ErrorKind::InvalidPoint, "plane must be an integer");
  const JunctionPoint x = make_point(static_cast<PlaneIndex>(plane), v[1], v[2]);
  validate_point(x);
  return x;
}

Covector parse_covector(const std::string& text) {
  const auto v = split_numbers(text, 2, "covector");
  return {v[0], v[1]};
}

int cmd_solve(const SolveOptions& opts, std::ostream& out) {
  const Loaded in = load(opts.problem);
  const JunctionGrid grid = build_grid(in.file);
  SchemeParams scheme = scheme_for(in.file, opts.tol, opts.dt, opts.threads);
  scheme.throw_on_stall = false;

  const auto t0 = std::chrono::steady_clock::now();
  const Stencil stencil = build_stencil(in.problem, grid, scheme.dt);
  const auto t1 = std::chrono::steady_clock::now();
  const ValueField field = value_iteration(stencil, grid, in.problem.lambda(), scheme);
  const auto t2 = std::chrono::steady_clock::now();

  std::filesystem::create_directories(opts.out);
  for (int p = 1; p <= grid.n_planes; ++p) {
    std::ofstream csv(std::filesystem::path(opts.out) / ("value_plane" + std::to_string(p) + ".csv"));
    write_value_csv(csv, field, p);
  }
  std::size_t flagged = 0;
  for (auto f : field.flagged) flagged += f;

  const H0H1Report h01 = check_H0_H1(in.problem, grid.domain(), 500);
  const RadiusReport h3 =
      controllability_radius(in.problem, grid.domain(), ControllabilityMode::H3, 21, 11);
  const RadiusReport h3t =
      controllability_radius(in.problem, grid.domain(), ControllabilityMode::H3Tilde, 21, 11);
  const json report = {
      {"converged", field.converged},
      {"iterations", field.iterations},
      {"residual", field.residual},
      {"tol", scheme.tol},
      {"dt", field.dt},
      {"grid",
       {{"n_planes", grid.n_planes},
        {"x0", {grid.x0_min, grid.x0_max}},
        {"xi_max", grid.xi_max},
        {"n0", grid.n0},
        {"ni", grid.ni}}},
      {"problem_hash", problem_hash(in.file)},
      {"flagged_nodes", flagged},
      {"candidates", stencil.candidates()},
      {"threads", scheme.threads},
      {"timing",
       {{"stencil_s", std::chrono::duration<double>(t1 - t0).count()},
        {"iteration_s", std::chrono::duration<double>(t2 - t1).count()}}},
      {"assumption_reports",
       {{"M_f_est", h01.M_f_est},
        {"M_ell_est", h01.M_ell_est},
        {"L_f_est", h01.L_f_est},
        {"M_f_violated", h01.M_f_violated},
        {"M_ell_violated", h01.M_ell_violated},
        {"L_f_violated", h01.L_f_violated},
        {"delta_H3", h3.delta},
        {"radius_H3", h3.radius},
        {"delta_H3_tilde", h3t.delta},
        {"radius_H3_tilde", h3t.radius}}},
  };
  std::ofstream(std::filesystem::path(opts.out) / "report.json") << report.dump(2) << "\n";

  out << (field.converged ? "converged" : "NOT converged") << " after " << field.iterations
      << " sweeps, residual " << fmt(field.residual) << ", " << flagged << " flagged nodes\n";
  out << "wrote " << grid.n_planes << " value CSVs and report.json to " << opts.out << "\n";
  return field.converged ? kOk : kNonConvergence;
}

int cmd_check(const CheckOptions& opts, std::ostream& out) {
  const Loaded in = load(opts.problem);
  const Domain domain = in.file.domain;
  const auto& declared = in.problem.declared();
  const H0H1Report h01 = check_H0_H1(in.problem, domain, opts.samples, opts.seed);

  std::vector<double> h2(in.problem.n_planes(), 0.0);
  for (int k = 0; k < 11; ++k) {
    const JunctionPoint x =
        interface_point(domain.x0_min + (domain.x0_max - domain.x0_min) * k / 10.0);
    for (int i = 1; i <= in.problem.n_planes(); ++i) {
      h2[i - 1] = std::max(h2[i - 1], check_H2(in.problem, i, x).max_hull_violation);
    }
  }
  const RadiusReport h3 = controllability_radius(in.problem, domain, ControllabilityMode::H3);
  const RadiusReport h3t = controllability_radius(in.problem, domain, ControllabilityMode::H3Tilde);

  if (opts.json) {
    const json j = {
        {"H0_H1",
         {{"M_f_est", h01.M_f_est},
          {"M_f_declared", declared.M_f},
          {"M_f_violated", h01.M_f_violated},
          {"M_ell_est", h01.M_ell_est},
          {"M_ell_declared", declared.M_ell},
          {"M_ell_violated", h01.M_ell_violated},
          {"L_f_est", h01.L_f_est},
          {"L_f_declared", declared.L_f},
          {"L_f_violated", h01.L_f_violated},
          {"omega_ell_est", h01.omega_ell_est}}},
        {"H2", {{"max_hull_violation", h2}}},
        {"H3", {{"delta", h3.delta}, {"radius", h3.radius}, {"holds", h3.delta > 0.0}}},
        {"H3_tilde", {{"delta", h3t.delta}, {"radius", h3t.radius}, {"holds", h3t.delta > 0.0}}},
    };
    out << j.dump(2) << "\n";
    return kOk;
  }
  auto line = [&](const char* name, double est, double dec, bool bad) {
    out << "  " << name << ": estimate " << fmt(est) << ", declared " << fmt(dec)
        << (bad ? "  VIOLATED" : "  ok") << "\n";
  };
  out << "bounds and Lipschitz constants (" << opts.samples << " samples per set)\n";
  line("M_f  ", h01.M_f_est, declared.M_f, h01.M_f_violated);
  line("M_ell", h01.M_ell_est, declared.M_ell, h01.M_ell_violated);
  line("L_f  ", h01.L_f_est, declared.L_f, h01.L_f_violated);
  out << "  cost modulus estimate " << fmt(h01.omega_ell_est) << "\n";
  out << "convexity of FL_i on the interface (midpoint distance to nearest atom)\n";
  for (std::size_t i = 0; i < h2.size(); ++i) {
    out << "  plane " << i + 1 << ": " << fmt(h2[i]) << "\n";
  }
  out << "strong controllability: delta " << fmt(h3.delta) << ", radius " << fmt(h3.radius)
      << (h3.delta > 0.0 ? "" : "  FAILS") << "\n";
  out << "normal controllability: delta " << fmt(h3t.delta) << ", radius " << fmt(h3t.radius)
      << (h3t.delta > 0.0 ? "" : "  FAILS") << "\n";
  return kOk;
}

int cmd_rollout(const RolloutOptions& opts, std::ostream& out) {
  const Loaded in = load(opts.problem);
  const JunctionPoint start = parse_point(opts.start);
  const ControlLaw law = load_law(opts.law);
  const double dt = opts.dt.value_or(in.file.dt);
  const Trajectory traj = integrate(in.problem, start, law, dt);

  if (opts.out.empty()) {
    write_trajectory_csv(out, in.problem, traj);
  } else {
    std::ofstream csv(opts.out);
    write_trajectory_csv(csv, in.problem, traj);
  }
  if (!traj.feasible) {
    out << "infeasible at t = " << fmt(traj.infeasible_at) << ": " << traj.reason << "\n";
    return kInfeasible;
  }
  const CostResult c = cost(in.problem, traj);
  out << "cost " << fmt(c.value) << " over [0, " << fmt(law.total_horizon())
      << "]; untraced tail at most " << fmt(c.truncation_bound) << "\n";
  out << traj.crossings.size() << " interface events\n";
  return kOk;
}

int cmd_compare(const CompareOptions& opts, std::ostream& out) {
  const Loaded in = load(opts.problem);
  const JunctionGrid grid = build_grid(in.file);
  std::vector<JunctionPoint> points;
  for (const auto& s : opts.points) points.push_back(parse_point(s));
  std::mt19937_64 rng(opts.seed);
  const Domain d = in.file.domain;
  const double c0 = 0.5 * (d.x0_min + d.x0_max), h0 = 0.25 * (d.x0_max - d.x0_min);
  std::uniform_real_distribution<double> u0(c0 - h0, c0 + h0), ui(0.0, 0.5 * d.xi_max);
  std::uniform_int_distribution<int> plane(1, in.problem.n_planes());
  for (int k = 0; k < opts.random_points; ++k) {
    const int p = plane(rng);
    const double x0 = u0(rng);
    points.push_back(make_point(p, x0, ui(rng)));
  }
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "no comparison points");

  const SchemeParams scheme = scheme_for(in.file, opts.tol, opts.dt, opts.threads);
  const ValueField field = value_iteration(in.problem, grid, scheme);

  const double lambda = in.problem.lambda();
  const double M_ell = in.problem.declared().M_ell;
  int failures = 0;
  json rows = json::array();
  if (!opts.json) out << "point, solver, oracle, tail, gap, allowed, result\n";
  for (const auto& x : points) {
    OracleParams op;
    op.n_segments = opts.segments;
    op.seg_duration = opts.seg_duration.value_or(x.on_interface() ? 0.5 : x.xi);
    op.dt = scheme.dt;
    op.budget = opts.budget;
    op.tail_horizon = M_ell > 0.0 ? std::log(M_ell / (lambda * 1e-3)) / lambda : 0.0;
    const OracleResult o = brute_force_value(in.problem, x, op);
    const double v = interpolate(field, x);
    // Distance from the solver value to [oracle, oracle + untraced tail].
    const double gap = v < o.value ? o.value - v : std::max(0.0, v - o.value - o.truncation);
    const double allowed = o.integration_term + opts.slack;
    const bool pass = gap <= allowed;
    failures += !pass;
    if (opts.json) {
      rows.push_back({{"plane", x.plane},
                      {"x0", x.x0},
                      {"xi", x.xi},
                      {"solver", v},
                      {"oracle", o.value},
                      {"truncation", o.truncation},
                      {"integration_term", o.integration_term},
                      {"gap", gap},
                      {"allowed", allowed},
                      {"laws", o.laws},
                      {"pass", pass}});
    } else {
      out << describe(x) << ", " << fmt(v) << ", " << fmt(o.value) << ", " << fmt(o.truncation)
          << ", " << fmt(gap) << ", " << fmt(allowed) << ", " << (pass ? "pass" : "FAIL") << "\n";
    }
  }
  if (opts.json) out << json{{"points", rows}, {"failures", failures}}.dump(2) << "\n";
  return failures == 0 ? kOk : kFailure;
}

int cmd_eval_hamiltonian(const EvalOptions& opts, std::ostream& out) {
  const Loaded in = load(opts.problem);
  const JunctionPoint x = parse_point(opts.point);
  const Covector p = parse_covector(opts.covector);
  const JunctionProblem& problem = in.problem;

  if (!x.on_interface()) {
    if (opts.gamma) {
      throw Error(ErrorKind::InvalidArgument,
                  "interface Hamiltonians are only defined at points with xi = 0");
    }
    const double h = hamiltonian(problem, x.plane, x, p);
    if (opts.json) {
      out << json{{"plane", x.plane}, {"H", h}}.dump(2) << "\n";
    } else {
      out << "H_" << x.plane << " = " << fmt(h) << "\n";
    }
    return kOk;
  }

  json planes = json::array();
  std::vector<Covector> same(problem.n_planes(), p);
  for (int i = 1; i <= problem.n_planes(); ++i) {
    json row = {{"plane", i},
                {"H", hamiltonian(problem, i, x, p)},
                {"H_tangential", hamiltonian_tangential(problem, i, x, p.p0)}};
    try {
      row["H_plus"] = hamiltonian_plus(problem, i, x, p);
    } catch (const Error& e) {
      row["H_plus"] = nullptr;
    }
    try {
      const MinimizerSet m = delta_min_set(problem, i, x, p);
      row["delta_min"] = m.delta_min;
      row["delta_max"] = m.delta_max;
      row["min_value"] = m.value;
      row["identity_gap"] = std::abs(m.value - row["H_tangential"].get<double>());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnboundedMinimizer) throw;
      row["delta_min"] = nullptr;
    }
    planes.push_back(row);
  }
  json result = {{"planes", planes},
                 {"H_gamma", hamiltonian_gamma(problem, x, same)},
                 {"H_gamma_tangential", hamiltonian_tangential(problem, x, p.p0)}};
  if (problem.has_interface_controls()) {
    result["H_0"] = hamiltonian_interface(problem, x, p.p0);
  }
  if (opts.json) {
    out << result.dump(2) << "\n";
    return kOk;
  }
  for (const auto& row : planes) {
    const int i = row["plane"].get<int>();
    out << "plane " << i << ": H = " << fmt(row["H"].get<double>()) << ", H+ = "
        << (row["H_plus"].is_null() ? std::string("undefined") : fmt(row["H_plus"].get<double>()))
        << ", H_T = " << fmt(row["H_tangential"].get<double>()) << "\n";
    if (row["delta_min"].is_null()) {
      out << "  minimizer set: unbounded (normal components are one-sided)\n";
    } else {
      out << "  minimizer set: [" << fmt(row["delta_min"].get<double>()) << ", "
          << fmt(row["delta_max"].get<double>()) << "], min value "
          << fmt(row["min_value"].get<double>()) << ", |min - H_T| = "
          << fmt(row["identity_gap"].get<double>()) << "\n";
    }
  }
  out << "H_Gamma = " << fmt(result["H_gamma"].get<double>()) << ", H_Gamma^T = "
      << fmt(result["H_gamma_tangential"].get<double>()) << "\n";
  if (result.contains("H_0")) out << "H_0 = " << fmt(result["H_0"].get<double>()) << "\n";
  return kOk;
}

}  // namespace junction::cli
