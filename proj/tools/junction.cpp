#include <iostream>

#include <CLI11.hpp>

#include "junction/cli.hpp"

namespace jc = junction::cli;

int main(int argc, char** argv) {
  CLI::App app{"Optimal control on a junction of half-planes"};
  app.require_subcommand(1);

  jc::SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Value iteration; writes per-plane CSVs and report.json");
  s->add_option("problem", solve.problem, "Problem file")->required()->check(CLI::ExistingFile);
  s->add_option("--out", solve.out, "Output directory");
  s->add_option("--tol", solve.tol, "Override scheme.tol");
  s->add_option("--dt", solve.dt, "Override scheme.dt");
  s->add_option("--threads", solve.threads, "Sweep threads (0: all cores)");

  jc::CheckOptions check;
  auto* c = app.add_subcommand("check", "Report the standing assumptions");
  c->add_option("problem", check.problem, "Problem file")->required()->check(CLI::ExistingFile);
  c->add_option("--seed", check.seed, "Sampling seed");
  c->add_option("--samples", check.samples, "Random samples per control set");
  c->add_flag("--json", check.json, "JSON output");

  jc::RolloutOptions rollout;
  auto* r = app.add_subcommand("rollout", "Integrate a piecewise-constant control law");
  r->add_option("problem", rollout.problem, "Problem file")->required()->check(CLI::ExistingFile);
  r->add_option("--start", rollout.start, "plane,x0,xi")->required();
  r->add_option("--law", rollout.law, "Law file")->required()->check(CLI::ExistingFile);
  r->add_option("--out", rollout.out, "Trajectory CSV (stdout when omitted)");
  r->add_option("--dt", rollout.dt, "Integration step");

  jc::CompareOptions compare;
  auto* m = app.add_subcommand("compare", "Solver against the brute-force oracle");
  m->add_option("problem", compare.problem, "Problem file")->required()->check(CLI::ExistingFile);
  m->add_option("--point", compare.points, "plane,x0,xi (repeatable)");
  m->add_option("--points", compare.random_points, "Number of random points");
  m->add_option("--seed", compare.seed, "Seed for random points");
  m->add_option("--budget", compare.budget, "Oracle law budget");
  m->add_option("--segments", compare.segments, "Oracle segments per law");
  m->add_option("--seg-duration", compare.seg_duration, "Oracle segment length");
  m->add_option("--slack", compare.slack, "Grid-error allowance added to the oracle integration term");
  m->add_option("--tol", compare.tol, "Override scheme.tol");
  m->add_option("--dt", compare.dt, "Override scheme.dt");
  m->add_option("--threads", compare.threads, "Sweep threads (0: all cores)");
  m->add_flag("--json", compare.json, "JSON output");

  jc::EvalOptions eval;
  auto* e = app.add_subcommand("eval-hamiltonian", "Evaluate the Hamiltonians at (x, p)");
  e->add_option("problem", eval.problem, "Problem file")->required()->check(CLI::ExistingFile);
  e->add_option("--point", eval.point, "plane,x0,xi")->required();
  e->add_option("--p", eval.covector, "p0,pi")->required();
  e->add_flag("--gamma", eval.gamma, "Interface quantities (requires xi = 0)");
  e->add_flag("--json", eval.json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  try {
    if (*s) return jc::cmd_solve(solve, std::cout);
    if (*c) return jc::cmd_check(check, std::cout);
    if (*r) return jc::cmd_rollout(rollout, std::cout);
    if (*m) return jc::cmd_compare(compare, std::cout);
    if (*e) return jc::cmd_eval_hamiltonian(eval, std::cout);
  } catch (const junction::Error& err) {
    std::cerr << "error (" << junction::to_string(err.kind()) << "): " << err.what() << "\n";
    return jc::exit_code(err.kind());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return jc::kFailure;
  }
  return jc::kFailure;
}
