#include "junction/trajectories.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "junction/error.hpp"
#include "junction/solver.hpp"

namespace junction {

double ControlLaw::total_horizon() const {
  double t = 0.0;
  for (const auto& s : schedule) t += s.duration;
  return t;
}

std::vector<ResolvedSegment> resolve_law(const JunctionProblem& problem, const ControlLaw& law) {
  std::vector<ResolvedSegment> out;
  for (const auto& s : law.schedule) {
    if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
      throw Error(ErrorKind::InvalidArgument, "law segment durations must be positive");
    }
    out.push_back({s.duration, problem.resolve(s.atom)});
  }
  return out;
}

namespace {

// Advances the state under one control at a time, accumulating the
// discounted running cost; optionally records knots.
class Walker {
 public:
  Walker(const JunctionProblem& problem, const JunctionPoint& start)
      : problem_(&problem), x_(canonicalize(start)) {}

  void record_into(Trajectory* trajectory) { rec_ = trajectory; }

  const JunctionPoint& state() const { return x_; }
  double time() const { return t_; }
  double cost() const { return cost_; }
  bool feasible() const { return feasible_; }

  // Splits `duration` into equal steps no longer than dt.
  bool run(const ControlRef& control, double duration, double dt) {
    const double steps = std::max(1.0, std::ceil(duration / dt * (1.0 - 1e-12)));
    const double h = duration / steps;
    for (double k = 0; k < steps; ++k) {
      if (!step(control, h)) return false;
    }
    return true;
  }

  void finish(const ControlRef& last) {
    if (rec_) rec_->samples.push_back({t_, x_, last, take_pending()});
  }

 private:
  bool step(const ControlRef& control, double h) {
    // Heights and remainders this small are rounding residue of the step split.
    const double negligible = 1e-9 * h;
    while (h > 0.0) {
      const auto z = problem_->evaluate(control, x_);
      if (!z) return fail(control, "mixture " + problem_->control_id(control) +
                                       " has no zero-normal combination here");
      if (x_.on_interface()) {
        if (control.owner == kInterface || z->fi == 0.0) {
          knot(control, "");
          charge(z->ell, h);
          x_.x0 += h * z->f0;
        } else if (z->fi > 0.0) {
          knot(control, "enter-plane-" + std::to_string(control.owner));
          if (rec_) rec_->crossings.push_back({t_, EventKind::EnterPlane, control.owner});
          charge(z->ell, h);
          x_ = {control.owner, x_.x0 + h * z->f0, h * z->fi};
        } else {
          return fail(control, problem_->control_id(control) +
                                   " points out of its half-plane on the interface");
        }
        t_ += h;
        return true;
      }
      if (control.owner != x_.plane) {
        return fail(control, problem_->control_id(control) + " is not available in half-plane " +
                                 std::to_string(x_.plane));
      }
      const double xi_next = x_.xi + h * z->fi;
      if (xi_next > negligible * std::abs(z->fi)) {
        knot(control, "");
        charge(z->ell, h);
        x_ = {x_.plane, x_.x0 + h * z->f0, xi_next};
        t_ += h;
        return true;
      }
      // Cut the step where the path meets the interface.
      const double hit = xi_next >= 0.0 ? h : std::min(h, x_.xi / -z->fi);
      knot(control, "");
      charge(z->ell, hit);
      x_ = interface_point(x_.x0 + hit * z->f0);
      t_ += hit;
      h -= hit;
      pending_ = "hit-gamma";
      if (rec_) rec_->crossings.push_back({t_, EventKind::HitInterface, kInterface});
      if (h <= negligible) {
        t_ += h;
        return true;
      }
    }
    return true;
  }

  void charge(double ell, double h) {
    const double lambda = problem_->lambda();
    cost_ += ell * std::exp(-lambda * t_) * (-std::expm1(-lambda * h)) / lambda;
  }

  std::string take_pending() {
    std::string e = std::move(pending_);
    pending_.clear();
    return e;
  }

  void knot(const ControlRef& control, std::string event) {
    if (!rec_) return;
    std::string e = take_pending();
    if (!event.empty()) e = e.empty() ? std::move(event) : e + ";" + event;
    rec_->samples.push_back({t_, x_, control, std::move(e)});
  }

  bool fail(const ControlRef& control, std::string why) {
    feasible_ = false;
    if (rec_) {
      knot(control, "infeasible");
      rec_->feasible = false;
      rec_->infeasible_at = t_;
      rec_->reason = std::move(why);
    }
    return false;
  }

  const JunctionProblem* problem_;
  JunctionPoint x_;
  double t_ = 0.0;
  double cost_ = 0.0;
  bool feasible_ = true;
  Trajectory* rec_ = nullptr;
  std::string pending_;
};

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::InvalidArgument, "integration step must be positive");
  }
}

}  // namespace

Trajectory integrate(const JunctionProblem& problem, const JunctionPoint& start,
                     const ControlLaw& law, double dt) {
  return integrate(problem, start, resolve_law(problem, law), dt);
}

Trajectory integrate(const JunctionProblem& problem, const JunctionPoint& start,
                     const std::vector<ResolvedSegment>& law, double dt) {
  check_dt(dt);
  if (law.empty()) throw Error(ErrorKind::InvalidArgument, "empty control law");
  Trajectory traj;
  Walker walker(problem, start);
  walker.record_into(&traj);
  for (const auto& seg : law) {
    if (!walker.run(seg.control, seg.duration, dt)) return traj;
  }
  walker.finish(law.back().control);
  return traj;
}

CostResult cost(const JunctionProblem& problem, const Trajectory& trajectory) {
  if (!trajectory.feasible) {
    throw Error(ErrorKind::Infeasible, "cost of an infeasible trajectory: " + trajectory.reason);
  }
  const double lambda = problem.lambda();
  CostResult r;
  const auto& s = trajectory.samples;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double h = s[k + 1].t - s[k].t;
    if (h <= 0.0) continue;
    const auto z = problem.evaluate(s[k].control, s[k].point);
    if (!z) throw Error(ErrorKind::Infeasible, "control unavailable along the trajectory");
    r.value += z->ell * std::exp(-lambda * s[k].t) * (-std::expm1(-lambda * h)) / lambda;
  }
  const double horizon = s.empty() ? 0.0 : s.back().t;
  r.truncation_bound = problem.declared().M_ell * std::exp(-lambda * horizon) / lambda;
  return r;
}

void write_trajectory_csv(std::ostream& os, const JunctionProblem& problem,
                          const Trajectory& trajectory) {
  os << "t,plane,x0,xi,atom_id,event\n";
  char buf[128];
  for (const auto& s : trajectory.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,", s.t, s.point.plane, s.point.x0,
                  s.point.xi);
    os << buf << problem.control_id(s.control) << ',' << s.event << '\n';
  }
}

namespace {

std::uint64_t family_size(std::size_t alphabet, int depth, std::uint64_t cap) {
  std::uint64_t n = 1;
  for (int d = 0; d < depth; ++d) {
    if (alphabet != 0 && n > cap / alphabet) return cap + 1;
    n *= alphabet;
  }
  return n;
}

// Depth-first enumeration of every law, sharing integrated prefixes.
template <class Leaf>
void enumerate_laws(const std::vector<ControlRef>& alphabet, int depth, int n_segments,
                    const Walker& walker, std::vector<ControlRef>& prefix,
                    const std::vector<double>& durations, double dt, std::uint64_t& laws,
                    Leaf&& leaf) {
  for (const auto& control : alphabet) {
    Walker next = walker;
    prefix.push_back(control);
    if (!next.run(control, durations[depth], dt)) {
      laws += family_size(alphabet.size(), n_segments - depth - 1,
                          std::numeric_limits<std::uint64_t>::max());
    } else if (depth + 1 == n_segments) {
      ++laws;
      leaf(next, prefix);
    } else {
      enumerate_laws(alphabet, depth + 1, n_segments, next, prefix, durations, dt, laws, leaf);
    }
    prefix.pop_back();
  }
}

}  // namespace

OracleResult brute_force_value(const JunctionProblem& problem, const JunctionPoint& start,
                               const OracleParams& params) {
  check_dt(params.dt);
  if (params.n_segments < 1 || !(params.seg_duration > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "oracle needs at least one positive-length segment");
  }
  const auto alphabet = problem.control_alphabet();
  const std::uint64_t size = family_size(alphabet.size(), params.n_segments, params.budget);
  if (size > params.budget) {
    throw Error(ErrorKind::BudgetExceeded,
                std::to_string(alphabet.size()) + "^" + std::to_string(params.n_segments) +
                    " laws exceed the budget of " + std::to_string(params.budget));
  }
  std::vector<double> durations(params.n_segments, params.seg_duration);
  const double base = params.n_segments * params.seg_duration;
  if (params.tail_horizon > base) durations.back() += params.tail_horizon - base;

  OracleResult r;
  r.value = std::numeric_limits<double>::infinity();
  std::vector<ControlRef> prefix;
  enumerate_laws(alphabet, 0, params.n_segments, Walker(problem, start), prefix, durations,
                 params.dt, r.laws, [&](const Walker& w, const std::vector<ControlRef>& law) {
                   ++r.feasible_laws;
                   if (w.cost() < r.value) {
                     r.value = w.cost();
                     r.best_law = law;
                   }
                 });
  if (r.feasible_laws == 0) {
    throw Error(ErrorKind::Infeasible,
                "no admissible law from the start point; the problem violates normal controllability");
  }
  const double lambda = problem.lambda();
  const auto& declared = problem.declared();
  r.horizon = std::max(base, params.tail_horizon);
  r.truncation = declared.M_ell * std::exp(-lambda * r.horizon) / lambda;
  const double lip = problem.cost_lipschitz().value_or(0.0);
  r.integration_term = params.dt * lip * declared.M_f * (1.0 + declared.L_f / lambda) / lambda;
  r.bracket = r.truncation + r.integration_term;
  return r;
}

double dpp_residual(const JunctionProblem& problem, const ValueField& field,
                    const JunctionPoint& start, double t, int n_segments, std::uint64_t budget) {
  if (!(t > 0.0) || n_segments < 1) {
    throw Error(ErrorKind::InvalidArgument, "DPP horizon and segment count must be positive");
  }
  const auto alphabet = problem.control_alphabet();
  if (family_size(alphabet.size(), n_segments, budget) > budget) {
    throw Error(ErrorKind::BudgetExceeded, "DPP rollout family exceeds the budget");
  }
  const Domain domain = field.grid.domain();
  const double dt = field.dt > 0.0 ? std::min(field.dt, t / n_segments) : t / n_segments;
  const double discount = std::exp(-problem.lambda() * t);
  std::vector<double> durations(n_segments, t / n_segments);
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t laws = 0;
  std::vector<ControlRef> prefix;
  enumerate_laws(alphabet, 0, n_segments, Walker(problem, start), prefix, durations, dt, laws,
                 [&](const Walker& w, const std::vector<ControlRef>&) {
                   if (!domain.contains(w.state(), 1e-12)) return;
                   best = std::min(best, w.cost() + discount * interpolate(field, w.state()));
                 });
  if (!std::isfinite(best)) {
    throw Error(ErrorKind::OutOfDomain, "every rollout leaves the value field");
  }
  return std::abs(interpolate(field, start) - best);
}

}  // namespace junction
