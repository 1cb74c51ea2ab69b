#include <doctest.h>

#include <cmath>
#include <sstream>

#include "junction/error.hpp"
#include "junction/solver.hpp"
#include "support.hpp"

using namespace junction;

namespace {

JunctionProblem unit_cost(double ell = 1.0) {
  return JunctionProblem({2},
                         {{constant_atom("in", 0.3, 1, ell), constant_atom("out", -0.2, -1, ell)},
                          {constant_atom("up", 0, 1, ell), constant_atom("down", 0.5, -0.5, ell)}},
                         {}, 1.0, {1.2, ell, 0}, false);
}

SchemeParams params(double dt, double tol = 1e-10) {
  SchemeParams sp;
  sp.dt = dt;
  sp.tol = tol;
  return sp;
}

}  // namespace

TEST_CASE("grid layout") {
  const JunctionGrid g{3, -1, 1, 5, 2, 4};
  CHECK(g.node_count() == 5u * (1 + 3 * 3));
  CHECK(g.index(kInterface, 2, 0) == 2u);
  CHECK(g.index(2, 2, 0) == 2u);
  CHECK(g.index(1, 0, 1) == 5u);
  CHECK(g.index(2, 1, 1) == 5u * 4 + 1);
  CHECK(g.index(3, 4, 3) == g.node_count() - 1);
  CHECK(g.node(1, 4, 3).x0 == 1.0);
  CHECK(g.node(1, 4, 3).xi == 2.0);
  CHECK(g.node(3, 0, 0).on_interface());
  CHECK_THROWS_AS(g.index(1, 5, 0), Error);
  CHECK_THROWS_AS(make_field({1, -1, 1, 5, 1, 4}), Error);
  CHECK_THROWS_AS(make_field({2, 1, 1, 5, 1, 4}), Error);
}

TEST_CASE("interpolation") {
  const JunctionGrid g{2, -1, 1, 9, 1, 5};
  auto f = make_field(g);
  for (int p = 1; p <= 2; ++p)
    for (int i0 = 0; i0 < g.n0; ++i0)
      for (int ii = 0; ii < g.ni; ++ii) {
        const auto x = g.node(p, i0, ii);
        f.at(p, i0, ii) = 0.5 + 2 * x.x0 + (p == 1 ? -3 : 4) * x.xi;
      }
  CHECK(interpolate(f, g.node(2, 3, 2)) == f.at(2, 3, 2));
  CHECK(interpolate(f, {1, 0.1, 0.0}) == interpolate(f, {2, 0.1, 0.0}));
  CHECK(interpolate(f, interface_point(0.1)) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(interpolate(f, {1, 0.125, 0.375}) == doctest::Approx(0.5 + 0.25 - 1.125).epsilon(1e-14));
  CHECK(interpolate(f, {2, -0.93, 0.81}) == doctest::Approx(0.5 - 1.86 + 3.24).epsilon(1e-13));
  CHECK(interpolate(f, {1, 1.0, 1.0}) == doctest::Approx(2.5 - 3).epsilon(1e-14));
  CHECK_THROWS_AS(interpolate(f, {1, 1.5, 0.5}), Error);
  CHECK_THROWS_AS(interpolate(f, {1, 0, 1.5}), Error);
  CHECK_THROWS_AS(interpolate(f, {3, 0, 0.5}), Error);
}

TEST_CASE("constant cost is an exact fixed point") {
  const auto pb = unit_cost();
  const auto f = value_iteration(pb, {2, -1, 1, 21, 1, 11}, params(0.05, 1e-12));
  CHECK(f.converged);
  for (double v : f.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
  const auto disc = support::disc_problem(1, 1, 16);
  const auto g = value_iteration(disc, {2, -1, 1, 21, 1, 11}, params(0.05, 1e-12));
  for (double v : g.values) CHECK(std::abs(v - 1.0) <= 1e-10);
}

TEST_CASE("boundary rule excludes outward feet and flags empty nodes") {
  const JunctionProblem pb({2},
                           {{constant_atom("up", 0, 1, 0.5)},
                            {constant_atom("up2", 0, 1, 0.5), constant_atom("down2", 0, -1, 0.25)}},
                           {}, 1.0, {1, 1, 0}, false);
  const JunctionGrid g{2, -1, 1, 11, 1, 11};
  const auto st = build_stencil(pb, g, 0.05);
  CHECK(st.flagged_value == 1.0);
  for (int i0 = 0; i0 < g.n0; ++i0) {
    CHECK(st.flagged[g.index(1, i0, 10)] == 1);
    CHECK(st.flagged[g.index(1, i0, 5)] == 0);
    const auto top2 = g.index(2, i0, 10);
    CHECK(st.flagged[top2] == 0);
    CHECK(st.offsets[top2 + 1] - st.offsets[top2] == 1u);
    CHECK(st.cost[st.offsets[top2]] == doctest::Approx(0.25 * (1 - std::exp(-0.05))).epsilon(1e-14));
  }
  auto sp = params(0.05, 1e-11);
  const auto f = value_iteration(pb, g, sp);
  CHECK(f.at(1, 3, 10) == 1.0);
  CHECK(f.flagged[g.index(1, 3, 10)] == 1);
  // Only the inward atom competes at the top row.
  const double x0 = g.node(2, 3, 10).x0;
  CHECK(f.at(2, 3, 10) == doctest::Approx(0.25 * (1 - std::exp(-0.05)) +
                                          std::exp(-0.05) * interpolate(f, {2, x0, 0.95}))
                              .epsilon(1e-9));
  for (double v : f.values) CHECK(v <= 1.0 + 1e-9);
}

TEST_CASE("empty interface control set") {
  const JunctionProblem pb({2}, {{constant_atom("o", 0, -1, 1)}, {constant_atom("p", 1, -1, 1)}}, {},
                           1.0, {2, 1, 0}, false);
  try {
    build_stencil(pb, {2, -1, 1, 5, 1, 5}, 0.1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyControlSet);
  }
}

TEST_CASE("scheme parameter errors") {
  const auto pb = unit_cost();
  CHECK_THROWS_AS(value_iteration(pb, {2, -1, 1, 5, 1, 5}, params(0.0)), Error);
  CHECK_THROWS_AS(value_iteration(pb, {2, -1, 1, 5, 1, 5}, params(1.5)), Error);
  auto sp = params(0.05, 1e-14);
  sp.max_iter = 3;
  try {
    value_iteration(pb, {2, -1, 1, 5, 1, 5}, sp);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonConvergence);
  }
  sp.throw_on_stall = false;
  const auto f = value_iteration(pb, {2, -1, 1, 5, 1, 5}, sp);
  CHECK_FALSE(f.converged);
  CHECK(f.iterations == 3);
}

TEST_CASE("contraction, bound and monotonicity") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto pb = support::random_problem(rng, t % 2 == 0, 2 + t % 2, t % 3 == 0);
    const JunctionGrid g{pb.n_planes(), -1, 1, 21, 1, 11};
    const double dt = g.dxi() / 4.0 / 2.0;  // M_f * dt <= dxi with |f| < 2 sqrt 2
    const auto st = build_stencil(pb, g, dt);
    std::vector<double> history;
    const auto f = value_iteration(st, g, pb.lambda(), params(dt, 1e-9), &history);
    CHECK(f.converged);
    const double q = std::exp(-pb.lambda() * dt);
    for (std::size_t k = 2; k < history.size(); ++k) {
      CHECK(history[k] <= (q + 1e-12) * history[k - 1] + 1e-15);
    }
    const double bound = pb.declared().M_ell / pb.lambda();
    for (double v : f.values) CHECK(std::abs(v) <= bound + 1e-9);

    std::uniform_real_distribution<double> u(-bound, bound), bump(0.0, 0.3);
    std::vector<double> v(g.node_count()), w(g.node_count()), a(g.node_count()), b(g.node_count());
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] = u(rng);
      w[k] = v[k] + bump(rng);
    }
    apply_scheme(st, v, a);
    apply_scheme(st, w, b);
    for (std::size_t k = 0; k < v.size(); ++k) CHECK(a[k] <= b[k]);
  }
}

TEST_CASE("results do not depend on the thread count") {
  const auto pb = support::disc_problem(1, 0.2, 32);
  const JunctionGrid g{2, -2, 2, 81, 2, 41};
  std::vector<double> reference;
  for (int threads : {1, 2, 3, 8}) {
    auto sp = params(0.02, 1e-8);
    sp.threads = threads;
    const auto f = value_iteration(pb, g, sp);
    if (reference.empty()) reference = f.values;
    CHECK(f.values == reference);
  }
}

TEST_CASE("two-plane closed form on a coarse grid") {
  const auto pb = support::disc_problem(1, 0, 32);
  const JunctionGrid g{2, -2, 2, 81, 2, 41};
  const auto f = value_iteration(pb, g, params(0.02, 1e-8));
  double err = 0.0;
  for (int i0 = 20; i0 <= 60; ++i0)
    for (int ii = 0; ii <= 20; ++ii) {
      const auto x = g.node(1, i0, ii);
      err = std::max(err, std::abs(f.at(1, i0, ii) - (1 - std::exp(-x.xi))));
      CHECK(std::abs(f.at(2, i0, ii)) <= 1e-12);
    }
  CHECK(err <= 0.05);

  const auto grad = gradient_bound_check(f, pb, 1.0);
  CHECK(grad.delta == doctest::Approx(1.0).epsilon(0.01));
  CHECK(grad.c_star <= 4.0 + 1e-9);
  CHECK(grad.max_quotient <= 1.05);
  CHECK(grad.max_cross_quotient <= 1.05);
  CHECK(grad.max_quotient <= grad.c_star);
  CHECK(grad.violations == 0);
  CHECK(grad.pairs > 0);

  const auto cont = continuity_across_gamma(f);
  CHECK(cont.per_plane.size() == 2u);
  CHECK(cont.per_plane[1] == 0.0);
  CHECK(cont.max_mismatch <= 0.05);
}

TEST_CASE("diagnostics on constant and decoupled fields") {
  const JunctionGrid g{2, -1, 1, 11, 1, 6};
  auto f = make_field(g, 0.7);
  const auto pb = support::disc_problem(1, 1, 16);
  const auto grad = gradient_bound_check(f, pb, 1.0);
  CHECK(grad.max_quotient == 0.0);
  CHECK(grad.max_cross_quotient == 0.0);
  CHECK(continuity_across_gamma(f).max_mismatch == 0.0);

  for (int i0 = 0; i0 < g.n0; ++i0) f.at(kInterface, i0, 0) = -0.3;
  CHECK(continuity_across_gamma(f).max_mismatch == doctest::Approx(1.0));
}

TEST_CASE("sup-convolution in x0") {
  const JunctionGrid g{2, -1, 1, 41, 1, 6};
  const double alpha = 0.2, p = 0.5;
  const auto c = sup_convolution_x0(make_field(g, 0.4), alpha, p);
  for (double v : c.values) CHECK(v == doctest::Approx(0.4 - std::pow(alpha, p / 2)).epsilon(1e-14));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  auto f = make_field(g);
  for (auto& v : f.values) v = u(rng);
  const auto s = sup_convolution_x0(f, alpha, p);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    CHECK(s.values[k] >= f.values[k] - std::pow(alpha, p / 2) - 1e-15);
  }
  // Exhaustive maximum over the whole row agrees with the windowed one.
  for (int i0 = 0; i0 < g.n0; ++i0) {
    double best = -INFINITY;
    for (int z = 0; z < g.n0; ++z) {
      const double d = (z - i0) * g.dx0();
      best = std::max(best, f.at(1, z, 3) - std::pow(d * d / (alpha * alpha) + alpha, p / 2));
    }
    CHECK(s.at(1, i0, 3) == best);
  }
  const double window = sup_convolution_window(1.0, alpha, p);
  const double slope = sup_convolution_slope_bound(window + g.dx0(), alpha, p);
  for (int ii = 0; ii < g.ni; ++ii)
    for (int i0 = 0; i0 + 1 < g.n0; ++i0) {
      CHECK(std::abs(s.at(2, i0 + 1, ii) - s.at(2, i0, ii)) / g.dx0() <= slope + 1e-12);
    }
  CHECK(sup_convolution_window(0.0, alpha, p) == 0.0);
  CHECK(sup_convolution_slope_bound(0.0, alpha, p) == 0.0);
  CHECK_THROWS_AS(sup_convolution_x0(f, 0.0, p), Error);
}

TEST_CASE("value CSV") {
  const JunctionGrid g{2, -1, 1, 3, 1, 3};
  const auto f = make_field(g, 0.25);
  std::ostringstream os;
  write_value_csv(os, f, 2);
  const std::string csv = os.str();
  CHECK(csv.rfind("plane,i0,ii,x0,xi,value,flagged\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 9);
  CHECK(csv.find("2,2,2,1,1,0.25,0\n") != std::string::npos);
}
