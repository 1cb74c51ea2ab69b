#include <doctest.h>

#include <cmath>
#include <random>

#include "junction/error.hpp"
#include "junction/hamiltonians.hpp"
#include "support.hpp"

using namespace junction;

namespace {

const JunctionPoint g0 = interface_point(0.0);

JunctionProblem two_plane(std::vector<ControlAtom> p1, std::vector<ControlAtom> p2,
                          bool convexify = false, std::vector<ControlAtom> iface = {}) {
  return JunctionProblem({2}, {std::move(p1), std::move(p2)}, std::move(iface), 1.0, {5, 5, 0},
                         convexify);
}

JunctionProblem updown(bool convexify = true) {
  return two_plane({constant_atom("in", 0, 1, 0), constant_atom("out", 0, -1, 0)},
                   {constant_atom("b", 0, 1, 0)}, convexify);
}

}  // namespace

TEST_CASE("H_i is the max over atoms") {
  const auto pb = two_plane({constant_atom("a1", 1, 0, 0), constant_atom("a2", 0, -1, 1)},
                            {constant_atom("b", 0, 1, 0)});
  CHECK(hamiltonian(pb, 1, g0, {2, 0}) == -1.0);
  const auto single = two_plane({constant_atom("a", 0.5, -2, 0.25)}, {constant_atom("b", 0, 1, 0)});
  CHECK(hamiltonian(single, 1, {1, 0, 1}, {3, 1.5}) == -3 * 0.5 + 1.5 * 2 - 0.25);

  const auto disc = support::disc_problem(0.7, 0, 720, 0.5);
  for (const Covector p : {Covector{1, 0}, Covector{-0.3, 2}, Covector{2, -1}}) {
    const double exact = 0.5 * std::hypot(p.p0, p.pi) - 0.7;
    const double sampled = hamiltonian(disc, 1, g0, p);
    CHECK(sampled <= exact + 1e-12);
    CHECK(sampled >= exact - 0.5 * std::hypot(p.p0, p.pi) * (1 - std::cos(M_PI / 720)) - 1e-12);
  }
}

TEST_CASE("H_i^+ examples") {
  const auto pb = updown();
  CHECK(hamiltonian_plus(pb, 1, g0, {0, 1}) == 0.0);
  CHECK(hamiltonian_plus(pb, 1, g0, {0, -1}) == 1.0);
  CHECK(hamiltonian_plus(pb, 1, g0, {0, -1}) >= hamiltonian_plus(pb, 1, g0, {0, 1}));
  const auto outward = two_plane({constant_atom("m", 0, -1, 0)}, {constant_atom("b", 0, 1, 0)});
  CHECK_THROWS_AS(hamiltonian_plus(outward, 1, g0, {0, 0}), Error);
}

TEST_CASE("H_Gamma combines the half-planes and the interface") {
  const auto pb = two_plane({constant_atom("a", 0, 1, 3)}, {constant_atom("b", 0, 1, -1)});
  const std::vector<Covector> ps{{0, 0}, {0, 0}};
  CHECK(hamiltonian_plus(pb, 1, g0, ps[0]) == -3.0);
  CHECK(hamiltonian_gamma(pb, g0, ps) == 1.0);
  const auto ext = two_plane({constant_atom("a", 0, 1, 3)}, {constant_atom("b", 0, 1, -1)}, false,
                             {constant_atom("z", 0, 0, -5)});
  CHECK(hamiltonian_gamma(ext, g0, ps) == 5.0);
  CHECK(hamiltonian_interface(ext, g0, 7.0) == 5.0);

  const auto sym = two_plane({constant_atom("a", 1, 1, 0.5)}, {constant_atom("b", 1, 1, 0.5)});
  const std::vector<Covector> q{{0.3, 0.1}, {0.3, -2}};
  CHECK(hamiltonian_gamma(sym, g0, std::vector<Covector>{{0.3, 0.1}, {0.3, 0.1}}) ==
        hamiltonian_plus(sym, 1, g0, {0.3, 0.1}));
  CHECK_THROWS_AS(hamiltonian_gamma(sym, g0, std::vector<Covector>{{0.3, 0}, {0.4, 0}}), Error);
  CHECK_THROWS_AS(hamiltonian_gamma(sym, {1, 0, 1}, q), Error);
}

TEST_CASE("tangential Hamiltonians") {
  const auto pb = two_plane({constant_atom("in", 0, 1, 0), constant_atom("out", 0, -1, 1)},
                            {constant_atom("flat", 2, 0, 0)});
  for (double p0 : {-3.0, 0.0, 1.7}) CHECK(hamiltonian_tangential(pb, 1, g0, p0) == -0.5);
  CHECK(hamiltonian_tangential(pb, 2, g0, 1.0) == -2.0);
  CHECK(hamiltonian_tangential(pb, g0, 1.0) == -0.5);

  const auto beta = two_plane({constant_atom("in", 0, 1, 0), constant_atom("out", 0, -1, 1)},
                              {constant_atom("flat", 2, 0, 0)}, false,
                              {constant_atom("l", -1.5, 0, 0.2), constant_atom("r", 1.5, 0, 0.2)});
  CHECK(hamiltonian_tangential(beta, g0, 2.0) == doctest::Approx(1.5 * 2 - 0.2).epsilon(1e-15));

  const auto costs = two_plane({constant_atom("in", 0, 1, 0.4), constant_atom("out", 0, -1, 0.8)},
                               {constant_atom("flat", 2, 0, 0.9)});
  CHECK(hamiltonian_tangential(costs, g0, 0.0) == doctest::Approx(-0.6).epsilon(1e-15));

  const auto none = two_plane({constant_atom("a", 0, 1, 0), constant_atom("c", 1, 2, 0)},
                              {constant_atom("flat", 2, 0, 0)});
  CHECK_THROWS_AS(hamiltonian_tangential(none, 1, g0, 0.0), Error);
}

TEST_CASE("tangential mixing") {
  const std::vector<FLPoint> pair{{1, 1, 0}, {-1, -1, 2}};
  const auto m = tangential_mixing(pair);
  REQUIRE(m.size() == 1);
  CHECK(m[0] == FLPoint{0, 0, 1});
  const std::vector<FLPoint> up{{1, 1, 0}, {0, 2, 0}};
  CHECK(tangential_mixing(up).empty());
  const std::vector<FLPoint> native{{3, 0, 1}};
  CHECK(tangential_mixing(native) == native);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<FLPoint> cloud;
  for (int k = 0; k < 40; ++k) cloud.push_back({u(rng), u(rng), u(rng)});
  for (const auto& z : tangential_mixing(cloud)) CHECK(z.fi == 0.0);
}

TEST_CASE("minimizer set") {
  const auto pb = updown(false);
  const auto m = delta_min_set(pb, 1, g0, {0, 0});
  CHECK(m.delta_min == 0.0);
  CHECK(m.delta_max == 0.0);
  CHECK(m.value == 0.0);

  // Disc of radius 0.5: the minimizer is d = -pi with value 0.5 |p0| - c.
  const auto disc = support::disc_problem(0.25, 0, 64, 0.5);
  const Covector p{0.8, 1.3};
  const auto d = delta_min_set(disc, 1, g0, p);
  CHECK(d.delta_min <= -p.pi + 1e-12);
  CHECK(d.delta_max >= -p.pi - 1e-12);
  CHECK(d.value == doctest::Approx(0.5 * 0.8 - 0.25).epsilon(1e-12));

  const auto flat = two_plane({constant_atom("a", 1, 0, 0), constant_atom("b", 0, 1, 0),
                               constant_atom("c", 0, -1, 0.5)},
                              {constant_atom("z", 0, 1, 0)});
  const auto f = delta_min_set(flat, 1, g0, {-1, 0});
  CHECK(f.delta_min == doctest::Approx(-1.0));
  CHECK(f.delta_max == doctest::Approx(1.5));
  CHECK(f.value == 1.0);

  const auto onesided = two_plane({constant_atom("a", 1, 1, 0)}, {constant_atom("z", 0, 1, 0)});
  try {
    delta_min_set(onesided, 1, g0, {0, 0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnboundedMinimizer);
  }
}

TEST_CASE("minimizer value equals the exhaustive minimum and the tangential Hamiltonian") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 40; ++t) {
    const auto pb = support::random_problem(rng, true);
    const Covector p{u(rng), u(rng)};
    for (int i = 1; i <= 2; ++i) {
      const auto set = fl_set(pb, i, g0);
      const auto m = delta_min_set(pb, i, g0, p);
      CHECK(m.delta_min <= m.delta_max);
      CHECK(m.value == doctest::Approx(support::brute_phi_min(set, p)).epsilon(1e-12));
      CHECK(m.value == doctest::Approx(hamiltonian_tangential(pb, i, g0, p.p0)).epsilon(1e-12));
      for (double s : {0.0, 0.5, 1.0}) {
        const double d = m.delta_min + s * (m.delta_max - m.delta_min);
        CHECK(hamiltonian(pb, i, g0, {p.p0, p.pi + d}) ==
              doctest::Approx(m.value).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("H_i is convex in p and H_i^+ is non-increasing in pi") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int t = 0; t < 30; ++t) {
    const auto pb = support::random_problem(rng, true);
    const Covector a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const Covector mid{0.5 * (a.p0 + b.p0), 0.5 * (a.pi + b.pi)};
    CHECK(hamiltonian(pb, 1, g0, mid) <=
          0.5 * (hamiltonian(pb, 1, g0, a) + hamiltonian(pb, 1, g0, b)) + 1e-12);
    const double lo = std::min(a.pi, b.pi), hi = std::max(a.pi, b.pi);
    CHECK(hamiltonian_plus(pb, 2, g0, {a.p0, lo}) >= hamiltonian_plus(pb, 2, g0, {a.p0, hi}));
  }
}

TEST_CASE("relaxed set generators") {
  std::mt19937_64 rng(29);
  const auto pb = support::random_problem(rng, true, 3, true);
  const auto r1 = relaxed_fl(pb, g0, 1);
  auto expect = fl_plus_set(pb, 1, g0);
  for (int j : {2, 3}) {
    const auto t = tangential_mixing(fl_set(pb, j, g0));
    expect.insert(expect.end(), t.begin(), t.end());
  }
  const auto z = fl_interface_set(pb, g0);
  expect.insert(expect.end(), z.begin(), z.end());
  CHECK(r1 == expect);
  CHECK_THROWS_AS(relaxed_fl(pb, {1, 0, 1}, 1), Error);
}

TEST_CASE("regularity report") {
  const Domain dom{-1, 1, 1};
  const auto c = support::disc_problem(1, 0.5, 32);
  const auto r = hamiltonian_regularity_report(c, dom, 200);
  CHECK(r.lipschitz_x == 0.0);
  CHECK(r.worst() <= 1e-9);

  auto affine = [](double lf) {
    return JunctionProblem(
        {2},
        {{affine_atom("a", {0.2, 0.3, 0}, {1, 0, -0.2}, {0.5, 0.1, 0}),
          affine_atom("b", {-0.5, 0, 0.1}, {-1, 0.1, 0}, {0.2, 0, 0.2})},
         {affine_atom("c", {0, 0, 0}, {1, 0, 0.1}, {0, 0, 0}),
          affine_atom("d", {0.3, 0, 0}, {-0.9, 0, 0}, {0.4, 0.1, 0.1})}},
        {}, 1.0, {1.5, 1.0, lf}, true);
  };
  CHECK(hamiltonian_regularity_report(affine(0.4), dom, 400).worst() <= 1e-9);
  const auto under = hamiltonian_regularity_report(affine(0.01), dom, 400);
  CHECK(under.lipschitz_x > 1e-6);
}
