#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "burg/dissipation.hpp"
#include "burg/entropy_solution.hpp"
#include "burg/errors.hpp"
#include "burg/rng.hpp"

using namespace burg;

namespace {

InitialVelocity two_dip_profile() {
  std::vector<double> a(801), u(801);
  for (int i = 0; i < 801; ++i) {
    double x = -8.0 + 16.0 * i / 800.0;
    a[i] = x;
    u[i] = -0.8 * std::tanh(3.0 * (x + 2.0)) - 1.2 * std::tanh(3.0 * (x - 2.0));
  }
  return InitialVelocity::smooth_sampled(a, u);
}

}  // namespace

TEST_CASE("unit step: closed-form balance defects for every entropy") {
  auto sol = EntropySolution(InitialVelocity::riemann(1.0, -1.0), 0.0);
  double t = 1.0;

  auto kin = lagrangian_anomaly(sol, EntropyPair::kinetic(), t);
  REQUIRE(kin.shocks.size() == 1);
  CHECK(kin.total == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
  CHECK(kin.shocks[0].jump_term == doctest::Approx(-1.0 / 3.0).epsilon(1e-10));
  CHECK(kin.shocks[0].bregman_term == doctest::Approx(-1.0 / 3.0).epsilon(1e-10));

  CHECK(lagrangian_anomaly(sol, EntropyPair::absval(), t).total ==
        doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(lagrangian_anomaly(sol, EntropyPair::quartic(), t).total ==
        doctest::Approx(-8.0 / 5.0).epsilon(1e-10));
  CHECK(std::abs(lagrangian_anomaly(sol, EntropyPair::linear(), t).total) < 1e-10);
  CHECK(std::abs(lagrangian_anomaly(sol, EntropyPair::neg_linear(), t).total) < 1e-10);

  CHECK(eulerian_rate(sol, EntropyPair::kinetic(), t).total ==
        doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
  CHECK(eulerian_rate(sol, EntropyPair::absval(), t).total ==
        doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eulerian_rate(sol, EntropyPair::quartic(), t).total ==
        doctest::Approx(-8.0 / 5.0).epsilon(1e-12));
  CHECK(std::abs(eulerian_rate(sol, EntropyPair::linear(), t).total) < 1e-14);

  CHECK(instantaneous_rate(sol, EntropyPair::kinetic(), t).total ==
        doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
  CHECK(instantaneous_rate(sol, EntropyPair::quartic(), 2.3).total ==
        doctest::Approx(-8.0 / 5.0).epsilon(1e-10));
}

TEST_CASE("split identity: contribution equals jump plus curvature part") {
  auto sol = EntropySolution(two_dip_profile(), 0.0);
  for (const auto& pair :
       {EntropyPair::kinetic(), EntropyPair::quartic(), EntropyPair::absval()}) {
    auto rep = lagrangian_anomaly(sol, pair, 1.5);
    REQUIRE(rep.shocks.size() == 2);
    for (const auto& s : rep.shocks) {
      CHECK(s.contribution ==
            doctest::Approx(s.jump_term + s.bregman_term).epsilon(1e-7));
      CHECK(s.bregman_term <= 1e-12);
      // |u| dissipates nothing on a single-signed shock, so only <= 0 is generic
      CHECK(s.contribution <= 1e-10);
    }
  }
}

TEST_CASE("three formulations agree on irregular data") {
  auto sol = EntropySolution(two_dip_profile(), 0.0);
  for (double t : {0.8, 2.2, 3.6}) {
    for (const auto& pair : {EntropyPair::kinetic(), EntropyPair::quartic()}) {
      double inst = instantaneous_rate(sol, pair, t).total;
      double eul = eulerian_rate(sol, pair, t).total;
      CHECK(inst == doctest::Approx(eul).epsilon(1e-7));
      // the cumulative defect must differentiate to the rate
      double h = 1e-3;
      double fd = (lagrangian_anomaly(sol, pair, t + h).total -
                   lagrangian_anomaly(sol, pair, t - h).total) /
                  (2 * h);
      CHECK(fd == doctest::Approx(eul).epsilon(5e-3));
    }
    CHECK(std::abs(lagrangian_anomaly(sol, EntropyPair::linear(), t).total) < 1e-8);
  }
}

TEST_CASE("momentum is conserved exactly through a merger") {
  auto sol = EntropySolution(two_dip_profile(), 0.0);
  sol.shock_tree(4.0);
  for (double t : {0.5, 1.9, 3.9})
    CHECK(std::abs(eulerian_rate(sol, EntropyPair::linear(), t).total) < 1e-12);
}

TEST_CASE("tabulated convex entropy reproduces its closed-form twin") {
  std::vector<double> g(1201), v(1201);
  for (int i = 0; i < 1201; ++i) {
    g[i] = -3.0 + 6.0 * i / 1200.0;
    v[i] = g[i] * g[i] * g[i] * g[i];
  }
  auto tab = EntropyPair::tabulated(g, v);
  auto sol = EntropySolution(InitialVelocity::riemann(1.0, -1.0), 0.0);
  double got = lagrangian_anomaly(sol, tab, 1.0).total;
  CHECK(got == doctest::Approx(-8.0 / 5.0).epsilon(2e-4));
}

TEST_CASE("non-convex table is rejected") {
  std::vector<double> g{-1.0, 0.0, 1.0, 2.0};
  std::vector<double> v{1.0, 0.0, 1.0, 0.5};
  CHECK_THROWS_AS(EntropyPair::tabulated(g, v), Error);
}

TEST_CASE("partial-absorption profile is monotone for the focusing ramp") {
  auto sol = EntropySolution(InitialVelocity::linear_ramp(-1.0), 0.0);
  sol.shock_tree(2.0);
  for (const auto& pair :
       {EntropyPair::kinetic(), EntropyPair::quartic(), EntropyPair::absval()}) {
    auto prof = delta_psi_profile(sol, pair, 0, 2.0, 200);
    REQUIRE(prof.size() == 200);
    for (std::size_t i = 1; i < prof.size(); ++i)
      CHECK(prof[i].second <= prof[i - 1].second + 1e-8);
    // total drop equals the cumulative balance defect at the final time
    double drop = prof.back().second - prof.front().second;
    CHECK(drop == doctest::Approx(lagrangian_anomaly(sol, pair, 2.0).total)
                      .epsilon(1e-6));
  }
}

TEST_CASE("partial-absorption profile stays monotone across a merger") {
  auto sol = EntropySolution(two_dip_profile(), 0.0);
  const auto& tree = sol.shock_tree(4.0);
  REQUIRE(tree.alive_at_horizon.size() == 1);
  int root = tree.alive_at_horizon.front();
  for (const auto& pair : {EntropyPair::kinetic(), EntropyPair::quartic()}) {
    auto prof = delta_psi_profile(sol, pair, root, 4.0, 200);
    for (std::size_t i = 1; i < prof.size(); ++i)
      CHECK(prof[i].second <= prof[i - 1].second + 1e-8);
  }
}

TEST_CASE("cumulative defect integrates the pointwise balance in time") {
  // trapezoid between event instants, where the balance rate is smooth
  auto cumulative = [](const EntropySolution& sol, const EntropyPair& pair,
                       double t) {
    std::vector<double> cuts{sol.t0(), t};
    for (const auto& s : sol.shock_tree(t).segments) {
      if (s.t_form > sol.t0() && s.t_form < t) cuts.push_back(s.t_form);
      if (s.parent >= 0 && s.t_end < t) cuts.push_back(s.t_end);
    }
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k] + 1e-9, hi = cuts[k + 1] - 1e-9;
      if (hi <= lo) continue;
      const int m = 1000;
      double piece = 0.5 * (eulerian_rate(sol, pair, lo).total +
                            eulerian_rate(sol, pair, hi).total);
      for (int j = 1; j < m; ++j)
        piece += eulerian_rate(sol, pair, lo + (hi - lo) * j / m).total;
      acc += piece * (hi - lo) / m;
    }
    return acc;
  };

  auto step = EntropySolution(InitialVelocity::riemann(1.0, -1.0), 0.0);
  CHECK(cumulative(step, EntropyPair::kinetic(), 1.0) ==
        doctest::Approx(-2.0 / 3.0).epsilon(1e-9));

  auto sol = EntropySolution(two_dip_profile(), 0.0);
  const double t = 3.0;
  const double lag = lagrangian_anomaly(sol, EntropyPair::kinetic(), t).total;
  CHECK(std::abs(cumulative(sol, EntropyPair::kinetic(), t) - lag) < 1e-5);
}

TEST_CASE("expansion comparator carries no balance defect") {
  auto sol = EntropySolution(InitialVelocity::riemann(-1.0, 1.0), 0.0, true);
  auto rep = lagrangian_anomaly(sol, EntropyPair::kinetic(), 1.5);
  CHECK(rep.shocks.empty());
  CHECK(rep.total == 0.0);
  CHECK(eulerian_rate(sol, EntropyPair::kinetic(), 1.5).total == 0.0);
}

TEST_CASE("rate formulations agree on a population of random profiles") {
  Rng rng(20260813ull);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(801), u(801);
    // a guaranteed compressive front plus a few random ones
    const double c0 = rng.uniform(0.5, 1.0);
    const double s0 = rng.uniform(2.0, 4.0);
    const double m0 = rng.uniform(-1.0, 1.0);
    struct Bump {
      double c, s, m;
    };
    std::vector<Bump> bumps;
    const int nb = 2 + int(rng.uniform01() * 3.0);
    for (int j = 0; j < nb; ++j)
      bumps.push_back({rng.uniform(-0.7, 0.7), rng.uniform(1.0, 3.0),
                       rng.uniform(-3.0, 3.0)});
    for (int i = 0; i < 801; ++i) {
      const double x = -10.0 + 20.0 * i / 800.0;
      a[i] = x;
      double v = -c0 * std::tanh(s0 * (x - m0));
      for (const auto& b : bumps) v += b.c * std::tanh(b.s * (x - b.m));
      u[i] = v;
    }
    auto sol = EntropySolution(InitialVelocity::smooth_sampled(a, u), 0.0);
    const auto& pair =
        trial % 10 == 0 ? EntropyPair::quartic() : EntropyPair::kinetic();
    for (double t : {0.45, 1.1}) {
      const double inst = instantaneous_rate(sol, pair, t).total;
      const double eul = eulerian_rate(sol, pair, t).total;
      CHECK(std::abs(inst - eul) <= 1e-6 * std::max(1.0, std::abs(eul)));
    }
  }
}
