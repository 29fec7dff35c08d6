#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "potlab/generators.hpp"
#include "potlab/harmonic.hpp"

using namespace potlab;

namespace {

EquilibriumSolution unit_disc(int n) {
  SolverConfig cfg;
  cfg.min_nodes_per_component = n;
  cfg.nodes_per_unit_length = 1e-9;
  CompactScene s;
  s.components.push_back({"D", Disc{{0, 0}, 1.0}, std::nullopt});
  return solve_equilibrium(s, cfg);
}

}  // namespace

TEST(HarmonicMeasure, ArcOfDiscIsNormalisedArclength) {
  const int n = 1024;
  const auto sol = unit_disc(n);
  for (double theta : {std::numbers::pi / 6, std::numbers::pi / 2, std::numbers::pi, 1.234}) {
    const double w = harmonic_measure(sol, SectorSelector{{0, 0}, 0.1, theta});
    EXPECT_NEAR(w, theta / (2 * std::numbers::pi), 1.0 / n);
  }
  EXPECT_NEAR(harmonic_measure(sol, ComponentSelector{{"D"}}), 1.0, 1e-14);
  EXPECT_EQ(harmonic_measure(sol, ComponentSelector{{"nothing"}}), 0.0);
}

TEST(HarmonicMeasure, SymmetricDiscsSplitEvenly) {
  CompactScene s;
  s.components.push_back({"a", Disc{{-0.3, 0}, 0.1}, std::nullopt});
  s.components.push_back({"b", Disc{{0.3, 0}, 0.1}, std::nullopt});
  const auto sol = solve_equilibrium(s, {});
  EXPECT_NEAR(harmonic_measure(sol, ComponentSelector{{"a"}}), 0.5, 1e-12);
  EXPECT_NEAR(harmonic_measure(sol, ComponentSelector{{"b"}}), 0.5, 1e-12);
}

TEST(HarmonicMeasure, AdditiveOverPartitions) {
  const auto scene = random_discs(6, 3);
  const auto sol = solve_equilibrium(scene, {});
  double total = 0;
  for (const auto& c : scene.components) total += harmonic_measure(sol, ComponentSelector{{c.id}});
  EXPECT_NEAR(total, 1.0, 1e-12);

  // Four quadrant boxes meeting on closed edges: count the sectors instead.
  double sectors = 0;
  for (int q = 0; q < 4; ++q)
    sectors += harmonic_measure(sol, SectorSelector{{0.013, -0.021}, q * std::numbers::pi / 2,
                                                    std::numbers::pi / 2});
  EXPECT_NEAR(sectors, 1.0, 1e-12);

  const double ab = harmonic_measure(sol, ComponentSelector{{"d0", "d1"}});
  EXPECT_NEAR(ab, harmonic_measure(sol, ComponentSelector{{"d0"}}) +
                      harmonic_measure(sol, ComponentSelector{{"d1"}}),
              1e-14);
}

TEST(MeasureBall, FullAndEmpty) {
  const auto scene = random_discs(5, 9);
  const auto sol = solve_equilibrium(scene, {});
  EXPECT_NEAR(measure_ball(sol, {0, 0}, 2.0), 1.0, 1e-12);
  EXPECT_EQ(measure_ball(sol, {5, 5}, 1.0), 0.0);
  EXPECT_THROW(measure_ball(sol, {0, 0}, 0.0), InputError);
}

TEST(MeasureBall, AgreesWithArcIntersection) {
  // Oracle: the open ball of radius eps about a point of the unit circle
  // meets it in the arc |t| < 2 asin(eps / 2), of normalised length
  // 4 asin(eps / 2) / (2 pi). Whole-node assignment costs at most 1/n.
  for (int n : {256, 1024}) {
    const auto sol = unit_disc(n);
    for (double eps : {0.05, 0.2, 0.7}) {
      for (double t0 : {0.0, 0.37}) {
        const Point c{std::cos(t0), std::sin(t0)};
        const double oracle = 4.0 * std::asin(eps / 2.0) / (2.0 * std::numbers::pi);
        EXPECT_NEAR(measure_ball(sol, c, eps), oracle, 1.0 / n) << n << " " << eps;
      }
    }
  }
}

TEST(DiscGreen, ClosedFormProperties) {
  const double R = 2.0;
  const Point xi{0.3, -0.7};
  EXPECT_NEAR(disc_green_reference(R, {0, 0}, xi), std::log(R / norm(xi)), 1e-14);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  for (int t = 0; t < 100; ++t) {
    const Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
    EXPECT_NEAR(disc_green_reference(R, a, b), disc_green_reference(R, b, a), 1e-12);
    EXPECT_GT(disc_green_reference(R, a, b), 0.0);
  }
  const Point edge{R * std::cos(1.0) * (1 - 1e-12), R * std::sin(1.0) * (1 - 1e-12)};
  EXPECT_NEAR(disc_green_reference(R, edge, xi), 0.0, 1e-10);
  EXPECT_THROW(disc_green_reference(R, xi, xi), DomainError);
  EXPECT_THROW(disc_green_reference(R, {3, 0}, xi), DomainError);
}

TEST(AnnulusReference, SubstitutionValues) {
  EXPECT_NEAR(annulus_measure_reference(100, std::log(2.0), {50, 0}), std::log(2.0) / std::log(200.0),
              1e-15);
  EXPECT_NEAR(annulus_measure_reference(100, std::log(2.0), {50, 0}), 0.13082, 5e-6);
  EXPECT_NEAR(annulus_measure_reference(10, 0.3, {0, 10}), 0.0, 1e-15);
  EXPECT_NEAR(annulus_measure_reference(10, 0.3, {std::exp(-0.3), 0}), 1.0, 1e-15);
  EXPECT_THROW(annulus_measure_reference(10, 0.3, {11, 0}), DomainError);
  EXPECT_THROW(annulus_measure_reference(10, 0.3, {0.1, 0}), DomainError);
}

TEST(AnnulusReference, NumericSolveAgrees) {
  for (double R : {10.0, 100.0})
    for (double gamma : {std::log(2.0), 0.0, -0.5}) {
      const Point z{R / 2 * std::cos(0.7), R / 2 * std::sin(0.7)};
      EXPECT_NEAR(annulus_measure_numeric(R, gamma, z, 256), annulus_measure_reference(R, gamma, z), 1e-2);
    }
}

TEST(DomainMonotonicity, RemovingOtherComponentsNeverDecreasesMeasure) {
  std::mt19937_64 rng(21);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto scene = random_discs(6, seed);
    const auto before = solve_equilibrium(scene, {});
    const std::size_t victim = rng() % scene.size();
    CompactScene reduced;
    std::vector<std::string> kept;
    for (std::size_t k = 0; k < scene.size(); ++k)
      if (k != victim) {
        reduced.components.push_back(scene.components[k]);
        kept.push_back(scene.components[k].id);
      }
    const auto after = solve_equilibrium(reduced, {});
    for (const auto& id : kept) {
      const ComponentSelector A{{id}};
      EXPECT_GE(harmonic_measure(after, A), harmonic_measure(before, A) - 1e-4) << seed << " " << id;
    }
  }
}
