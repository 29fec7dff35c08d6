#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "potlab/generators.hpp"
#include "potlab/verify.hpp"

using namespace potlab;

namespace {

CompactScene disc(Point c, double r) {
  CompactScene s;
  s.components.push_back({"D", Disc{c, r}, std::nullopt});
  return s;
}

CompactScene pair(double sep, double r) {
  CompactScene s;
  s.components.push_back({"a", Disc{{-sep / 2, 0}, r}, std::nullopt});
  s.components.push_back({"b", Disc{{sep / 2, 0}, r}, std::nullopt});
  return s;
}

}  // namespace

TEST(LevelCurveIdentity, SingleDiscMatchesClosedForm) {
  // On |z| = r e^c the gradient is 1 / (r e^c), so the integral is -log r - c.
  const double r = 0.2;
  SolverConfig cfg;
  cfg.min_nodes_per_component = 512;
  const GreenField f(solve_equilibrium(disc({0, 0}, r), cfg));
  const std::vector<double> fr{0.5};
  const auto curves = separating_level_curves(f, fr);
  const double c = curves[0].level;
  const auto rep = check_lemma3(f, curves);
  EXPECT_TRUE(rep.passed()) << rep.to_text();
  EXPECT_NEAR(rep.get("lhs"), -std::log(r) - c, 1e-6);
  EXPECT_LT(rep.get("identity_residual"), 1e-6);
  EXPECT_EQ(rep.get("critical_points_outside"), 0.0);
}

TEST(LevelCurveIdentity, HoldsOnMultiComponentScenes) {
  for (const auto& scene : {pair(0.5, 0.15), random_discs(3, 2, 0.03, 0.08, 0.05),
                            random_discs(4, 8, 0.03, 0.06, 0.05)}) {
    const GreenField f(solve_for_levels(scene, {}, 0.4));
    const std::vector<double> fr{0.4, 0.6};
    const auto crit = find_critical_points(f);
    const auto rep = check_lemma3(f, separating_level_curves(f, fr, crit), crit);
    EXPECT_TRUE(rep.passed()) << rep.to_text();
    EXPECT_GT(rep.get("lhs"), -std::log(2.0));
    EXPECT_EQ(rep.get("critical_points_outside"), static_cast<double>(scene.size()) - 1);
  }
}

TEST(SolveForLevels, ResolvesTheCurveStandoff) {
  // Near the boundary g ~ |grad g| d, so the curve at level c stands off by
  // about c / max |grad g|; the mesh must be finer than that.
  const auto scene = pair(0.5, 0.15);
  const auto sol = solve_for_levels(scene, {}, 0.2);
  const GreenField f(sol);
  const double c = 0.2 * separating_level_bound(f, find_critical_points(f));
  for (std::size_t k = 0; k < scene.size(); ++k) {
    const auto g = boundary_gradient(f, k);
    double spacing = 0;
    for (std::size_t a = sol.mesh.offsets[k]; a < sol.mesh.offsets[k + 1]; ++a)
      spacing = std::max(spacing, sol.mesh.nodes[a].arc_weight);
    EXPECT_LE(spacing, c / *std::max_element(g.begin(), g.end()) / 3.0);
  }
  EXPECT_GT(sol.mesh.size(), solve_equilibrium(scene, {}).mesh.size());
  EXPECT_THROW(solve_for_levels(scene, {}, 1.0), InputError);
}

TEST(LevelCurveIdentity, RejectsBadCurveSets) {
  const GreenField f(solve_for_levels(pair(0.5, 0.15), {}, 0.5));
  const std::vector<double> fr{0.5};
  auto curves = separating_level_curves(f, fr);
  curves.pop_back();
  EXPECT_THROW(check_lemma3(f, curves), InputError);
  EXPECT_THROW(check_lemma3(f, std::vector<LevelCurve>{}), InputError);
}

TEST(ContentRatio, DiscRatioIsAtMostOne) {
  for (double s : {1.0, 2.0}) {
    const auto rep = check_lemma4(disc({0.1, 0.05}, 0.15), s);
    EXPECT_TRUE(rep.passed()) << rep.to_text();
    EXPECT_LE(rep.get("ratio") - 1.0, 4.0 * s * std::numeric_limits<double>::epsilon());
  }
}

TEST(ContentRatio, RefinementStableOnRandomScenes) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto rep = check_lemma4(random_discs(8, seed), 1.5);
    EXPECT_TRUE(rep.passed()) << rep.to_text();
  }
  EXPECT_THROW(check_lemma4(disc({0, 0}, 0.1), 2.5), InputError);
}

TEST(GradientBound, SingleDiscHarnackRatioIsOne) {
  const GreenField f(solve_equilibrium(disc({0.03, 0.03}, 0.01), {}));
  const auto d = alpha_and_curve(f, "D", DyadicSquare{4, 0, 0}, 8);
  const auto rep = check_gradient_bound(f, d, 8);
  EXPECT_TRUE(rep.passed()) << rep.to_text();
  EXPECT_NEAR(rep.get("harnack_ratio"), 1.0, 1e-9);
  EXPECT_NEAR(rep.get("max_grad"), 100.0, 1e-7);
}

TEST(GradientBound, CaseTwoRaysCrossOnce) {
  CompactScene s;
  s.components.push_back({"B", Disc{{0.03, 0.03}, 0.002}, std::nullopt});
  s.components.push_back({"C", Disc{{0.35, -0.2}, 0.05}, std::nullopt});
  const GreenField f(solve_equilibrium(s, {}));
  const auto d = alpha_and_curve(f, "B", DyadicSquare{4, 0, 0}, 1.0);
  ASSERT_EQ(d.case_, 2);
  const auto rep = check_gradient_bound(f, d, 1.0);
  EXPECT_TRUE(rep.passed()) << rep.to_text();
}

TEST(ContourSum, SymmetricPairSplitsFluxInHalf) {
  const GreenField f(solve_for_levels(pair(0.5, 0.1), {}, 0.5));
  const std::vector<double> fr{0.5};
  const auto rep = check_contour_sum(f, separating_level_curves(f, fr), 1.0 / 16);
  EXPECT_TRUE(rep.passed()) << rep.to_text();
  EXPECT_NEAR(rep.get("flux[a]"), 0.5, 1e-3);
  EXPECT_NEAR(rep.get("flux[b]"), 0.5, 1e-3);
  EXPECT_NEAR(rep.get("total_flux"), 1.0, 1e-3);
  EXPECT_NEAR(rep.get("log_log_inv_rho"), std::log(std::log(16.0)), 1e-15);
}

TEST(FluxNormalization, FarCircleCarriesUnitFlux) {
  const GreenField f(solve_equilibrium(random_discs(5, 4), {}));
  const auto rep = check_flux_normalization(f, 5.0);
  EXPECT_TRUE(rep.passed()) << rep.to_text();
  EXPECT_THROW(check_flux_normalization(f, 0.01), InputError);
}

TEST(FluxNormalization, OffCentreDiscDecaysLikeInverseRadius) {
  // g - log|z| - robin = log|1 - a/z|; its largest modulus on |z| = R is
  // -log(1 - |a|/R), attained in the direction of a (a sample angle).
  const GreenField f(solve_equilibrium(disc({0.2, 0.0}, 0.1), {}));
  const auto rep = check_flux_normalization(f, 4.0);
  const double expect = std::log(1 - 0.2 / 4.0) / std::log(1 - 0.2 / 40.0);
  EXPECT_NEAR(rep.get("decay_ratio"), expect, 1e-6);
  EXPECT_NEAR(expect, 10.0, 0.25);
}

TEST(Pipeline, CantorTraceIsConsistent) {
  const auto t = modify_domain(cantor_discs(2, 0.25), PipelineParams{});
  const auto rep = check_pipeline(t);
  EXPECT_TRUE(rep.passed()) << rep.to_text();
  EXPECT_EQ(rep.get("monotonicity_selectors"), 20.0);
  EXPECT_EQ(rep.get("in_regime"), 0.0);
}

TEST(Suite, ReportsAreDeterministic) {
  const auto scene = random_discs(4, 12, 0.02, 0.06, 0.04);
  const auto a = run_verification_suite(scene, "all");
  const auto b = run_verification_suite(scene, "all");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].to_text(), b[k].to_text());
    EXPECT_TRUE(a[k].passed()) << a[k].to_text();
  }
  EXPECT_THROW(run_verification_suite(scene, "nope"), InputError);
}

TEST(Report, ComparisonsAndLookup) {
  VerificationReport r;
  r.name = "x";
  EXPECT_TRUE(r.check("a", 1, "<=", 1));
  EXPECT_FALSE(r.check("b", 1, "<", 1));
  EXPECT_FALSE(r.passed());
  EXPECT_THROW(r.check("c", 1, "~", 1), InputError);
  r.quantity("q", 3.5);
  EXPECT_EQ(r.get("q"), 3.5);
  EXPECT_THROW(r.get("missing"), InputError);
  EXPECT_NE(r.to_text().find("FAILED"), std::string::npos);
}
