#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "potlab/green.hpp"
#include "potlab/verify.hpp"

using namespace potlab;

namespace {

CompactScene discs(std::initializer_list<Disc> ds) {
  CompactScene s;
  int k = 0;
  for (const auto& d : ds) s.components.push_back({"d" + std::to_string(k++), d, std::nullopt});
  return s;
}

GreenField field(const CompactScene& s, int min_nodes = 128) {
  SolverConfig cfg;
  cfg.min_nodes_per_component = min_nodes;
  return GreenField(solve_equilibrium(s, cfg));
}

const CompactScene& symmetric_pair() {
  static const auto s = discs({{{-0.3, 0}, 0.1}, {{0.3, 0}, 0.1}});
  return s;
}

const CompactScene& three() {
  static const auto s = discs({{{-0.25, -0.15}, 0.1}, {{0.25, -0.12}, 0.12}, {{0.02, 0.25}, 0.09}});
  return s;
}

const CompactScene& four() {
  static const auto s =
      discs({{{-0.3, -0.25}, 0.08}, {{0.28, -0.3}, 0.1}, {{0.3, 0.27}, 0.07}, {{-0.25, 0.3}, 0.11}});
  return s;
}

double dist_to_polyline(Point p, const std::vector<Point>& poly) {
  double best = INFINITY;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point a = poly[k], b = poly[(k + 1) % poly.size()];
    const Point d = b - a;
    const double t = std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0);
    best = std::min(best, distance(p, a + t * d));
  }
  return best;
}

}  // namespace

TEST(GreenValue, DiscClosedForm) {
  const auto f = field(discs({{{0, 0}, 0.5}}));
  EXPECT_NEAR(green_at(f, {1.0, 0.0}), std::log(2.0), 1e-12);
  EXPECT_NEAR(green_at(f, {0.0, -1.0}), std::log(2.0), 1e-12);
  // Between two nodes on the circle the discrete field is close to zero.
  const double t = std::numbers::pi / 128;
  EXPECT_NEAR(f.value_unchecked({0.5 * std::cos(t), 0.5 * std::sin(t)}), 0.0, 1e-2);
  EXPECT_THROW(green_at(f, {0.1, 0.1}), DomainError);
}

TEST(GreenValue, FarFieldApproachesRobin) {
  for (const auto* s : {&symmetric_pair(), &three()}) {
    const auto f = field(*s);
    const Point z{1e6 * std::cos(0.3), 1e6 * std::sin(0.3)};
    EXPECT_NEAR(green_at(f, z) - std::log(1e6), f.robin(), 1e-6);
  }
}

TEST(GreenValue, NonnegativeOutside) {
  const auto f = field(three());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 300; ++t) {
    const Point z{u(rng), u(rng)};
    if (clearance(three(), z) < 0.01) continue;
    EXPECT_GT(green_at(f, z), -1e-6);
  }
}

TEST(GreenGradient, DiscClosedForm) {
  const auto f = field(discs({{{0, 0}, 0.5}}));
  const auto g = green_gradient(f, {2.0, 0.0});
  EXPECT_NEAR(norm(g.vector), 0.5, 1e-12);
  EXPECT_NEAR(norm(g.vector), 2.0 * std::abs(g.derivative), 1e-15);
}

TEST(GreenGradient, VanishesAtSymmetryPoint) {
  const auto f = field(symmetric_pair());
  const auto g = green_gradient(f, {0, 0});
  EXPECT_LT(norm(g.vector), 1e-12);
}

TEST(GreenGradient, AgreesWithCentralDifferences) {
  for (const auto* s : {&symmetric_pair(), &three(), &four()}) {
    const auto f = field(*s);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    int tested = 0;
    while (tested < 100) {
      const Point z{u(rng), u(rng)};
      if (clearance(*s, z) < 0.05) continue;
      ++tested;
      const double h = 1e-6;
      const Point fd{(green_at(f, {z.x + h, z.y}) - green_at(f, {z.x - h, z.y})) / (2 * h),
                     (green_at(f, {z.x, z.y + h}) - green_at(f, {z.x, z.y - h})) / (2 * h)};
      const Point an = green_gradient(f, z).vector;
      EXPECT_LT(distance(fd, an), 1e-6 * norm(an)) << z.x << "," << z.y;
    }
  }
}

TEST(CriticalPoints, SingleDiscHasNone) {
  EXPECT_TRUE(find_critical_points(field(discs({{{0.1, 0}, 0.2}}))).empty());
}

TEST(CriticalPoints, SymmetricPairHasOneAtOrigin) {
  const auto f = field(symmetric_pair());
  const auto cps = find_critical_points(f);
  ASSERT_EQ(cps.size(), 1u);
  EXPECT_LT(norm(cps[0].location), 1e-9);
  EXPECT_EQ(cps[0].multiplicity, 1);
  EXPECT_LT(std::abs(f.dz_unchecked(to_complex(cps[0].location))), 1e-10);
  EXPECT_NEAR(cps[0].green_value, green_at(f, cps[0].location), 1e-15);
}

TEST(CriticalPoints, NewtonCountMatchesArgumentPrinciple) {
  for (const auto* s : {&symmetric_pair(), &three(), &four()}) {
    const auto f = field(*s);
    const auto cps = find_critical_points(f);
    const int by_arg = count_critical_by_argument(f, circle_contour({0, 0}, 2.0, 720));
    EXPECT_EQ(static_cast<int>(cps.size()), by_arg);
    EXPECT_EQ(by_arg, static_cast<int>(s->size()) - 1);
    for (const auto& c : cps) EXPECT_GT(clearance(*s, c.location), 0.0);
  }
}

TEST(CriticalPoints, DeterministicOrder) {
  const auto f = field(four());
  const auto a = find_critical_points(f), b = find_critical_points(f);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].location, b[k].location);
  for (std::size_t k = 1; k < a.size(); ++k) EXPECT_LE(a[k - 1].location.x, a[k].location.x);
}

TEST(ArgumentCount, ComponentSubsets) {
  const auto f1 = field(discs({{{0, 0}, 0.2}}));
  EXPECT_EQ(count_critical_by_argument(f1, circle_contour({0, 0}, 0.5, 256)), 0);
  const auto f2 = field(symmetric_pair());
  EXPECT_EQ(count_critical_by_argument(f2, circle_contour({0, 0}, 0.8, 512)), 1);
  EXPECT_EQ(count_critical_by_argument(f2, circle_contour({0.3, 0}, 0.15, 256)), 0);
  const auto f4 = field(four());
  EXPECT_EQ(count_critical_by_argument(f4, circle_contour({0, 0}, 1.0, 720)), 3);
}

TEST(ArgumentCount, ContourThroughZeroIsRejected) {
  const auto f = field(symmetric_pair());
  // A square contour with a vertex exactly on the critical point.
  const std::vector<Point> poly = {{0, 0}, {0.05, -0.05}, {0.1, 0}, {0.05, 0.05}};
  EXPECT_THROW(count_critical_by_argument(f, poly), DomainError);
}

TEST(LevelCurve, DiscCurveIsCircle) {
  const auto f = field(discs({{{0, 0}, 0.5}}), 256);
  const auto c = trace_level_curve(f, std::log(2.0), {1.1, 0.0});
  ASSERT_TRUE(c.closed);
  for (const auto& v : c.vertices) EXPECT_NEAR(norm(v), 1.0, 1e-8);
  EXPECT_EQ(c.enclosed_components, std::vector<std::string>{"d0"});
  ASSERT_EQ(c.grad_norms.size(), c.vertices.size());
  for (double g : c.grad_norms) EXPECT_NEAR(g, 1.0, 1e-8);
}

TEST(LevelCurve, VerticesLieOnLevel) {
  const auto f = field(three());
  const auto cps = find_critical_points(f);
  const std::vector<double> fr{0.5, 0.7};
  for (const auto& c : separating_level_curves(f, fr, cps)) {
    ASSERT_TRUE(c.closed);
    for (const auto& v : c.vertices) EXPECT_LT(std::abs(green_at(f, v) - c.level), 1e-9);
    EXPECT_EQ(c.enclosed_components.size(), 1u);
    EXPECT_EQ(winding_number(c.vertices, representative_point(
                                             three().components[*three().find(c.enclosed_components[0])])),
              1);
  }
}

TEST(LevelCurve, BelowSaddleSplitsIntoTwoCurves) {
  const auto s = discs({{{-0.25, 0.0}, 0.12}, {{0.25, 0.02}, 0.09}});
  const auto f = field(s);
  const auto cps = find_critical_points(f);
  ASSERT_EQ(cps.size(), 1u);
  const double c = 0.95 * cps[0].green_value;
  std::vector<LevelCurve> curves;
  for (std::size_t k = 0; k < 2; ++k) curves.push_back(trace_level_curve(f, c, level_seed(f, k, c)));
  EXPECT_EQ(curves[0].enclosed_components, std::vector<std::string>{"d0"});
  EXPECT_EQ(curves[1].enclosed_components, std::vector<std::string>{"d1"});
  double sep = INFINITY;
  for (const auto& v : curves[0].vertices) sep = std::min(sep, dist_to_polyline(v, curves[1].vertices));
  EXPECT_GT(sep, 0.0);

  // Oracle: sign changes of g - c along the edges of a dense grid. Every
  // crossing must lie on one of the two traced curves and every traced
  // vertex must have a crossing nearby.
  const double h = 0.004;
  std::vector<Point> crossings;
  for (int i = 0; i <= 250; ++i)
    for (int j = 0; j <= 150; ++j) {
      const Point p{-0.5 + i * h, -0.3 + j * h};
      for (const Point q : {Point{p.x + h, p.y}, Point{p.x, p.y + h}}) {
        if (clearance(s, p) < 2 * h || clearance(s, q) < 2 * h) continue;
        const double a = green_at(f, p) - c, b = green_at(f, q) - c;
        if ((a < 0) != (b < 0)) crossings.push_back(p + (a / (a - b)) * (q - p));
      }
    }
  ASSERT_GT(crossings.size(), 50u);
  for (const auto& x : crossings)
    EXPECT_LT(std::min(dist_to_polyline(x, curves[0].vertices), dist_to_polyline(x, curves[1].vertices)), h);
  for (const auto& cv : curves)
    for (std::size_t k = 0; k < cv.vertices.size(); k += 7) {
      if (clearance(s, cv.vertices[k]) < 3 * h) continue;
      double best = INFINITY;
      for (const auto& x : crossings) best = std::min(best, distance(x, cv.vertices[k]));
      EXPECT_LT(best, 2 * h);
    }
}

TEST(LevelCurve, RejectsBadInput) {
  const auto f = field(symmetric_pair());
  EXPECT_THROW(trace_level_curve(f, -1.0, {0, 0.5}), InputError);
  EXPECT_THROW(trace_level_curve(f, 0.5, {0.3, 0}), DomainError);
}

TEST(LevelCurve, CollapseNearSaddleNamesCriticalValue) {
  const auto f = field(symmetric_pair());
  const auto cps = find_critical_points(f);
  ASSERT_EQ(cps.size(), 1u);
  try {
    trace_level_curve(f, cps[0].green_value, {0.0, 1e-7});
    FAIL() << "tracing through the saddle should fail";
  } catch (const TracerError& e) {
    EXPECT_NEAR(e.nearby_value(), cps[0].green_value, 1e-9);
  }
}

TEST(Flux, TotalHalfAndZero) {
  const auto f = field(symmetric_pair());
  EXPECT_NEAR(contour_flux(f, circle_contour({0, 0}, 0.9, 2000)), 1.0, 1e-6);
  EXPECT_NEAR(contour_flux(f, circle_contour({0.3, 0}, 0.2, 2000)), 0.5, 1e-6);
  EXPECT_NEAR(contour_flux(f, circle_contour({0, 0.5}, 0.2, 2000)), 0.0, 1e-9);
  std::vector<Point> cw = circle_contour({0, 0}, 0.9, 100);
  std::reverse(cw.begin(), cw.end());
  EXPECT_THROW(contour_flux(f, cw), InputError);
  LevelCurve open;
  open.vertices = circle_contour({0, 0}, 0.9, 100);
  EXPECT_THROW(contour_flux(f, open), InputError);
}

TEST(Flux, Additivity) {
  const auto s = discs({{{-0.25, 0.0}, 0.12}, {{0.25, 0.02}, 0.09}, {{0.0, 0.35}, 0.05}});
  const auto f = field(s);
  const double both = contour_flux(f, circle_contour({0, 0.01}, 0.45, 4000)) -
                      contour_flux(f, circle_contour({0, 0.35}, 0.08, 1000));
  const double a = contour_flux(f, circle_contour({-0.25, 0}, 0.18, 2000));
  const double b = contour_flux(f, circle_contour({0.25, 0.02}, 0.15, 2000));
  EXPECT_NEAR(both, a + b, 1e-6);
  EXPECT_NEAR(a, f.solution().component_mass(0), 1e-6);
}

TEST(LogGradIntegral, DiscCircleClosedForm) {
  const double r = 0.2;
  const auto f = field(discs({{{0, 0}, r}}));
  for (double s : {0.3, 0.6, 0.9}) {
    const auto c = trace_level_curve(f, std::log(s / r), {s, 0.0});
    const std::vector<LevelCurve> cs{c};
    const auto I = contour_log_grad_integral(f, cs);
    EXPECT_NEAR(I.total, std::log(1.0 / s), 1e-8);
    EXPECT_NEAR(I.negative_part, 0.0, 1e-15);
    // Identity: log(1/s) = 0 - log(s/r) + log(1/r).
    EXPECT_NEAR(I.total, -c.level + f.robin(), 1e-8);
  }
}

TEST(LogGradIntegral, TwoDiscsAboveMinusLog2) {
  const auto f = field(symmetric_pair());
  const std::vector<double> fr{0.5};
  const auto curves = separating_level_curves(f, fr);
  EXPECT_GT(contour_log_grad_integral(f, curves).total, -std::log(2.0));
}

TEST(WindingIdentity, MinusOnePerCurve) {
  for (const auto* s : {&symmetric_pair(), &three(), &four()}) {
    const auto f = field(*s);
    const std::vector<double> fr{0.3, 0.6};
    for (const auto& c : separating_level_curves(f, fr))
      EXPECT_NEAR(contour_log_grad_winding(f, c.vertices), -1.0, 1e-3);
  }
}
