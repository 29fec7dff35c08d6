#pragma once

// Upper bounds on the Hausdorff content M_h(E) = inf sum r_n^s from explicit
// ball covers.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <utility>

#include "potlab/error.hpp"
#include "potlab/geometry.hpp"

namespace potlab {

enum class CoverKind { per_component, single_ball, dyadic };

struct CoverBound {
  double value = 0.0;
  CoverKind kind = CoverKind::per_component;
  int scale = 0;         // dyadic scale of the winning cover (dyadic only)
  std::size_t balls = 0;
};

inline const char* to_string(CoverKind k) {
  switch (k) {
    case CoverKind::per_component: return "per_component";
    case CoverKind::single_ball: return "single_ball";
    case CoverKind::dyadic: return "dyadic";
  }
  return "?";
}

/// Radius of a ball covering the component.
inline double covering_radius(const Component& c) {
  const Rect b = bounding_box(c);
  const double half_diag = 0.5 * std::hypot(b.width(), b.height());
  if (const auto* d = std::get_if<Disc>(&c.shape)) return std::min(d->radius, half_diag);
  return half_diag;
}

/// Farthest distance from p to the component (a point of it).
inline double farthest_distance(const Component& c, Point p) {
  const Rect b = bounding_box(c);
  double far = 0.0;
  for (Point q : {Point{b.x0, b.y0}, Point{b.x1, b.y0}, Point{b.x1, b.y1}, Point{b.x0, b.y1}})
    far = std::max(far, distance(p, q));
  if (const auto* d = std::get_if<Disc>(&c.shape))
    far = std::min(far, distance(p, d->center) + d->radius);
  return far;
}

/// Minimum of sum r^s over three cover families: one ball per component, one
/// ball around everything, and balls circumscribing the occupied dyadic
/// squares at each of `levels` scales, coarsest first.
inline CoverBound greedy_content_cover(const CompactScene& scene, double s, int levels = 8) {
  if (!(s > 0.0)) throw InputError("greedy_content: exponent must be positive");
  CoverBound best{0.0, CoverKind::per_component, 0, 0};
  const auto bounds = scene_bounds(scene);
  if (!bounds) return best;

  for (const auto& c : scene.components) best.value += std::pow(covering_radius(c), s);
  best.balls = scene.size();

  const Point mid = bounds->center();
  double enclosing = 0.0;
  for (const auto& c : scene.components) enclosing = std::max(enclosing, farthest_distance(c, mid));
  enclosing = std::min(enclosing, 0.5 * std::hypot(bounds->width(), bounds->height()));
  if (std::pow(enclosing, s) < best.value) best = {std::pow(enclosing, s), CoverKind::single_ball, 0, 1};

  const double diam = std::max(bounds->width(), bounds->height());
  const int coarsest = static_cast<int>(std::floor(-std::log2(diam)));
  for (int n = coarsest; n < coarsest + levels; ++n) {
    std::set<std::pair<std::int64_t, std::int64_t>> occupied;
    const double side = std::ldexp(1.0, -n);
    // n may be negative here (scenes wider than 1), so no dyadic_grid.
    for (const auto& c : scene.components) {
      const Rect b = bounding_box(c);
      const auto i0 = static_cast<std::int64_t>(std::floor(b.x0 / side));
      const auto i1 = static_cast<std::int64_t>(std::ceil(b.x1 / side));
      const auto j0 = static_cast<std::int64_t>(std::floor(b.y0 / side));
      const auto j1 = static_cast<std::int64_t>(std::ceil(b.y1 / side));
      for (auto i = i0; i < i1; ++i)
        for (auto j = j0; j < j1; ++j) {
          const Rect q{static_cast<double>(i) * side, static_cast<double>(j) * side,
                       static_cast<double>(i + 1) * side, static_cast<double>(j + 1) * side};
          if (meets_interior(c, q)) occupied.insert({i, j});
        }
    }
    const double total =
        static_cast<double>(occupied.size()) * std::pow(side * std::numbers::sqrt2 / 2.0, s);
    if (total < best.value) best = {total, CoverKind::dyadic, n, occupied.size()};
  }
  return best;
}

inline double greedy_content(const CompactScene& scene, double s, int levels = 8) {
  return greedy_content_cover(scene, s, levels).value;
}

}  // namespace potlab
