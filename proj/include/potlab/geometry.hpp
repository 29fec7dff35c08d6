#pragma once

// Planar primitives, dyadic grids and scenes built from discs and squares.
//
// Squares that come from the dyadic grid have corners i * 2^-n, which are
// exact in binary floating point as long as |i| < 2^53; all containment
// predicates below are evaluated on those exact values.

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "potlab/error.hpp"

namespace potlab {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point, Point) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Closed axis-parallel rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  Point center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool empty() const { return !(x1 > x0 && y1 > y0); }
  bool contains(Point p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  bool contains(const Rect& r) const {
    return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
  }
  /// Interiors intersect (positive-area overlap).
  bool overlaps(const Rect& r) const {
    return r.x0 < x1 && x0 < r.x1 && r.y0 < y1 && y0 < r.y1;
  }
  Rect inflated(double d) const { return {x0 - d, y0 - d, x1 + d, y1 + d}; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

inline Rect intersect(const Rect& a, const Rect& b) {
  return {std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
          std::min(a.y1, b.y1)};
}

inline Rect bounding_union(const Rect& a, const Rect& b) {
  return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
          std::max(a.y1, b.y1)};
}

/// Euclidean distance from p to the closed rectangle (0 inside).
inline double distance(Point p, const Rect& r) {
  const double dx = std::max({r.x0 - p.x, 0.0, p.x - r.x1});
  const double dy = std::max({r.y0 - p.y, 0.0, p.y - r.y1});
  return std::hypot(dx, dy);
}

struct Disc {
  Point center;
  double radius = 0.0;

  Rect bounds() const {
    return {center.x - radius, center.y - radius, center.x + radius,
            center.y + radius};
  }
  friend bool operator==(const Disc&, const Disc&) = default;
};

/// Axis-parallel square given by its lower-left corner and side.
struct Square {
  Point corner;
  double side = 0.0;

  Rect rect() const {
    return {corner.x, corner.y, corner.x + side, corner.y + side};
  }
  Point center() const {
    return {corner.x + 0.5 * side, corner.y + 0.5 * side};
  }
  friend bool operator==(const Square&, const Square&) = default;
};

/// Square of side 2^-scale with lower-left corner (i, j) * 2^-scale.
struct DyadicSquare {
  int scale = 0;
  std::int64_t i = 0;
  std::int64_t j = 0;

  double side() const { return std::ldexp(1.0, -scale); }
  Square square() const {
    return {{std::ldexp(static_cast<double>(i), -scale),
             std::ldexp(static_cast<double>(j), -scale)},
            side()};
  }
  Rect rect() const { return square().rect(); }

  /// True when this square is contained in `outer` (closed sets).
  bool inside(const DyadicSquare& outer) const {
    if (outer.scale > scale) return false;
    const int shift = scale - outer.scale;
    return (i >> shift) == outer.i && (j >> shift) == outer.j;
  }

  /// Lexicographic order on (scale, i, j).
  friend auto operator<=>(const DyadicSquare&, const DyadicSquare&) = default;
};

using Shape = std::variant<Disc, Square>;

/// One piece of a compact set: a disc or a square, optionally intersected
/// with a clip rectangle (the overlap region produced by clip()).
struct Component {
  std::string id;
  Shape shape;
  std::optional<Rect> clip;
};

/// A compact set K given as a finite union of closed pieces.
struct CompactScene {
  std::vector<Component> components;

  bool empty() const { return components.empty(); }
  std::size_t size() const { return components.size(); }

  /// Index of the component with the given id, if present.
  std::optional<std::size_t> find(const std::string& id) const {
    for (std::size_t k = 0; k < components.size(); ++k)
      if (components[k].id == id) return k;
    return std::nullopt;
  }
};

inline Rect shape_bounds(const Shape& s) {
  if (const auto* d = std::get_if<Disc>(&s)) return d->bounds();
  return std::get<Square>(s).rect();
}

/// Region actually occupied by the component (shape bounds clipped).
inline Rect bounding_box(const Component& c) {
  Rect b = shape_bounds(c.shape);
  if (c.clip) b = intersect(b, *c.clip);
  return b;
}

inline std::optional<Rect> scene_bounds(const CompactScene& scene) {
  std::optional<Rect> out;
  for (const auto& c : scene.components) {
    const Rect b = bounding_box(c);
    out = out ? bounding_union(*out, b) : b;
  }
  return out;
}

/// Positive-area overlap between a bare shape and the closed rectangle.
inline bool shape_meets_interior(const Shape& s, const Rect& r) {
  if (r.empty()) return false;
  if (const auto* d = std::get_if<Disc>(&s))
    return distance(d->center, r) < d->radius;
  return std::get<Square>(s).rect().overlaps(r);
}

inline bool shape_inside_closed(const Shape& s, const Rect& r) {
  return r.contains(shape_bounds(s));
}

/// The component's region has positive-area overlap with r.
inline bool meets_interior(const Component& c, const Rect& r) {
  return shape_meets_interior(c.shape, c.clip ? intersect(r, *c.clip) : r);
}

/// The component's region lies in the closed rectangle r.
inline bool inside_closed(const Component& c, const Rect& r) {
  return r.contains(bounding_box(c)) || shape_inside_closed(c.shape, r);
}

/// Validates component invariants; throws InputError on violation.
inline void validate(const CompactScene& scene) {
  std::set<std::string> ids;
  for (const auto& c : scene.components) {
    if (!ids.insert(c.id).second)
      throw InputError("duplicate component id '" + c.id + "'");
    if (const auto* d = std::get_if<Disc>(&c.shape)) {
      if (!is_finite(d->center) || !std::isfinite(d->radius))
        throw InputError("component '" + c.id + "' has non-finite geometry");
      if (!(d->radius > 0.0))
        throw InputError("component '" + c.id + "' has non-positive radius");
    } else {
      const auto& s = std::get<Square>(c.shape);
      if (!is_finite(s.corner) || !std::isfinite(s.side))
        throw InputError("component '" + c.id + "' has non-finite geometry");
      if (!(s.side > 0.0))
        throw InputError("component '" + c.id + "' has non-positive side");
    }
    if (c.clip && !meets_interior(Component{c.id, c.shape, std::nullopt}, *c.clip))
      throw InputError("component '" + c.id + "' has an empty clip region");
  }
}

// ---------------------------------------------------------------------------
// Dyadic grids

/// All dyadic squares of side 2^-scale whose interiors meet the region.
inline std::vector<DyadicSquare> dyadic_grid(int scale, const Square& region) {
  if (!is_finite(region.corner) || !std::isfinite(region.side))
    throw InputError("dyadic_grid: non-finite region");
  if (!(region.side > 0.0)) throw InputError("dyadic_grid: region side must be positive");
  if (scale < 0) throw InputError("dyadic_grid: scale must be non-negative");
  const Rect r = region.rect();
  const double inv = std::ldexp(1.0, scale);
  const auto i0 = static_cast<std::int64_t>(std::floor(r.x0 * inv));
  const auto i1 = static_cast<std::int64_t>(std::ceil(r.x1 * inv));
  const auto j0 = static_cast<std::int64_t>(std::floor(r.y0 * inv));
  const auto j1 = static_cast<std::int64_t>(std::ceil(r.y1 * inv));
  std::vector<DyadicSquare> out;
  out.reserve(static_cast<std::size_t>((i1 - i0) * (j1 - j0)));
  for (auto j = j0; j < j1; ++j)
    for (auto i = i0; i < i1; ++i) out.push_back({scale, i, j});
  return out;
}

inline std::int64_t positive_mod(std::int64_t a, std::int64_t m) {
  const auto r = a % m;
  return r < 0 ? r + m : r;
}

/// Squares whose lattice coordinates are congruent to (p, q) mod R.
inline std::vector<DyadicSquare> sublattice(const std::vector<DyadicSquare>& grid,
                                            int p, int q, int R) {
  if (R < 1) throw InputError("sublattice: R must be >= 1");
  if (p < 1 || p > R || q < 1 || q > R)
    throw InputError("sublattice: (p, q) must satisfy 1 <= p, q <= R");
  std::vector<DyadicSquare> out;
  for (const auto& s : grid)
    if (positive_mod(s.i - p, R) == 0 && positive_mod(s.j - q, R) == 0)
      out.push_back(s);
  return out;
}

/// Concentric square with side R * side(Q).
inline Square dilate(const Square& q, double R) {
  if (!(R >= 1.0)) throw InputError("dilate: factor must be >= 1");
  const Point c = q.center();
  const double side = R * q.side;
  return {{c.x - 0.5 * side, c.y - 0.5 * side}, side};
}

inline Square dilate(const DyadicSquare& q, double R) { return dilate(q.square(), R); }

// ---------------------------------------------------------------------------
// Shape relations (closed-set semantics)

enum class Relation { disjoint, a_inside_b, b_inside_a, boundary_overlap };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::disjoint: return "disjoint";
    case Relation::a_inside_b: return "a_inside_b";
    case Relation::b_inside_a: return "b_inside_a";
    case Relation::boundary_overlap: return "boundary_overlap";
  }
  return "?";
}

/// Classifies shape a against the closed square b. Tangency counts as
/// boundary_overlap; a_inside_b means a lies in the open interior of b.
inline Relation relation(const Shape& a, const Square& b) {
  const Rect B = b.rect();
  if (const auto* d = std::get_if<Disc>(&a)) {
    const Point c = d->center;
    const double r = d->radius;
    if (distance(c, B) > r) return Relation::disjoint;
    if (c.x - r > B.x0 && c.x + r < B.x1 && c.y - r > B.y0 && c.y + r < B.y1)
      return Relation::a_inside_b;
    const Point corners[4] = {{B.x0, B.y0}, {B.x1, B.y0}, {B.x1, B.y1}, {B.x0, B.y1}};
    if (std::all_of(std::begin(corners), std::end(corners),
                    [&](Point p) { return distance(p, c) < r; }))
      return Relation::b_inside_a;
    return Relation::boundary_overlap;
  }
  const Rect A = std::get<Square>(a).rect();
  if (A.x1 < B.x0 || B.x1 < A.x0 || A.y1 < B.y0 || B.y1 < A.y0)
    return Relation::disjoint;
  if (A.x0 > B.x0 && A.x1 < B.x1 && A.y0 > B.y0 && A.y1 < B.y1)
    return Relation::a_inside_b;
  if (B.x0 > A.x0 && B.x1 < A.x1 && B.y0 > A.y0 && B.y1 < A.y1)
    return Relation::b_inside_a;
  return Relation::boundary_overlap;
}

/// Components meeting the closed square with positive area. Components that
/// lie inside the square are returned unchanged; the others carry the overlap
/// as their clip rectangle.
inline CompactScene clip(const CompactScene& scene, const Square& square) {
  const Rect r = square.rect();
  CompactScene out;
  for (const auto& c : scene.components) {
    if (!meets_interior(c, r)) continue;
    if (inside_closed(c, r)) {
      out.components.push_back(c);
      continue;
    }
    Component piece = c;
    piece.clip = c.clip ? intersect(*c.clip, r) : r;
    out.components.push_back(std::move(piece));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Boundaries of (clipped) components

/// Circular arc from angle `begin` to `end` (radians, begin < end).
struct Arc {
  Point center;
  double radius = 0.0;
  double begin = 0.0;
  double end = 0.0;
  bool full = false;

  double length() const { return radius * (end - begin); }
  Point at(double theta) const {
    return {center.x + radius * std::cos(theta), center.y + radius * std::sin(theta)};
  }
};

struct Segment {
  Point a;
  Point b;
  double length() const { return distance(a, b); }
};

using BoundaryPiece = std::variant<Arc, Segment>;

inline double length(const BoundaryPiece& p) {
  return std::visit([](const auto& v) { return v.length(); }, p);
}

namespace detail {

inline std::vector<Segment> rect_edges(const Rect& r) {
  return {{{r.x0, r.y0}, {r.x1, r.y0}},
          {{r.x1, r.y0}, {r.x1, r.y1}},
          {{r.x1, r.y1}, {r.x0, r.y1}},
          {{r.x0, r.y1}, {r.x0, r.y0}}};
}

// Part of segment [a, b] inside the closed disc, as a parameter interval.
inline std::optional<std::pair<double, double>> segment_in_disc(const Segment& s,
                                                                const Disc& d) {
  const Point ab = s.b - s.a;
  const Point ac = s.a - d.center;
  const double A = dot(ab, ab);
  const double B = 2.0 * dot(ab, ac);
  const double C = dot(ac, ac) - d.radius * d.radius;
  const double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0 || A == 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double t0 = std::max(0.0, (-B - sq) / (2.0 * A));
  const double t1 = std::min(1.0, (-B + sq) / (2.0 * A));
  if (t1 <= t0) return std::nullopt;
  return std::pair{t0, t1};
}

inline std::vector<BoundaryPiece> clipped_disc_boundary(const Disc& d, const Rect& r) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> cuts = {0.0, two_pi};
  auto add_line = [&](double offset, bool vertical) {
    const double u = offset / d.radius;
    if (std::abs(u) >= 1.0) return;
    const double base = vertical ? std::acos(u) : std::asin(u);
    const double alt = vertical ? -base : std::numbers::pi - base;
    for (double a : {base, alt}) {
      double t = std::fmod(a, two_pi);
      if (t < 0) t += two_pi;
      cuts.push_back(t);
    }
  };
  add_line(r.x0 - d.center.x, true);
  add_line(r.x1 - d.center.x, true);
  add_line(r.y0 - d.center.y, false);
  add_line(r.y1 - d.center.y, false);
  std::sort(cuts.begin(), cuts.end());

  std::vector<std::pair<double, double>> keep;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (b - a < 1e-15) continue;
    const double mid = 0.5 * (a + b);
    const Point p{d.center.x + d.radius * std::cos(mid),
                  d.center.y + d.radius * std::sin(mid)};
    if (!r.contains(p)) continue;
    if (!keep.empty() && std::abs(keep.back().second - a) < 1e-15)
      keep.back().second = b;
    else
      keep.emplace_back(a, b);
  }
  // Join an arc ending at 2 pi with one starting at 0.
  if (keep.size() >= 2 && keep.front().first == 0.0 &&
      std::abs(keep.back().second - two_pi) < 1e-15) {
    keep.front().first = keep.back().first - two_pi;
    keep.pop_back();
  }

  std::vector<BoundaryPiece> out;
  if (keep.size() == 1 && keep[0].second - keep[0].first >= two_pi - 1e-15) {
    out.push_back(Arc{d.center, d.radius, 0.0, two_pi, true});
    return out;
  }
  for (auto [a, b] : keep) out.push_back(Arc{d.center, d.radius, a, b, false});
  for (const auto& e : rect_edges(r)) {
    if (auto t = segment_in_disc(e, d)) {
      const Point dir = e.b - e.a;
      out.push_back(Segment{e.a + t->first * dir, e.a + t->second * dir});
    }
  }
  return out;
}

}  // namespace detail

/// Boundary of the component as arcs and segments (unordered, disjoint up to
/// endpoints).
inline std::vector<BoundaryPiece> boundary_pieces(const Component& c) {
  std::vector<BoundaryPiece> out;
  if (const auto* d = std::get_if<Disc>(&c.shape)) {
    if (!c.clip || c.clip->contains(d->bounds())) {
      out.push_back(Arc{d->center, d->radius, 0.0, 2.0 * std::numbers::pi, true});
      return out;
    }
    return detail::clipped_disc_boundary(*d, *c.clip);
  }
  Rect r = std::get<Square>(c.shape).rect();
  if (c.clip) r = intersect(r, *c.clip);
  if (r.empty()) return out;
  for (const auto& e : detail::rect_edges(r)) out.push_back(e);
  return out;
}

inline double boundary_length(const Component& c) {
  double total = 0.0;
  for (const auto& p : boundary_pieces(c)) total += length(p);
  return total;
}

/// Closed membership test.
inline bool contains(const Component& c, Point p) {
  if (c.clip && !c.clip->contains(p)) return false;
  if (const auto* d = std::get_if<Disc>(&c.shape))
    return distance(p, d->center) <= d->radius;
  return std::get<Square>(c.shape).rect().contains(p);
}

inline double distance(Point p, const BoundaryPiece& piece) {
  if (const auto* s = std::get_if<Segment>(&piece)) {
    const Point ab = s->b - s->a;
    const double L2 = dot(ab, ab);
    double t = L2 > 0 ? dot(p - s->a, ab) / L2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, s->a + t * ab);
  }
  const auto& a = std::get<Arc>(piece);
  const Point v = p - a.center;
  if (a.full) return std::abs(norm(v) - a.radius);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double theta = std::atan2(v.y, v.x);
  while (theta < a.begin) theta += two_pi;
  while (theta > a.begin + two_pi) theta -= two_pi;
  if (theta <= a.end) return std::abs(norm(v) - a.radius);
  return std::min(distance(p, a.at(a.begin)), distance(p, a.at(a.end)));
}

/// Negative inside the component, positive outside, zero on the boundary.
inline double signed_distance(const Component& c, Point p) {
  if (!c.clip) {
    if (const auto* d = std::get_if<Disc>(&c.shape))
      return distance(p, d->center) - d->radius;
  }
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& piece : boundary_pieces(c)) dmin = std::min(dmin, distance(p, piece));
  return contains(c, p) ? -dmin : dmin;
}

/// A point in the interior of the component.
inline Point representative_point(const Component& c) {
  if (!c.clip) {
    if (const auto* d = std::get_if<Disc>(&c.shape)) return d->center;
    return std::get<Square>(c.shape).center();
  }
  // Average of boundary samples of a convex region lies inside it.
  Point sum{0, 0};
  int count = 0;
  for (const auto& piece : boundary_pieces(c)) {
    for (int k = 0; k < 8; ++k) {
      const double t = (k + 0.5) / 8.0;
      Point q;
      if (const auto* a = std::get_if<Arc>(&piece))
        q = a->at(a->begin + t * (a->end - a->begin));
      else {
        const auto& s = std::get<Segment>(piece);
        q = s.a + t * (s.b - s.a);
      }
      sum = sum + q;
      ++count;
    }
  }
  return count ? (1.0 / count) * sum : bounding_box(c).center();
}

/// Distance from p to the nearest point of the scene (0 inside).
inline double clearance(const CompactScene& scene, Point p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : scene.components)
    best = std::min(best, std::max(0.0, signed_distance(c, p)));
  return best;
}

/// Index of a component containing p in its interior (beyond tol), if any.
inline std::optional<std::size_t> containing_component(const CompactScene& scene, Point p,
                                                       double tol = 1e-12) {
  for (std::size_t k = 0; k < scene.components.size(); ++k)
    if (signed_distance(scene.components[k], p) < -tol) return k;
  return std::nullopt;
}

/// True when the union of rectangles covers the target (exact on dyadic
/// coordinates: the target is split along every rectangle edge).
inline bool covered_by_union(const Rect& target, const std::vector<Rect>& rects) {
  std::vector<double> xs = {target.x0, target.x1}, ys = {target.y0, target.y1};
  for (const auto& r : rects) {
    if (r.x0 > target.x0 && r.x0 < target.x1) xs.push_back(r.x0);
    if (r.x1 > target.x0 && r.x1 < target.x1) xs.push_back(r.x1);
    if (r.y0 > target.y0 && r.y0 < target.y1) ys.push_back(r.y0);
    if (r.y1 > target.y0 && r.y1 < target.y1) ys.push_back(r.y1);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  for (std::size_t a = 0; a + 1 < xs.size(); ++a)
    for (std::size_t b = 0; b + 1 < ys.size(); ++b) {
      const Rect cell{xs[a], ys[b], xs[a + 1], ys[b + 1]};
      if (cell.empty()) continue;
      if (std::none_of(rects.begin(), rects.end(),
                       [&](const Rect& r) { return r.contains(cell); }))
        return false;
    }
  return true;
}

/// True when the union of rectangles covers the component's region, up to
/// sets of zero area. Exact for discs and squares: every cell of the grid
/// spanned by the rectangle edges is either covered or checked for overlap.
inline bool covered_by_union(const Component& c, const std::vector<Rect>& rects) {
  const Rect box = bounding_box(c);
  std::vector<double> xs = {box.x0, box.x1}, ys = {box.y0, box.y1};
  for (const auto& r : rects) {
    for (double x : {r.x0, r.x1})
      if (x > box.x0 && x < box.x1) xs.push_back(x);
    for (double y : {r.y0, r.y1})
      if (y > box.y0 && y < box.y1) ys.push_back(y);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  for (std::size_t a = 0; a + 1 < xs.size(); ++a)
    for (std::size_t b = 0; b + 1 < ys.size(); ++b) {
      const Rect cell{xs[a], ys[b], xs[a + 1], ys[b + 1]};
      if (cell.empty()) continue;
      if (std::any_of(rects.begin(), rects.end(), [&](const Rect& r) { return r.contains(cell); }))
        continue;
      if (meets_interior(c, cell)) return false;
    }
  return true;
}

}  // namespace potlab
