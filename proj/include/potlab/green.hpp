#pragma once

// Green function with pole at infinity, g(z) = sum_a w_a log|z - z_a| + robin,
// together with critical points, level curves and contour integrals.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potlab/error.hpp"
#include "potlab/geometry.hpp"
#include "potlab/parallel.hpp"
#include "potlab/potential.hpp"

namespace potlab {

using Complex = std::complex<double>;

class GreenField {
 public:
  explicit GreenField(EquilibriumSolution sol) : solution_(std::move(sol)) {
    const auto& nodes = solution_.mesh.nodes;
    points_.reserve(nodes.size());
    for (const auto& n : nodes) points_.emplace_back(n.point.x, n.point.y);
  }

  const EquilibriumSolution& solution() const { return solution_; }
  const CompactScene& scene() const { return solution_.mesh.scene; }
  double robin() const { return solution_.robin; }
  std::span<const Complex> nodes() const { return points_; }
  std::span<const double> weights() const { return solution_.weights; }

  /// g without any domain checks.
  double value_unchecked(Complex z) const {
    double s = 0.0;
    for (std::size_t a = 0; a < points_.size(); ++a)
      s += solution_.weights[a] * 0.5 * std::log(std::norm(z - points_[a]));
    return s + solution_.robin;
  }

  /// dg = (1/2) sum w / (z - a), holomorphic off the nodes.
  Complex dz_unchecked(Complex z) const {
    Complex s = 0.0;
    for (std::size_t a = 0; a < points_.size(); ++a)
      s += solution_.weights[a] / (z - points_[a]);
    return 0.5 * s;
  }

  /// Derivative of dg with respect to z: -(1/2) sum w / (z - a)^2.
  Complex dz2_unchecked(Complex z) const {
    Complex s = 0.0;
    for (std::size_t a = 0; a < points_.size(); ++a) {
      const Complex d = z - points_[a];
      s += solution_.weights[a] / (d * d);
    }
    return -0.5 * s;
  }

  /// Value and real gradient in one pass.
  std::pair<double, Point> value_and_gradient_unchecked(Complex z) const {
    double s = 0.0;
    Point g{0.0, 0.0};
    for (std::size_t a = 0; a < points_.size(); ++a) {
      const Complex d = z - points_[a];
      const double r2 = std::norm(d);
      const double w = solution_.weights[a];
      s += w * 0.5 * std::log(r2);
      g.x += w * d.real() / r2;
      g.y += w * d.imag() / r2;
    }
    return {s + solution_.robin, g};
  }

 private:
  EquilibriumSolution solution_;
  std::vector<Complex> points_;
};

inline Complex to_complex(Point p) { return {p.x, p.y}; }
inline Point to_point(Complex z) { return {z.real(), z.imag()}; }

namespace detail {

inline void check_exterior(const GreenField& f, Point z, const char* what) {
  if (!is_finite(z)) throw DomainError(std::string(what) + ": non-finite point");
  if (auto k = containing_component(f.scene(), z))
    throw DomainError(std::string(what) + ": point lies inside component '" +
                      f.scene().components[*k].id + "'");
  const Complex zc = to_complex(z);
  for (const auto& a : f.nodes())
    if (std::abs(zc - a) < 1e-12)
      throw DomainError(std::string(what) + ": point coincides with a boundary node");
}

}  // namespace detail

inline double green_at(const GreenField& f, Point z) {
  detail::check_exterior(f, z, "green_at");
  return f.value_unchecked(to_complex(z));
}

struct GreenGradient {
  Point vector;        // real gradient of g
  Complex derivative;  // dg; |vector| = 2 |dg|
};

inline GreenGradient green_gradient(const GreenField& f, Point z) {
  detail::check_exterior(f, z, "green_gradient");
  const Complex d = f.dz_unchecked(to_complex(z));
  // grad g = 2 conj(dg) read as a vector.
  return {{2.0 * d.real(), -2.0 * d.imag()}, d};
}

/// |grad g| on the boundary, read from the equilibrium density 2 pi w / s.
inline std::vector<double> boundary_gradient(const GreenField& f, std::size_t component) {
  const auto& mesh = f.solution().mesh;
  std::vector<double> out;
  for (std::size_t a = mesh.offsets[component]; a < mesh.offsets[component + 1]; ++a)
    out.push_back(2.0 * std::numbers::pi * f.solution().weights[a] / mesh.nodes[a].arc_weight);
  return out;
}

// ---------------------------------------------------------------------------
// Polygons

/// Counter-clockwise polygon approximating a circle.
inline std::vector<Point> circle_contour(Point center, double radius, int n) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    out.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
  }
  return out;
}

inline double signed_area(std::span<const Point> poly) {
  double s = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k)
    s += cross(poly[k], poly[(k + 1) % poly.size()]);
  return 0.5 * s;
}

/// Winding number of a closed polygon around p.
inline int winding_number(std::span<const Point> poly, Point p) {
  int wn = 0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point a = poly[k], b = poly[(k + 1) % poly.size()];
    const double side = cross(b - a, p - a);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++wn;
    } else if (b.y <= p.y && side < 0) {
      --wn;
    }
  }
  return wn;
}

/// Indices of scene components whose representative point the polygon winds
/// around once counter-clockwise.
inline std::vector<std::size_t> enclosed_components(const CompactScene& scene,
                                                    std::span<const Point> poly) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < scene.size(); ++k)
    if (winding_number(poly, representative_point(scene.components[k])) == 1) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// Critical points

struct CriticalPoint {
  Point location;
  double green_value = 0.0;
  int multiplicity = 1;
};

namespace detail {

// Change of arg f along the segment a -> b, subdividing while any single
// increment exceeds pi/4.
inline double arg_increment(const GreenField& f, Complex a, Complex b, Complex fa, Complex fb,
                            double floor, int depth) {
  const double d = std::arg(fb / fa);
  if (std::abs(d) <= std::numbers::pi / 4 || depth > 40) {
    if (depth > 40) throw DomainError("argument count: contour too close to a zero of dg");
    return d;
  }
  const Complex m = 0.5 * (a + b);
  const Complex fm = f.dz_unchecked(m);
  if (std::abs(fm) < floor)
    throw DomainError("argument count: dg nearly vanishes on the contour");
  return arg_increment(f, a, m, fa, fm, floor, depth + 1) +
         arg_increment(f, m, b, fm, fb, floor, depth + 1);
}

inline double scene_scale(const CompactScene& scene) {
  const auto b = scene_bounds(scene);
  return b ? std::max(b->width(), b->height()) : 1.0;
}

}  // namespace detail

/// Winding number of dg along a closed polygon (counter-clockwise turns).
inline int winding_of_derivative(const GreenField& f, std::span<const Point> contour) {
  if (contour.size() < 3) throw InputError("winding_of_derivative: contour needs 3 points");
  const double floor = 1e-10;
  double total = 0.0;
  for (std::size_t k = 0; k < contour.size(); ++k) {
    const Point p = contour[k], q = contour[(k + 1) % contour.size()];
    if (containing_component(f.scene(), p, 0.0))
      throw DomainError("argument count: contour enters the compact set");
    const Complex a = to_complex(p), b = to_complex(q);
    const Complex fa = f.dz_unchecked(a), fb = f.dz_unchecked(b);
    if (std::abs(fa) < floor || std::abs(fb) < floor)
      throw DomainError("argument count: dg nearly vanishes on the contour");
    total += detail::arg_increment(f, a, b, fa, fb, floor, 0);
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

/// Number of zeros of dg (with multiplicity) in the exterior region bounded
/// by the contour: the winding of dg plus one for every enclosed component.
inline int count_critical_by_argument(const GreenField& f, std::span<const Point> contour) {
  std::vector<Point> poly(contour.begin(), contour.end());
  if (signed_area(poly) < 0) std::reverse(poly.begin(), poly.end());
  const int w = winding_of_derivative(f, poly);
  return w + static_cast<int>(enclosed_components(f.scene(), poly).size());
}

struct CriticalSearchOptions {
  int seed_grid_resolution = 64;
  double tolerance = 1e-10;  // on |dg|
  int max_iterations = 50;
};

/// Newton's method on dg from a grid of seeds. Points inside the scene or
/// within one boundary node spacing of it are rejected: the discrete field
/// has spurious zeros between adjacent nodes.
inline std::vector<CriticalPoint> find_critical_points(const GreenField& f, const Rect& box,
                                                       const CriticalSearchOptions& opt = {}) {
  if (box.empty()) throw InputError("find_critical_points: empty search box");
  const int n = std::max(1, opt.seed_grid_resolution);
  const auto& scene = f.scene();
  double spacing = 0.0;
  for (const auto& nd : f.solution().mesh.nodes) spacing = std::max(spacing, nd.arc_weight);
  const double diag = std::hypot(box.width(), box.height());
  const Rect limit = box.inflated(0.5 * diag);

  std::vector<std::optional<Complex>> found(static_cast<std::size_t>(n) * n);
  parallel_for(found.size(), [&](std::size_t s) {
    const auto ix = static_cast<double>(s % static_cast<std::size_t>(n));
    const auto iy = static_cast<double>(s / static_cast<std::size_t>(n));
    Complex z{box.x0 + (ix + 0.5) * box.width() / n, box.y0 + (iy + 0.5) * box.height() / n};
    if (containing_component(scene, to_point(z), 0.0)) return;
    for (int it = 0; it < opt.max_iterations; ++it) {
      const Complex g = f.dz_unchecked(z);
      if (std::abs(g) < opt.tolerance) {
        found[s] = z;
        return;
      }
      const Complex h = f.dz2_unchecked(z);
      if (std::abs(h) == 0.0) return;
      Complex step = g / h;
      const double cap = 0.25 * diag;
      if (std::abs(step) > cap) step *= cap / std::abs(step);
      z -= step;
      if (!limit.contains(to_point(z))) return;
    }
    if (std::abs(f.dz_unchecked(z)) < opt.tolerance) found[s] = z;
  });

  std::vector<Complex> roots;
  const double merge = 1e-6 * diag;
  for (const auto& r : found) {
    if (!r) continue;
    const Point p = to_point(*r);
    if (containing_component(scene, p, 0.0) || clearance(scene, p) < spacing) continue;
    if (std::none_of(roots.begin(), roots.end(),
                     [&](Complex q) { return std::abs(q - *r) < merge; }))
      roots.push_back(*r);
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  std::vector<CriticalPoint> out;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    const Point p = to_point(roots[k]);
    double rad = 0.5 * clearance(scene, p);
    for (std::size_t m = 0; m < roots.size(); ++m)
      if (m != k) rad = std::min(rad, 0.5 * std::abs(roots[m] - roots[k]));
    rad = std::min(rad, 1e-2 * diag);
    int mult = 1;
    try {
      mult = std::max(1, winding_of_derivative(f, circle_contour(p, rad, 64)));
    } catch (const DomainError&) {
    }
    out.push_back({p, f.value_unchecked(roots[k]), mult});
  }
  return out;
}

/// Search box covering the scene (zeros of dg lie in the convex hull of the
/// boundary nodes).
inline std::vector<CriticalPoint> find_critical_points(const GreenField& f,
                                                       const CriticalSearchOptions& opt = {}) {
  const auto b = scene_bounds(f.scene());
  if (!b) return {};
  return find_critical_points(f, b->inflated(1e-9), opt);
}

// ---------------------------------------------------------------------------
// Level curves

struct LevelCurve {
  double level = 0.0;
  std::vector<Point> vertices;  // closed polygon, no repeated endpoint
  std::vector<double> grad_norms;
  std::vector<std::string> enclosed_components;
  bool closed = false;
};

struct TraceOptions {
  double tolerance = 1e-12;    // corrector target on |g - c|
  double max_step = 0.02;
  std::size_t max_vertices = 400000;
};

namespace detail {

// Newton projection along grad g onto {g = c}.
inline std::optional<Complex> project_to_level(const GreenField& f, Complex z, double c,
                                               double tol, double max_move) {
  const Complex z0 = z;
  for (int it = 0; it < 40; ++it) {
    const auto [g, grad] = f.value_and_gradient_unchecked(z);
    const double r = g - c;
    if (std::abs(r) < tol) return z;
    const double n2 = dot(grad, grad);
    if (!(n2 > 1e-28)) return std::nullopt;
    z -= Complex(grad.x, grad.y) * (r / n2);
    if (std::abs(z - z0) > max_move) return std::nullopt;
  }
  const double g = f.value_unchecked(z);
  if (std::abs(g - c) < 10 * tol) return z;
  return std::nullopt;
}

inline double nearby_critical_value(const GreenField& f, Complex z) {
  for (int it = 0; it < 50; ++it) {
    const Complex g = f.dz_unchecked(z), h = f.dz2_unchecked(z);
    if (std::abs(g) < 1e-10) return f.value_unchecked(z);
    if (std::abs(h) == 0.0) break;
    z -= g / h;
  }
  return f.value_unchecked(z);
}

}  // namespace detail

/// Predictor-corrector tracing of the connected component of {g = c}
/// through the projection of `seed`. The curve runs counter-clockwise
/// around the region where g < c.
inline LevelCurve trace_level_curve(const GreenField& f, double c, Point seed,
                                    const TraceOptions& opt = {}) {
  if (!(c > 0.0)) throw InputError("trace_level_curve: level must be positive");
  detail::check_exterior(f, seed, "trace_level_curve");
  const auto& scene = f.scene();

  double scale = std::numeric_limits<double>::infinity();
  for (const auto& comp : scene.components)
    scale = std::min(scale, distance(seed, representative_point(comp)));
  const auto step_for = [&](Complex z) {
    return std::min({0.1 * clearance(scene, to_point(z)), 0.05 * scale, opt.max_step});
  };

  auto start = detail::project_to_level(f, to_complex(seed), c, opt.tolerance,
                                        0.5 * clearance(scene, seed) + 0.5 * scale);
  if (!start)
    throw TracerError("trace_level_curve: seed does not project onto the level set", c,
                      detail::nearby_critical_value(f, to_complex(seed)));

  LevelCurve curve;
  curve.level = c;
  Complex z = *start;
  const Complex z_start = z;
  std::vector<Complex> pts{z};
  double travelled = 0.0;

  while (true) {
    const auto [g0, grad0] = f.value_and_gradient_unchecked(z);
    const double gn = norm(grad0);
    if (!(gn > 1e-12))
      throw TracerError("trace_level_curve: gradient vanishes on the level set", c,
                        detail::nearby_critical_value(f, z));
    const Complex tangent(-grad0.y / gn, grad0.x / gn);
    double h = step_for(z);
    // Stay within half the Newton distance to the nearest zero of dg; on a
    // critical level this bound shrinks geometrically and the trace stops.
    const Complex d2 = f.dz2_unchecked(z);
    if (std::abs(d2) > 0.0) {
      const double reach = 0.5 * std::abs(f.dz_unchecked(z) / d2);
      if (reach < 1e-6 * scale)
        throw TracerError("trace_level_curve: step size collapsed at a critical point", c,
                          detail::nearby_critical_value(f, z));
      h = std::min(h, reach);
    }
    const double h_min = 1e-9 * scale;
    std::optional<Complex> next;
    while (h > h_min) {
      next = detail::project_to_level(f, z + h * tangent, c, opt.tolerance, h);
      if (next && clearance(scene, to_point(*next)) > 0.0) {
        const Complex step = *next - z;
        // Reject jumps to a different branch or backwards motion.
        const double along = (step * std::conj(tangent)).real();
        if (along > 0.5 * h && std::abs(step) < 2.0 * h) break;
      }
      next.reset();
      h *= 0.5;
    }
    if (!next)
      throw TracerError("trace_level_curve: step size collapsed", c,
                        detail::nearby_critical_value(f, z));
    travelled += std::abs(*next - z);
    z = *next;
    if (pts.size() >= 8 && std::abs(z - z_start) < 1.5 * h && travelled > 3.0 * h) {
      curve.closed = true;
      break;
    }
    pts.push_back(z);
    if (pts.size() > opt.max_vertices)
      throw TracerError("trace_level_curve: curve did not close", c,
                        detail::nearby_critical_value(f, z));
  }

  for (const auto& p : pts) {
    curve.vertices.push_back(to_point(p));
    curve.grad_norms.push_back(2.0 * std::abs(f.dz_unchecked(p)));
  }
  for (auto k : enclosed_components(scene, curve.vertices))
    curve.enclosed_components.push_back(scene.components[k].id);
  return curve;
}

// ---------------------------------------------------------------------------
// Contour integrals. Three-point Gauss-Legendre on every polygon chord.

namespace detail {

inline constexpr std::array<double, 3> gauss_x{-0.7745966692414834, 0.0, 0.7745966692414834};
inline constexpr std::array<double, 3> gauss_w{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

inline void require_closed_polygon(std::span<const Point> poly, const char* what) {
  if (poly.size() < 3) throw InputError(std::string(what) + ": curve needs at least 3 vertices");
  if (!(signed_area(poly) > 0.0))
    throw InputError(std::string(what) + ": curve must be positively oriented");
}

// Calls fn(x, n, weight) at each Gauss node: x on the chord, n the outward
// unit normal, weight the arclength weight.
template <class Fn>
void for_each_chord_node(std::span<const Point> poly, Fn&& fn) {
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point a = poly[k], b = poly[(k + 1) % poly.size()];
    const Point d = b - a;
    const double len = norm(d);
    if (len == 0.0) continue;
    const Point n{d.y / len, -d.x / len};
    for (std::size_t q = 0; q < 3; ++q) {
      const Point x = a + (0.5 * (1.0 + gauss_x[q])) * d;
      fn(x, n, 0.5 * len * gauss_w[q]);
    }
  }
}

}  // namespace detail

/// (1/2 pi) times the flux of grad g through a positively oriented polygon.
inline double contour_flux(const GreenField& f, std::span<const Point> poly) {
  detail::require_closed_polygon(poly, "contour_flux");
  double s = 0.0;
  detail::for_each_chord_node(poly, [&](Point x, Point n, double w) {
    const Complex d = f.dz_unchecked(to_complex(x));
    s += w * (2.0 * d.real() * n.x - 2.0 * d.imag() * n.y);
  });
  return s / (2.0 * std::numbers::pi);
}

inline double contour_flux(const GreenField& f, const LevelCurve& curve) {
  if (!curve.closed) throw InputError("contour_flux: curve is not closed");
  return contour_flux(f, curve.vertices);
}

struct LogGradIntegral {
  double total = 0.0;
  double positive_part = 0.0;  // contribution where log|grad g| > 0
  double negative_part = 0.0;  // contribution where log|grad g| < 0 (<= 0)
  double absolute() const { return positive_part - negative_part; }
};

/// (1/2 pi) sum over curves of the integral of dg/dn log|grad g|.
///
/// The flux density is taken on the chord and log|grad g| at the point where
/// the gradient line through the Gauss node meets the level curve; flux is
/// conserved along gradient lines, so this matches the integral over the
/// curve itself.
inline LogGradIntegral contour_log_grad_integral(const GreenField& f,
                                                 std::span<const LevelCurve> curves) {
  LogGradIntegral out;
  for (const auto& curve : curves) {
    if (!curve.closed) throw InputError("contour_log_grad_integral: curve is not closed");
    detail::require_closed_polygon(curve.vertices, "contour_log_grad_integral");
    detail::for_each_chord_node(curve.vertices, [&](Point x, Point n, double w) {
      const Complex zx = to_complex(x);
      const Complex d = f.dz_unchecked(zx);
      const double flux = w * (2.0 * d.real() * n.x - 2.0 * d.imag() * n.y);
      const auto on_curve = detail::project_to_level(f, zx, curve.level, 1e-13,
                                                     std::numeric_limits<double>::infinity());
      const Complex zc = on_curve ? *on_curve : zx;
      const double grad = 2.0 * std::abs(f.dz_unchecked(zc));
      if (!(grad >= 1e-14))
        throw DomainError("contour_log_grad_integral: |grad g| vanishes on the curve");
      const double term = flux * std::log(grad) / (2.0 * std::numbers::pi);
      out.total += term;
      (term >= 0 ? out.positive_part : out.negative_part) += term;
    });
  }
  return out;
}

/// (1/2 pi) times the integral of d/dn log|grad g| over a closed polygon:
/// the real part of (d2g / dg) n, integrated chordwise.
inline double contour_log_grad_winding(const GreenField& f, std::span<const Point> poly) {
  detail::require_closed_polygon(poly, "contour_log_grad_winding");
  double s = 0.0;
  detail::for_each_chord_node(poly, [&](Point x, Point n, double w) {
    const Complex z = to_complex(x);
    const Complex d = f.dz_unchecked(z);
    if (!(std::abs(d) > 5e-15))
      throw DomainError("contour_log_grad_winding: |grad g| vanishes on the curve");
    s += w * (f.dz2_unchecked(z) / d * Complex(n.x, n.y)).real();
  });
  return s / (2.0 * std::numbers::pi);
}

/// Boundary version of the log-gradient integral on component k, using the
/// equilibrium density: sum_a w_a |log(2 pi w_a / s_a)| (absolute value)
/// together with the signed total.
inline LogGradIntegral boundary_log_grad_integral(const GreenField& f, std::size_t k) {
  LogGradIntegral out;
  const auto& mesh = f.solution().mesh;
  const auto grads = boundary_gradient(f, k);
  for (std::size_t a = mesh.offsets[k], i = 0; a < mesh.offsets[k + 1]; ++a, ++i) {
    const double w = f.solution().weights[a];
    if (w <= 0.0) continue;
    const double term = w * std::log(grads[i]);
    out.total += term;
    (term >= 0 ? out.positive_part : out.negative_part) += term;
  }
  return out;
}

}  // namespace potlab
