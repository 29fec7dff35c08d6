#pragma once

// Numerical checks of identities and inequalities for the Green function,
// capacities and the modification pipeline. Every check returns a report
// listing its inputs, computed quantities and asserted inequalities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "potlab/content.hpp"
#include "potlab/error.hpp"
#include "potlab/geometry.hpp"
#include "potlab/green.hpp"
#include "potlab/jones_wolff.hpp"
#include "potlab/potential.hpp"

namespace potlab {

struct Inequality {
  std::string name;
  double lhs = 0.0;
  std::string op;  // "<", "<=", ">", ">=", "=="
  double rhs = 0.0;
  bool holds = false;
};

struct VerificationReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, double>> quantities;
  std::vector<Inequality> inequalities;
  std::vector<std::pair<std::string, double>> residuals;
  std::vector<std::pair<std::string, double>> tolerances;

  bool passed() const {
    return std::all_of(inequalities.begin(), inequalities.end(),
                       [](const Inequality& i) { return i.holds; });
  }

  void input(std::string key, std::string value) { inputs.emplace_back(std::move(key), std::move(value)); }
  void quantity(std::string key, double v) { quantities.emplace_back(std::move(key), v); }

  double get(const std::string& key) const {
    for (const auto& [k, v] : quantities)
      if (k == key) return v;
    for (const auto& [k, v] : residuals)
      if (k == key) return v;
    throw InputError("report '" + name + "' has no quantity '" + key + "'");
  }

  bool check(std::string label, double lhs, const std::string& op, double rhs) {
    bool ok = false;
    if (op == "<") ok = lhs < rhs;
    else if (op == "<=") ok = lhs <= rhs;
    else if (op == ">") ok = lhs > rhs;
    else if (op == ">=") ok = lhs >= rhs;
    else if (op == "==") ok = lhs == rhs;
    else throw InputError("unknown comparison '" + op + "'");
    inequalities.push_back({std::move(label), lhs, op, rhs, ok});
    return ok;
  }

  /// Records |computed - expected| and asserts it below the tolerance.
  bool residual(const std::string& label, double value, double tol) {
    residuals.emplace_back(label, value);
    tolerances.emplace_back(label, tol);
    return check(label, value, "<", tol);
  }

  std::string to_text() const {
    std::string out = name + ": " + (passed() ? "PASS" : "FAIL") + "\n";
    char buf[256];
    for (const auto& [k, v] : inputs) out += "  input    " + k + " = " + v + "\n";
    for (const auto& [k, v] : quantities) {
      std::snprintf(buf, sizeof buf, "  value    %s = %.12g\n", k.c_str(), v);
      out += buf;
    }
    for (const auto& i : inequalities) {
      std::snprintf(buf, sizeof buf, "  %-8s %s: %.12g %s %.12g\n", i.holds ? "ok" : "FAILED",
                    i.name.c_str(), i.lhs, i.op.c_str(), i.rhs);
      out += buf;
    }
    return out;
  }
};

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// True when some vertex of curve b lies inside curve a.
inline bool nested(const LevelCurve& a, const LevelCurve& b) {
  return winding_number(a.vertices, b.vertices.front()) != 0;
}

inline bool enclosed_by_any(std::span<const LevelCurve> curves, Point p) {
  return std::any_of(curves.begin(), curves.end(),
                     [&](const LevelCurve& c) { return winding_number(c.vertices, p) != 0; });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Level curves separating each component from infinity

/// Largest level for which {g = c} splits into one curve per component: the
/// smallest critical value, further capped by the minimum of g on the circle
/// |z| = 0.9 when the scene lies inside it (so the curves stay in |z| < 1).
inline double separating_level_bound(const GreenField& f,
                                     const std::vector<CriticalPoint>& critical) {
  double bound = std::numeric_limits<double>::infinity();
  for (const auto& c : critical) bound = std::min(bound, c.green_value);
  const bool inside = std::all_of(f.scene().components.begin(), f.scene().components.end(),
                                  [](const Component& c) { return farthest_distance(c, {0, 0}) < 0.9; });
  if (inside)
    for (int m = 0; m < 720; ++m) {
      const double t = 2.0 * std::numbers::pi * m / 720.0;
      bound = std::min(bound, f.value_unchecked({0.9 * std::cos(t), 0.9 * std::sin(t)}));
    }
  if (!std::isfinite(bound)) bound = std::log(2.0);
  return bound;
}

/// Seed on {g = c} reached from component k by bisection along a ray.
inline Point level_seed(const GreenField& f, std::size_t k, double c) {
  const auto& scene = f.scene();
  const auto& comp = scene.components[k];
  const Point p0 = representative_point(comp);
  const Rect b = bounding_box(comp);
  const double size = std::max(b.width(), b.height());
  double spacing = 0.0;
  const auto& mesh = f.solution().mesh;
  for (std::size_t a = mesh.offsets[k]; a < mesh.offsets[k + 1]; ++a)
    spacing = std::max(spacing, mesh.nodes[a].arc_weight);

  for (int dir = 0; dir < 16; ++dir) {
    const double th = 2.0 * std::numbers::pi * dir / 16.0;
    const Point u{std::cos(th), std::sin(th)};
    // Exit point of the component along the ray.
    double lo = 0.0, hi = size;
    while (signed_distance(comp, p0 + hi * u) <= 0) hi *= 2;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (signed_distance(comp, p0 + mid * u) <= 0 ? lo : hi) = mid;
    }
    double t_prev = hi + 2.0 * spacing;
    if (containing_component(scene, p0 + t_prev * u, 0.0)) continue;
    if (f.value_unchecked(to_complex(p0 + t_prev * u)) >= c) continue;
    const double dt = 0.02 * std::max(size, 1e-3);
    bool blocked = false;
    double t = t_prev;
    for (int step = 0; step < 100000; ++step) {
      t = t_prev + dt;
      const Point z = p0 + t * u;
      if (containing_component(scene, z, 0.0) || clearance(scene, z) < 2.0 * spacing) {
        blocked = true;
        break;
      }
      if (f.value_unchecked(to_complex(z)) > c) break;
      t_prev = t;
    }
    if (blocked) continue;
    double a = t_prev, bb = t;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (a + bb);
      (f.value_unchecked(to_complex(p0 + mid * u)) < c ? a : bb) = mid;
    }
    return p0 + (0.5 * (a + bb)) * u;
  }
  throw InputError("level_seed: no clear ray from component '" + comp.id + "' to level " +
                   detail::fmt(c));
}

/// One level curve per component, at levels fraction * bound where bound is
/// separating_level_bound. Fractions are used cyclically.
inline std::vector<LevelCurve> separating_level_curves(const GreenField& f,
                                                       std::span<const double> fractions,
                                                       const std::vector<CriticalPoint>& critical) {
  if (fractions.empty()) throw InputError("separating_level_curves: no fractions");
  const double bound = separating_level_bound(f, critical);
  std::vector<LevelCurve> out;
  for (std::size_t k = 0; k < f.scene().size(); ++k) {
    const double fr = fractions[k % fractions.size()];
    if (!(fr > 0.0 && fr < 1.0)) throw InputError("separating_level_curves: fractions must lie in (0, 1)");
    const double c = fr * bound;
    auto curve = trace_level_curve(f, c, level_seed(f, k, c));
    if (curve.enclosed_components != std::vector<std::string>{f.scene().components[k].id})
      throw TracerError("separating_level_curves: curve does not isolate component '" +
                            f.scene().components[k].id + "'",
                        c, bound);
    out.push_back(std::move(curve));
  }
  return out;
}

inline std::vector<LevelCurve> separating_level_curves(const GreenField& f,
                                                       std::span<const double> fractions) {
  return separating_level_curves(f, fractions, find_critical_points(f));
}

/// Solves with a mesh fine enough for the separating curves at
/// min_fraction * bound: on every component the node spacing is at most a
/// third of the curve's standoff c / max |grad g|, which keeps the
/// point-charge field accurate there. Stops refining at `max_nodes`.
inline EquilibriumSolution solve_for_levels(const CompactScene& scene, SolverConfig cfg,
                                            double min_fraction, std::size_t max_nodes = 6000) {
  if (!(min_fraction > 0.0 && min_fraction < 1.0))
    throw InputError("solve_for_levels: fraction must lie in (0, 1)");
  for (;;) {
    auto sol = solve_equilibrium(scene, cfg);
    const GreenField f(sol);
    const double c = min_fraction * separating_level_bound(f, find_critical_points(f));
    double factor = 1.0;
    const auto& mesh = sol.mesh;
    for (std::size_t k = 0; k < scene.size(); ++k) {
      const auto g = boundary_gradient(f, k);
      double spacing = 0.0;
      for (std::size_t a = mesh.offsets[k]; a < mesh.offsets[k + 1]; ++a)
        spacing = std::max(spacing, mesh.nodes[a].arc_weight);
      const double standoff = c / *std::max_element(g.begin(), g.end());
      factor = std::max(factor, spacing / (standoff / 3.0));
    }
    if (factor <= 1.0 || mesh.size() >= max_nodes) return sol;
    factor = std::min(std::max(factor, 1.5), static_cast<double>(max_nodes) / static_cast<double>(mesh.size()));
    cfg.nodes_per_unit_length *= factor;
    cfg.min_nodes_per_component = static_cast<int>(std::ceil(cfg.min_nodes_per_component * factor));
  }
}

// ---------------------------------------------------------------------------
// Checks

struct Lemma3Options {
  double tolerance = 1e-2;
};

/// The log-gradient contour integral against the critical-value identity and
/// the lower bound -log 2.
inline VerificationReport check_lemma3(const GreenField& f, std::span<const LevelCurve> curves,
                                       const std::vector<CriticalPoint>& critical,
                                       const Lemma3Options& opt = {}) {
  VerificationReport r;
  r.name = "lemma3";
  if (curves.empty()) throw InputError("check_lemma3: no curves");
  for (std::size_t a = 0; a < curves.size(); ++a)
    for (std::size_t b = 0; b < curves.size(); ++b)
      if (a != b && detail::nested(curves[a], curves[b]))
        throw InputError("check_lemma3: curves are nested");
  for (const auto& comp : f.scene().components)
    if (!detail::enclosed_by_any(curves, representative_point(comp)))
      throw InputError("check_lemma3: component '" + comp.id + "' is not enclosed");

  r.input("components", std::to_string(f.scene().size()));
  r.input("curves", std::to_string(curves.size()));
  r.input("nodes", std::to_string(f.solution().mesh.size()));

  const auto lhs = contour_log_grad_integral(f, curves);
  double sum_g = 0.0, sum_c = 0.0;
  int outside = 0;
  for (const auto& cp : critical)
    if (!detail::enclosed_by_any(curves, cp.location)) {
      sum_g += cp.multiplicity * cp.green_value;
      outside += cp.multiplicity;
    }
  for (const auto& c : curves) sum_c += c.level;
  const double rhs = sum_g - sum_c + f.robin();
  double max_abs = 0.0;
  for (const auto& c : curves)
    for (const auto& v : c.vertices) max_abs = std::max(max_abs, norm(v));

  // Zeros of dg outside the curves by the argument principle: all zeros
  // (winding on a large circle) minus those inside each curve.
  const auto bounds = scene_bounds(f.scene());
  const Point mid = bounds->center();
  double big = 0.0;
  for (const auto& c : curves)
    for (const auto& v : c.vertices) big = std::max(big, distance(v, mid));
  int arg_outside = count_critical_by_argument(f, circle_contour(mid, 2.0 * big + 1.0, 720));
  for (const auto& c : curves) arg_outside -= count_critical_by_argument(f, c.vertices);

  r.quantity("lhs", lhs.total);
  r.quantity("lhs_positive_part", lhs.positive_part);
  r.quantity("lhs_negative_part", lhs.negative_part);
  r.quantity("sum_critical_values", sum_g);
  r.quantity("sum_levels", sum_c);
  r.quantity("robin", f.robin());
  r.quantity("rhs", rhs);
  r.quantity("critical_points_outside", outside);
  r.quantity("critical_points_outside_by_argument", arg_outside);
  r.quantity("max_abs_z_on_curves", max_abs);
  r.residual("identity_residual", std::abs(lhs.total - rhs), opt.tolerance);
  r.check("lhs > -log 2", lhs.total, ">", -std::log(2.0));
  r.check("newton count == curves - 1", outside, "==", static_cast<double>(curves.size()) - 1);
  r.check("argument count == curves - 1", arg_outside, "==", static_cast<double>(curves.size()) - 1);
  r.check("curves inside |z| < 1", max_abs, "<", 1.0);
  return r;
}

inline VerificationReport check_lemma3(const GreenField& f, std::span<const LevelCurve> curves,
                                       const Lemma3Options& opt = {}) {
  return check_lemma3(f, curves, find_critical_points(f), opt);
}

/// Hausdorff content of the scene (explicit covers) against Cap^s.
inline VerificationReport check_lemma4(const CompactScene& scene, double s,
                                       const SolverConfig& cfg = {}, int levels = 8) {
  if (!(s > 0.0 && s <= 2.0)) throw InputError("check_lemma4: s must lie in (0, 2]");
  VerificationReport r;
  r.name = "lemma4";
  r.input("s", detail::fmt(s));
  r.input("components", std::to_string(scene.size()));
  r.input("cover_levels", std::to_string(levels));
  const double cap = capacity(scene, cfg);
  const auto cover = greedy_content_cover(scene, s, levels);
  const auto finer = greedy_content_cover(scene, s, levels + 1);
  const double ratio = cover.value / std::pow(cap, s);
  const double ratio_fine = finer.value / std::pow(cap, s);
  r.quantity("capacity", cap);
  r.quantity("content_upper", cover.value);
  r.quantity("content_upper_refined", finer.value);
  r.quantity("ratio", ratio);
  r.quantity("ratio_refined", ratio_fine);
  r.quantity("cover_balls", static_cast<double>(cover.balls));
  r.check("ratio finite", std::isfinite(ratio) ? 1.0 : 0.0, "==", 1.0);
  r.check("ratio positive", ratio, ">", 0.0);
  r.check("refinement stability", std::max(ratio, ratio_fine) / std::min(ratio, ratio_fine), "<", 2.0);
  return r;
}

/// Gradient bounds on sigma: the Harnack ratio on the disc boundary (case 1)
/// or single crossing of rays from the centre (case 2).
inline VerificationReport check_gradient_bound(const GreenField& f, const AlphaDecision& d,
                                               double M) {
  VerificationReport r;
  r.name = "gradient_bound";
  r.input("component", d.component);
  r.input("case", std::to_string(d.case_));
  r.input("M", detail::fmt(M));
  r.input("square_side", detail::fmt(d.square.side()));
  const auto& g = d.curve.grad_norms;
  if (g.empty()) throw InputError("check_gradient_bound: empty curve");
  const double gmax = *std::max_element(g.begin(), g.end());
  const double gmin = *std::min_element(g.begin(), g.end());
  const double scale = M * M * std::log(1.0 / d.square.side());
  r.quantity("alpha", d.alpha);
  r.quantity("omega", d.omega);
  r.quantity("max_grad", gmax);
  r.quantity("min_grad", gmin);
  r.quantity("normalized_max_grad", gmax / scale);
  r.quantity("escape_log_ratio", d.escape_log_ratio);
  r.check("max_grad finite", std::isfinite(gmax) ? 1.0 : 0.0, "==", 1.0);
  r.check("escape log ratio <= 20 pi", d.escape_log_ratio, "<=", 20.0 * std::numbers::pi);
  if (d.case_ == 1) {
    const double harnack = gmax / gmin;
    r.quantity("harnack_ratio", harnack);
    r.check("harnack ratio finite", std::isfinite(harnack) ? 1.0 : 0.0, "==", 1.0);
  } else {
    const Point z0 = d.disc.center;
    const auto& poly = d.curve.vertices;
    int worst = 1;
    for (int m = 0; m < 360; ++m) {
      const double th = 2.0 * std::numbers::pi * (m + 0.5) / 360.0;
      const Point u{std::cos(th), std::sin(th)};
      int crossings = 0;
      for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point a = poly[k] - z0, b = poly[(k + 1) % poly.size()] - z0;
        const double ca = cross(u, a), cb = cross(u, b);
        if ((ca > 0) == (cb > 0)) continue;
        const double t = ca / (ca - cb);
        const Point x = a + t * (b - a);
        if (dot(x, u) > 0) ++crossings;
      }
      if (crossings != 1) worst = crossings;
    }
    r.quantity("rays", 360);
    r.check("every ray crosses sigma once", worst, "==", 1.0);
  }
  return r;
}

/// Flux through one curve per component against the component's mass, and
/// the |log|grad g|| integral against log log(1/rho).
inline VerificationReport check_contour_sum(const GreenField& f, std::span<const LevelCurve> curves,
                                            double rho, double tolerance = 1e-3) {
  const auto& scene = f.scene();
  if (curves.size() != scene.size())
    throw InputError("check_contour_sum: need one curve per component");
  std::vector<char> seen(scene.size(), 0);
  VerificationReport r;
  r.name = "contour_sum";
  r.input("rho", detail::fmt(rho));
  r.input("curves", std::to_string(curves.size()));
  double total = 0.0;
  for (const auto& c : curves) {
    if (c.enclosed_components.size() != 1)
      throw InputError("check_contour_sum: each curve must enclose exactly one component");
    const auto k = scene.find(c.enclosed_components.front());
    if (!k || seen[*k]) throw InputError("check_contour_sum: curves and components do not pair up");
    seen[*k] = 1;
    const double flux = contour_flux(f, c);
    const double mass = f.solution().component_mass(*k);
    total += flux;
    r.quantity("flux[" + scene.components[*k].id + "]", flux);
    r.quantity("mass[" + scene.components[*k].id + "]", mass);
    r.residual("flux_vs_mass[" + scene.components[*k].id + "]", std::abs(flux - mass), tolerance);
  }
  const auto lg = contour_log_grad_integral(f, curves);
  const double loglog = std::log(std::log(1.0 / rho));
  r.quantity("total_flux", total);
  r.quantity("abs_log_grad_integral", lg.absolute());
  r.quantity("log_log_inv_rho", loglog);
  r.quantity("ratio", lg.absolute() / loglog);
  r.residual("total_flux_vs_1", std::abs(total - 1.0), tolerance);
  return r;
}

/// Flux through a far circle equals 1; g - log|z| - robin decays like 1/|z|.
inline VerificationReport check_flux_normalization(const GreenField& f, double far_radius) {
  const auto bounds = scene_bounds(f.scene());
  double radius = 0.0;
  for (const auto& c : f.scene().components) radius = std::max(radius, farthest_distance(c, {0, 0}));
  if (!(far_radius > radius)) throw InputError("check_flux_normalization: radius inside the scene");
  VerificationReport r;
  r.name = "flux_normalization";
  r.input("far_radius", detail::fmt(far_radius));
  const double flux = contour_flux(f, circle_contour({0, 0}, far_radius, 1024));
  const auto h0 = [&](double rad) {
    double worst = 0.0;
    for (int m = 0; m < 64; ++m) {
      const double t = 2.0 * std::numbers::pi * m / 64.0;
      const Complex z(rad * std::cos(t), rad * std::sin(t));
      worst = std::max(worst, std::abs(f.value_unchecked(z) - std::log(rad) - f.robin()));
    }
    return worst;
  };
  const double h1 = h0(far_radius), h2 = h0(10.0 * far_radius);
  r.quantity("flux", flux);
  r.quantity("h0_at_far_radius", h1);
  r.quantity("h0_at_10x_far_radius", h2);
  r.quantity("decay_ratio", h2 > 0 ? h1 / h2 : std::numeric_limits<double>::infinity());
  r.residual("flux_vs_1", std::abs(flux - 1.0), 1e-6);
  r.check("h0 decays", h2, "<=", std::max(h1, 1e-12));
  return r;
}

// ---------------------------------------------------------------------------
// Pipeline integrity

struct PipelineCheckOptions {
  std::size_t monotonicity_selectors = 20;
  std::uint64_t seed = 1;
  double monotonicity_tolerance = 1e-4;
};

inline VerificationReport check_pipeline(const ModificationTrace& t,
                                         const PipelineCheckOptions& opt = {}) {
  VerificationReport r;
  r.name = "pipeline";
  r.input("epsilon", detail::fmt(t.params.epsilon));
  r.input("M", detail::fmt(t.params.M));
  r.input("rho", detail::fmt(t.params.rho));
  r.input("R", std::to_string(t.params.R));
  r.input("pq", std::to_string(t.p) + "," + std::to_string(t.q));
  r.quantity("steps", static_cast<double>(t.steps.size()));
  r.quantity("stage1_discs", static_cast<double>(t.stage1.size()));
  r.quantity("K_star_components", static_cast<double>(t.final_scene.size()));
  r.quantity("in_regime", t.params.in_regime() ? 1.0 : 0.0);
  r.quantity("ball_growth_constant", ball_growth_constant(t));
  for (const auto& [j, v] : stage1_ratios(t)) r.quantity("ratio3[" + std::to_string(j) + "]", v);
  for (const auto& [k, v] : step_ratios(t)) r.quantity("ratio4[" + std::to_string(k) + "]", v);

  r.check("K* pairwise disjoint discs", pairwise_disjoint_discs(t.final_scene) ? 1.0 : 0.0, "==", 1.0);
  r.check("coverage K ⊂ ∪2RQ^k ∪ ∪Q_j", coverage_holds(t) ? 1.0 : 0.0, "==", 1.0);
  std::vector<DyadicSquare> previous;
  bool replay = true;
  for (const auto& s : t.steps) {
    replay = replay && s.square.side() >= t.params.rho &&
             s.selection_mass >= t.params.M * s.square.side() &&
             std::none_of(previous.begin(), previous.end(),
                          [&](const DyadicSquare& P) { return s.square.inside(P); });
    previous.push_back(s.square);
  }
  r.check("selection predicates replay", replay ? 1.0 : 0.0, "==", 1.0);
  for (const auto& [j, v] : stage1_ratios(t)) r.check("ratio3 positive", v, ">", 0.0);

  auto records = t.monotonicity;
  if (records.size() < opt.monotonicity_selectors) {
    auto extra = annulus_monotonicity_probe(t.stage1_scene, t.params.R, t.params.solver,
                                            opt.monotonicity_selectors - records.size(), opt.seed);
    records.insert(records.end(), extra.begin(), extra.end());
  }
  records.resize(std::min(records.size(), opt.monotonicity_selectors));
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& m : records) worst = std::min(worst, m.after - m.before);
  r.quantity("monotonicity_selectors", static_cast<double>(records.size()));
  r.quantity("monotonicity_min_gain", records.empty() ? 0.0 : worst);
  r.check("monotonicity selectors tested", static_cast<double>(records.size()), ">=",
          static_cast<double>(opt.monotonicity_selectors));
  if (!records.empty()) r.check("monotonicity", worst, ">=", -opt.monotonicity_tolerance);
  return r;
}

// ---------------------------------------------------------------------------
// Suites

/// Finest dyadic square with side below 1 containing the closed disc.
inline std::optional<DyadicSquare> enclosing_dyadic_square(const Disc& d) {
  const Rect b = d.bounds();
  for (int n = 40; n >= 1; --n) {
    const double inv = std::ldexp(1.0, n);
    const auto i = static_cast<std::int64_t>(std::floor(b.x0 * inv));
    const auto j = static_cast<std::int64_t>(std::floor(b.y0 * inv));
    const DyadicSquare Q{n, i, j};
    if (Q.rect().contains(b)) return Q;
  }
  return std::nullopt;
}

inline bool inside_half_disc(const CompactScene& scene) {
  for (const auto& c : scene.components)
    if (!(farthest_distance(c, {0, 0}) < 0.5)) return false;
  return true;
}

struct SuiteOptions {
  PipelineParams params;
  std::uint64_t seed = 1;
  std::vector<double> level_fractions = {0.4, 0.6};
  std::vector<double> lemma4_exponents = {1.0, 1.5, 2.0};
};

/// Runs a named suite: lemma3, lemma4, gradient, contour, flux, pipeline or
/// all. The pipeline suite is skipped for scenes outside |z| < 1/2.
inline std::vector<VerificationReport> run_verification_suite(const CompactScene& scene,
                                                              const std::string& suite,
                                                              const SuiteOptions& opt = {}) {
  static const std::vector<std::string> known = {"lemma3", "lemma4", "gradient", "contour",
                                                 "flux", "pipeline", "all"};
  if (std::find(known.begin(), known.end(), suite) == known.end())
    throw InputError("unknown suite '" + suite + "'");
  const auto wants = [&](const char* name) { return suite == "all" || suite == name; };
  const auto& cfg = opt.params.solver;
  std::vector<VerificationReport> out;

  const bool needs_field = wants("lemma3") || wants("gradient") || wants("contour") || wants("flux");
  if (needs_field) {
    const bool needs_curves = wants("lemma3") || wants("contour");
    double lowest = 1.0;
    for (double fr : opt.level_fractions) lowest = std::min(lowest, fr);
    if (wants("contour")) lowest *= 0.5;  // the second contour pass halves the levels
    const GreenField f(needs_curves && !opt.level_fractions.empty() && lowest > 0.0
                           ? solve_for_levels(scene, cfg, lowest)
                           : solve_equilibrium(scene, cfg));
    std::vector<CriticalPoint> critical;
    std::vector<LevelCurve> curves;
    if (wants("lemma3") || wants("contour")) {
      critical = find_critical_points(f);
      curves = separating_level_curves(f, opt.level_fractions, critical);
    }
    if (wants("lemma3")) out.push_back(check_lemma3(f, curves, critical));
    if (wants("gradient")) {
      for (const auto& c : scene.components) {
        const auto* d = std::get_if<Disc>(&c.shape);
        if (!d || c.clip) continue;
        const auto Q = enclosing_dyadic_square(*d);
        if (!Q) continue;
        out.push_back(check_gradient_bound(f, alpha_and_curve(f, c.id, *Q, opt.params.M), opt.params.M));
      }
    }
    if (wants("contour")) {
      out.push_back(check_contour_sum(f, curves, opt.params.rho));
      // A second level per component: the identities do not depend on c.
      std::vector<double> shifted;
      for (double fr : opt.level_fractions) shifted.push_back(0.5 * fr);
      out.push_back(check_contour_sum(f, separating_level_curves(f, shifted, critical), opt.params.rho));
    }
    if (wants("flux")) {
      double radius = 0.0;
      for (const auto& c : scene.components) radius = std::max(radius, farthest_distance(c, {0, 0}));
      out.push_back(check_flux_normalization(f, std::max(10.0 * radius, 2.0)));
    }
  }
  if (wants("lemma4"))
    for (double s : opt.lemma4_exponents) out.push_back(check_lemma4(scene, s, cfg));
  if (wants("pipeline") && inside_half_disc(scene)) {
    PipelineCheckOptions pc;
    pc.seed = opt.seed;
    out.push_back(check_pipeline(modify_domain(scene, opt.params), pc));
  }
  return out;
}

}  // namespace potlab
