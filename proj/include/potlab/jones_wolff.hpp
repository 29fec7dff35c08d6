#pragma once

// Dyadic domain modification: the disc and annulus constructions, the
// iterative pipeline producing K*, and the bookkeeping built on top of it
// (index sets, alpha decisions, the exceptional set).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "potlab/content.hpp"
#include "potlab/error.hpp"
#include "potlab/geometry.hpp"
#include "potlab/green.hpp"
#include "potlab/harmonic.hpp"
#include "potlab/potential.hpp"

namespace potlab {

struct PipelineParams {
  double epsilon = 0.5;
  double M = 8.0;
  double rho = 1.0 / 16.0;
  int R = 4;
  /// Residue class of the sublattice; chosen automatically when empty.
  std::optional<std::pair<int, int>> pq;
  SolverConfig solver;

  /// N with rho = 2^-N.
  int rho_exponent() const {
    int e = 0;
    const double m = std::frexp(rho, &e);
    if (m != 0.5 || e > 1) throw InputError("rho must be 2^-N with N >= 0");
    return 1 - e;
  }

  /// Whether M <= log(1/rho), the regime the construction is stated for.
  bool in_regime() const { return M <= std::log(1.0 / rho); }

  void validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be positive");
    if (!(M > 0.0) || !std::isfinite(M)) throw InputError("M must be positive");
    rho_exponent();
    if (R < 3) throw InputError("R must be an integer >= 3");
    if (pq && (pq->first < 1 || pq->first > R || pq->second < 1 || pq->second > R))
      throw InputError("(p, q) must lie in [1, R]^2");
  }
};

struct SolutionSummary {
  double robin = 0.0;
  double capacity = 0.0;
  SolveMethod method = SolveMethod::linear;
  double kkt_residual = 0.0;
  std::vector<std::pair<std::string, double>> masses;  // per component, scene order
};

inline SolutionSummary summarize(const EquilibriumSolution& sol) {
  SolutionSummary s{sol.robin, sol.capacity, sol.diagnostics.method, sol.diagnostics.kkt_residual, {}};
  for (std::size_t k = 0; k < sol.mesh.scene.size(); ++k)
    s.masses.emplace_back(sol.mesh.scene.components[k].id, sol.component_mass(k));
  return s;
}

struct Stage1Disc {
  std::string id;
  DyadicSquare square;
  CompactScene piece;  // E_j = K ∩ Q_j
  double capacity_E = 0.0;
  Disc disc;
  double omega_Q = 0.0;  // harmonic measure of K_pq in the closed square
};

struct MonotonicityRecord {
  int step = -1;  // -1 for probes outside the pipeline
  DyadicSquare square;
  std::vector<std::string> selector;
  double before = 0.0;
  double after = 0.0;
  bool holds(double tol) const { return after >= before - tol; }
};

struct ModificationStep {
  int index = 0;
  DyadicSquare square;
  double selection_mass = 0.0;
  std::vector<std::string> removed;
  std::vector<std::string> protected_kept;
  std::vector<std::string> absorbed;
  std::string disc_id;
  Disc disc;
  double capacity_E = 0.0;
  SolutionSummary after_annulus;
  SolutionSummary after_step;
};

struct ModificationTrace {
  PipelineParams params;
  int p = 1, q = 1;
  CompactScene original;
  CompactScene initial;  // K_pq
  SolutionSummary initial_solution;
  std::vector<Stage1Disc> stage1;
  CompactScene stage1_scene;
  std::vector<ModificationStep> steps;
  std::vector<MonotonicityRecord> monotonicity;
  CompactScene final_scene;
  std::vector<int> S;  // surviving step indices (1-based)
  std::vector<int> T;  // surviving first-stage indices (0-based)
  EquilibriumSolution final_solution;
};

class PipelineError : public Error {
 public:
  PipelineError(const std::string& what, std::shared_ptr<const ModificationTrace> partial)
      : Error(what), partial_(std::move(partial)) {}
  const ModificationTrace& partial_trace() const { return *partial_; }

 private:
  std::shared_ptr<const ModificationTrace> partial_;
};

// ---------------------------------------------------------------------------
// Constructions

struct DiscConstructionResult {
  CompactScene scene;
  Disc disc;
  double capacity_E = 0.0;
  std::vector<std::string> replaced;
};

inline double disc_construction_radius(double capacity_E, double side, double eps) {
  return 0.5 * std::pow(capacity_E, 1.0 + eps) / std::pow(side, eps);
}

/// Replaces E = K ∩ Q by the disc concentric with Q of radius
/// (1/2) Cap(E)^(1+eps) / side^eps. Components of E must lie in Q.
inline DiscConstructionResult disc_construction(const CompactScene& scene, const Square& Q,
                                                double eps, const SolverConfig& cfg,
                                                const std::string& disc_id) {
  const Rect r = Q.rect();
  CompactScene E, rest;
  for (const auto& c : scene.components) {
    if (!meets_interior(c, r)) {
      rest.components.push_back(c);
      continue;
    }
    if (!inside_closed(c, r))
      throw InputError("disc_construction: component '" + c.id + "' straddles the square");
    E.components.push_back(c);
  }
  if (E.empty()) throw InputError("disc_construction: K ∩ Q is empty");
  DiscConstructionResult out;
  out.capacity_E = capacity(E, cfg);
  out.disc = Disc{Q.center(), disc_construction_radius(out.capacity_E, Q.side, eps)};
  for (const auto& c : E.components) out.replaced.push_back(c.id);
  out.scene = std::move(rest);
  out.scene.components.push_back({disc_id, out.disc, std::nullopt});
  return out;
}

struct AnnulusConstructionResult {
  CompactScene scene;
  std::vector<std::string> removed;
  std::vector<std::string> protected_kept;
};

/// Deletes the components meeting the open annulus (RQ \ Q)°, except
/// protected discs that meet the annulus boundary.
inline AnnulusConstructionResult annulus_construction(const CompactScene& scene, const Square& Q,
                                                      double R,
                                                      const std::vector<Disc>& protected_discs) {
  const Square big = dilate(Q, R);
  const Rect outer = big.rect(), inner = Q.rect();
  AnnulusConstructionResult out;
  for (const auto& c : scene.components) {
    if (!meets_interior(c, outer) || inside_closed(c, inner)) {
      out.scene.components.push_back(c);
      continue;
    }
    const auto* d = std::get_if<Disc>(&c.shape);
    const bool is_protected =
        d && !c.clip && std::find(protected_discs.begin(), protected_discs.end(), *d) !=
                            protected_discs.end();
    if (is_protected && (relation(*d, big) == Relation::boundary_overlap ||
                         relation(*d, Q) != Relation::disjoint)) {
      out.scene.components.push_back(c);
      out.protected_kept.push_back(c.id);
      continue;
    }
    out.removed.push_back(c.id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Square selection

/// Equilibrium mass in the closed rectangle.
inline double closed_square_mass(const EquilibriumSolution& sol, const Rect& r) {
  return harmonic_measure(sol, BoxSelector{r});
}

/// Dyadic scales admissible for selection: sides in [rho, 1/M].
inline std::pair<int, int> admissible_scales(const PipelineParams& params) {
  const int finest = params.rho_exponent();
  const int coarsest = std::max(0, static_cast<int>(std::ceil(std::log2(params.M) - 1e-12)));
  return {coarsest, finest};
}

/// The largest admissible dyadic square, not inside an earlier choice, with
/// closed-square mass at least M times its side. Ties go to the smallest
/// (scale, i, j).
inline std::optional<std::pair<DyadicSquare, double>> select_next_square(
    const PipelineParams& params, const std::vector<DyadicSquare>& previous,
    const EquilibriumSolution& sol) {
  const auto [coarsest, finest] = admissible_scales(params);
  for (int n = coarsest; n <= finest; ++n) {
    const double inv = std::ldexp(1.0, n);
    const double side = std::ldexp(1.0, -n);
    std::map<std::pair<std::int64_t, std::int64_t>, double> mass;
    for (std::size_t a = 0; a < sol.weights.size(); ++a) {
      const Point p = sol.mesh.nodes[a].point;
      const double u = p.x * inv, v = p.y * inv;
      const auto i = static_cast<std::int64_t>(std::floor(u));
      const auto j = static_cast<std::int64_t>(std::floor(v));
      // Closed squares: nodes on a grid line count for both neighbours.
      const bool on_x = u == std::floor(u), on_y = v == std::floor(v);
      for (int di = on_x ? -1 : 0; di <= 0; ++di)
        for (int dj = on_y ? -1 : 0; dj <= 0; ++dj) mass[{i + di, j + dj}] += sol.weights[a];
    }
    for (const auto& [key, m] : mass) {
      if (m < params.M * side) continue;
      const DyadicSquare Q{n, key.first, key.second};
      if (std::any_of(previous.begin(), previous.end(),
                      [&](const DyadicSquare& P) { return Q.inside(P); }))
        continue;
      return std::pair{Q, m};
    }
  }
  return std::nullopt;
}

inline std::optional<std::pair<DyadicSquare, double>> select_next_square(
    const ModificationTrace& trace, const EquilibriumSolution& sol) {
  std::vector<DyadicSquare> previous;
  for (const auto& s : trace.steps) previous.push_back(s.square);
  return select_next_square(trace.params, previous, sol);
}

// ---------------------------------------------------------------------------
// Pipeline

namespace detail {

inline void require_in_half_disc(const CompactScene& scene) {
  for (const auto& c : scene.components) {
    const Rect b = bounding_box(c);
    double far = 0.0;
    if (const auto* d = std::get_if<Disc>(&c.shape); d && !c.clip)
      far = norm(d->center) + d->radius;
    else
      for (Point q : {Point{b.x0, b.y0}, Point{b.x1, b.y0}, Point{b.x1, b.y1}, Point{b.x0, b.y1}})
        far = std::max(far, norm(q));
    if (!(far < 0.5))
      throw InputError("modify_domain: component '" + c.id + "' leaves the disc |z| < 1/2");
  }
}

inline bool nondegenerate(const Component& c) {
  const Rect b = bounding_box(c);
  return b.width() > 1e-12 && b.height() > 1e-12;
}

// Warm start for a new mesh: copy weights of components whose node layout
// is unchanged, spread the remaining mass uniformly.
inline std::vector<double> warm_start(const EquilibriumSolution& prev, const BoundaryMesh& mesh) {
  std::vector<double> w(mesh.size(), 0.0);
  double carried = 0.0;
  std::vector<char> fresh(mesh.scene.size(), 1);
  for (std::size_t k = 0; k < mesh.scene.size(); ++k) {
    const auto old = prev.mesh.scene.find(mesh.scene.components[k].id);
    if (!old) continue;
    const std::size_t n = mesh.offsets[k + 1] - mesh.offsets[k];
    if (prev.mesh.offsets[*old + 1] - prev.mesh.offsets[*old] != n) continue;
    for (std::size_t a = 0; a < n; ++a) {
      w[mesh.offsets[k] + a] = prev.weights[prev.mesh.offsets[*old] + a];
      carried += w[mesh.offsets[k] + a];
    }
    fresh[k] = 0;
  }
  std::size_t fresh_nodes = 0;
  for (std::size_t k = 0; k < mesh.scene.size(); ++k)
    if (fresh[k]) fresh_nodes += mesh.offsets[k + 1] - mesh.offsets[k];
  const double share = fresh_nodes ? std::max(0.0, 1.0 - carried) / static_cast<double>(fresh_nodes) : 0.0;
  for (std::size_t k = 0; k < mesh.scene.size(); ++k)
    if (fresh[k])
      for (std::size_t a = mesh.offsets[k]; a < mesh.offsets[k + 1]; ++a) w[a] = share;
  double total = 0.0;
  for (double x : w) total += x;
  if (total > 0)
    for (double& x : w) x /= total;
  return w;
}

inline EquilibriumSolution resolve(const CompactScene& scene, const SolverConfig& cfg,
                                   const EquilibriumSolution* prev) {
  auto mesh = discretize_boundary(scene, cfg);
  if (!prev) return solve_equilibrium(std::move(mesh), cfg);
  const auto w = warm_start(*prev, mesh);
  return solve_equilibrium(std::move(mesh), cfg, w);
}

inline bool disjoint_from(const Component& c, const Rect& r) {
  const Rect b = bounding_box(c);
  if (b.x1 < r.x0 || r.x1 < b.x0 || b.y1 < r.y0 || r.y1 < b.y0) return true;
  if (const auto* d = std::get_if<Disc>(&c.shape); d && !c.clip)
    return distance(d->center, r) > d->radius;
  return false;
}

// Ids of components whose closed region misses the closed rectangle.
inline std::vector<std::string> components_away_from(const CompactScene& scene, const Rect& r) {
  std::vector<std::string> out;
  for (const auto& c : scene.components)
    if (disjoint_from(c, r)) out.push_back(c.id);
  return out;
}

inline double mass_of(const EquilibriumSolution& sol, const std::vector<std::string>& ids) {
  return harmonic_measure(sol, ComponentSelector{ids});
}

}  // namespace detail

/// K_pq: the parts of K inside the squares of the chosen residue class.
/// Returns the clipped pieces grouped by grid square.
inline std::vector<std::pair<DyadicSquare, CompactScene>> sublattice_pieces(
    const CompactScene& scene, const PipelineParams& params, int p, int q) {
  const int N = params.rho_exponent();
  const auto grid = sublattice(dyadic_grid(N, Square{{-0.5, -0.5}, 1.0}), p, q, params.R);
  std::vector<std::pair<DyadicSquare, CompactScene>> out;
  for (const auto& Q : grid) {
    CompactScene E = clip(scene, Q.square());
    std::erase_if(E.components, [](const Component& c) { return !detail::nondegenerate(c); });
    if (E.empty()) continue;
    for (auto& c : E.components)
      if (c.clip) c.id += "@" + std::to_string(Q.i) + "," + std::to_string(Q.j);
    out.emplace_back(Q, std::move(E));
  }
  return out;
}

/// The residue class with the most pieces; ties go to the smallest (p, q).
inline std::pair<int, int> choose_residue_class(const CompactScene& scene,
                                                const PipelineParams& params) {
  std::pair<int, int> best{1, 1};
  std::size_t best_count = 0;
  for (int p = 1; p <= params.R; ++p)
    for (int q = 1; q <= params.R; ++q) {
      std::size_t count = 0;
      for (const auto& [Q, E] : sublattice_pieces(scene, params, p, q)) count += E.size();
      if (count > best_count) {
        best_count = count;
        best = {p, q};
      }
    }
  return best;
}

/// Runs the full modification: stage one replaces every piece of K_pq by its
/// disc, then squares are selected and modified until none qualifies.
inline ModificationTrace modify_domain(const CompactScene& scene, const PipelineParams& params) {
  params.validate();
  validate(scene);
  if (scene.empty()) throw InputError("modify_domain: empty scene");
  detail::require_in_half_disc(scene);

  auto trace = std::make_shared<ModificationTrace>();
  trace->params = params;
  trace->original = scene;
  const auto pq = params.pq ? *params.pq : choose_residue_class(scene, params);
  trace->p = pq.first;
  trace->q = pq.second;
  const auto& cfg = params.solver;

  const auto fail = [&](const std::string& what) {
    throw PipelineError("modify_domain: " + what, trace);
  };

  try {
    const auto pieces = sublattice_pieces(scene, params, trace->p, trace->q);
    if (pieces.empty()) fail("K_pq is empty for the chosen residue class");
    for (const auto& [Q, E] : pieces)
      trace->initial.components.insert(trace->initial.components.end(), E.components.begin(),
                                       E.components.end());
    const auto initial = solve_equilibrium(trace->initial, cfg);
    trace->initial_solution = summarize(initial);

    CompactScene current;
    for (const auto& [Q, E] : pieces) {
      Stage1Disc s;
      s.id = "Bj" + std::to_string(trace->stage1.size());
      s.square = Q;
      s.piece = E;
      const auto dc = disc_construction(E, Q.square(), params.epsilon, cfg, s.id);
      s.capacity_E = dc.capacity_E;
      s.disc = dc.disc;
      s.omega_Q = closed_square_mass(initial, Q.rect());
      current.components.push_back({s.id, s.disc, std::nullopt});
      trace->stage1.push_back(std::move(s));
    }
    trace->stage1_scene = current;

    auto sol = detail::resolve(current, cfg, nullptr);
    const auto [coarsest, finest] = admissible_scales(params);
    std::size_t admissible = 0;
    for (int n = coarsest; n <= finest; ++n) admissible += std::size_t{1} << (2 * n);

    std::vector<Disc> step_discs;
    while (auto choice = select_next_square(*trace, sol)) {
      if (trace->steps.size() >= admissible) fail("more steps than admissible squares");
      ModificationStep step;
      step.index = static_cast<int>(trace->steps.size()) + 1;
      step.square = choice->first;
      step.selection_mass = choice->second;
      const Square Q = step.square.square();

      auto ann = annulus_construction(current, Q, params.R, step_discs);
      step.removed = ann.removed;
      step.protected_kept = ann.protected_kept;
      if (ann.scene.empty()) fail("annulus construction removed everything");
      auto after_ann = detail::resolve(ann.scene, cfg, &sol);
      step.after_annulus = summarize(after_ann);
      if (!ann.removed.empty()) {
        const auto away = detail::components_away_from(ann.scene, dilate(Q, params.R).rect());
        for (const auto& id : away)
          trace->monotonicity.push_back({step.index, step.square, {id},
                                         detail::mass_of(sol, {id}),
                                         detail::mass_of(after_ann, {id})});
        if (away.size() > 1)
          trace->monotonicity.push_back({step.index, step.square, away,
                                         detail::mass_of(sol, away),
                                         detail::mass_of(after_ann, away)});
      }

      step.disc_id = "Bk" + std::to_string(step.index);
      auto dc = disc_construction(ann.scene, Q, params.epsilon, cfg, step.disc_id);
      step.disc = dc.disc;
      step.capacity_E = dc.capacity_E;
      step.absorbed = dc.replaced;
      step_discs.push_back(dc.disc);
      current = std::move(dc.scene);
      sol = detail::resolve(current, cfg, &after_ann);
      step.after_step = summarize(sol);
      trace->steps.push_back(std::move(step));
    }

    trace->final_scene = current;
    for (const auto& c : current.components) {
      if (c.id.rfind("Bk", 0) == 0) trace->S.push_back(std::stoi(c.id.substr(2)));
      if (c.id.rfind("Bj", 0) == 0) trace->T.push_back(std::stoi(c.id.substr(2)));
    }
    std::sort(trace->S.begin(), trace->S.end());
    std::sort(trace->T.begin(), trace->T.end());
    trace->final_solution = std::move(sol);
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    fail(e.what());
  }
  return *trace;
}

// ---------------------------------------------------------------------------
// Checks on a completed trace

/// Closed discs with pairwise positive separation.
inline bool pairwise_disjoint_discs(const CompactScene& scene) {
  for (std::size_t a = 0; a < scene.size(); ++a) {
    const auto* da = std::get_if<Disc>(&scene.components[a].shape);
    if (!da || scene.components[a].clip) return false;
    for (std::size_t b = a + 1; b < scene.size(); ++b) {
      const auto* db = std::get_if<Disc>(&scene.components[b].shape);
      if (!db || scene.components[b].clip) return false;
      if (!(distance(da->center, db->center) > da->radius + db->radius)) return false;
    }
  }
  return true;
}

/// Squares 2R Q^k for k in S and Q_j for j in T.
inline std::vector<Rect> coverage_rects(const ModificationTrace& t) {
  std::vector<Rect> rects;
  for (int k : t.S) rects.push_back(dilate(t.steps[static_cast<std::size_t>(k - 1)].square, 2.0 * t.params.R).rect());
  for (int j : t.T) rects.push_back(t.stage1[static_cast<std::size_t>(j)].square.rect());
  return rects;
}

/// K_pq is covered by the union of 2R Q^k (k in S) and Q_j (j in T).
inline bool coverage_holds(const ModificationTrace& t) {
  const auto rects = coverage_rects(t);
  return std::all_of(t.initial.components.begin(), t.initial.components.end(),
                     [&](const Component& c) { return covered_by_union(c, rects); });
}

/// Largest ratio mass(B(z0, r)) / (M r) over z0 at the centre and corners of
/// every surviving square and r = side * 2^k up to 1.
inline double ball_growth_constant(const ModificationTrace& t) {
  std::vector<DyadicSquare> squares;
  for (int k : t.S) squares.push_back(t.steps[static_cast<std::size_t>(k - 1)].square);
  for (int j : t.T) squares.push_back(t.stage1[static_cast<std::size_t>(j)].square);
  double best = 0.0;
  for (const auto& Q : squares) {
    const Rect r = Q.rect();
    for (Point z0 : {r.center(), Point{r.x0, r.y0}, Point{r.x1, r.y0}, Point{r.x1, r.y1},
                     Point{r.x0, r.y1}})
      for (double rad = Q.side(); rad <= 1.0; rad *= 2.0)
        best = std::max(best, measure_ball(t.final_solution, z0, rad) / (t.params.M * rad));
  }
  return best;
}

/// omega*(B_j) / omega(Q_j) for j in T.
inline std::vector<std::pair<int, double>> stage1_ratios(const ModificationTrace& t) {
  std::vector<std::pair<int, double>> out;
  for (int j : t.T) {
    const auto& s = t.stage1[static_cast<std::size_t>(j)];
    const auto k = t.final_solution.mesh.scene.find(s.id);
    const double num = k ? t.final_solution.component_mass(*k) : 0.0;
    out.emplace_back(j, s.omega_Q > 0 ? num / s.omega_Q : 0.0);
  }
  return out;
}

/// omega*(Q^k) / (M side(Q^k)) for every step.
inline std::vector<std::pair<int, double>> step_ratios(const ModificationTrace& t) {
  std::vector<std::pair<int, double>> out;
  for (const auto& s : t.steps)
    out.emplace_back(s.index, closed_square_mass(t.final_solution, s.square.rect()) /
                                  (t.params.M * s.square.side()));
  return out;
}

/// Annulus constructions on random dyadic squares of `scene`, comparing the
/// mass of surviving components away from RQ before and after.
inline std::vector<MonotonicityRecord> annulus_monotonicity_probe(const CompactScene& scene,
                                                                  double R,
                                                                  const SolverConfig& cfg,
                                                                  std::size_t count,
                                                                  std::uint64_t seed) {
  std::vector<MonotonicityRecord> out;
  if (scene.size() < 2) return out;
  std::mt19937_64 rng(seed);
  const auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const auto before = solve_equilibrium(scene, cfg);
  for (std::size_t attempt = 0; attempt < 200 * count && out.size() < count; ++attempt) {
    const int scale = 2 + static_cast<int>(rng() % 4);
    const auto& c = scene.components[rng() % scene.size()];
    const Rect b = bounding_box(c);
    const Point p{b.x0 + uniform() * b.width(), b.y0 + uniform() * b.height()};
    const double inv = std::ldexp(1.0, scale);
    const DyadicSquare Q{scale, static_cast<std::int64_t>(std::floor(p.x * inv)),
                         static_cast<std::int64_t>(std::floor(p.y * inv))};
    const auto ann = annulus_construction(scene, Q.square(), R, {});
    if (ann.removed.empty() || ann.scene.empty()) continue;
    const auto away = detail::components_away_from(ann.scene, dilate(Q, R).rect());
    if (away.empty()) continue;
    std::vector<std::string> sel;
    for (const auto& id : away)
      if (rng() & 1) sel.push_back(id);
    if (sel.empty()) sel.push_back(away[rng() % away.size()]);
    const auto after = solve_equilibrium(ann.scene, cfg);
    out.push_back({-1, Q, sel, detail::mass_of(before, sel), detail::mass_of(after, sel)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Alpha decisions, T split, exceptional set

struct AlphaDecision {
  std::string component;
  Disc disc;
  DyadicSquare square;
  double omega = 0.0;
  double alpha = 0.0;
  int case_ = 1;
  LevelCurve curve;        // boundary nodes in case 1, the traced curve in case 2
  double escape_log_ratio = 0.0;
  bool escape_ok = true;   // log(r_max / r_min) <= 20 pi
  double min_distance_over_alpha = 1.0;
};

inline double alpha_value(double omega, double M, double side, double radius) {
  return std::max(omega / (M * M * std::log(1.0 / side)), 2.0 * radius);
}

/// Computes alpha for the component disc B of K* inside Q. Case 1 keeps
/// sigma = boundary of B; case 2 traces {g = c} through the maximizer of g on
/// the circle of radius alpha.
inline AlphaDecision alpha_and_curve(const GreenField& f, const std::string& component,
                                     const DyadicSquare& Q, double M) {
  const auto& scene = f.scene();
  const auto k = scene.find(component);
  if (!k) throw InputError("alpha_and_curve: unknown component '" + component + "'");
  const auto* disc = std::get_if<Disc>(&scene.components[*k].shape);
  if (!disc) throw InputError("alpha_and_curve: component is not a disc");
  if (!(Q.side() < 1.0)) throw InputError("alpha_and_curve: square side must be below 1");

  AlphaDecision d;
  d.component = component;
  d.disc = *disc;
  d.square = Q;
  d.omega = f.solution().component_mass(*k);
  d.alpha = alpha_value(d.omega, M, Q.side(), disc->radius);
  d.case_ = d.alpha == 2.0 * disc->radius ? 1 : 2;
  const Point z0 = disc->center;

  if (d.case_ == 1) {
    const auto& mesh = f.solution().mesh;
    d.curve.level = 0.0;
    d.curve.closed = true;
    d.curve.enclosed_components = {component};
    for (std::size_t a = mesh.offsets[*k]; a < mesh.offsets[*k + 1]; ++a)
      d.curve.vertices.push_back(mesh.nodes[a].point);
    d.curve.grad_norms = boundary_gradient(f, *k);
  } else {
    double best = -std::numeric_limits<double>::infinity();
    Point arg{};
    for (int m = 0; m < 4096; ++m) {
      const double t = 2.0 * std::numbers::pi * m / 4096.0;
      const Point z{z0.x + d.alpha * std::cos(t), z0.y + d.alpha * std::sin(t)};
      if (containing_component(scene, z, 0.0)) continue;
      const double g = f.value_unchecked(to_complex(z));
      if (g > best) {
        best = g;
        arg = z;
      }
    }
    if (!std::isfinite(best)) throw DomainError("alpha_and_curve: circle of radius alpha lies in K");
    d.curve = trace_level_curve(f, best, arg);
    if (std::find(d.curve.enclosed_components.begin(), d.curve.enclosed_components.end(),
                  component) == d.curve.enclosed_components.end())
      throw TracerError("alpha_and_curve: traced curve does not enclose the disc", best, best);
  }

  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (const auto& v : d.curve.vertices) {
    rmin = std::min(rmin, distance(v, z0));
    rmax = std::max(rmax, distance(v, z0));
  }
  d.escape_log_ratio = std::log(rmax / rmin);
  d.escape_ok = d.escape_log_ratio <= 20.0 * std::numbers::pi;
  d.min_distance_over_alpha = rmin / d.alpha;
  return d;
}

/// j belongs to T1 when omega*(B_j) >= rho^(eps/2) r_j.
inline bool in_T1(double omega, double rho, double eps, double radius) {
  return omega >= std::pow(rho, eps / 2.0) * radius;
}

inline double final_mass(const ModificationTrace& t, const std::string& id) {
  const auto k = t.final_solution.mesh.scene.find(id);
  return k ? t.final_solution.component_mass(*k) : 0.0;
}

inline std::pair<std::vector<int>, std::vector<int>> split_T(const ModificationTrace& t) {
  std::vector<int> T1, T2;
  for (int j : t.T) {
    const auto& s = t.stage1[static_cast<std::size_t>(j)];
    (in_T1(final_mass(t, s.id), t.params.rho, t.params.epsilon, s.disc.radius) ? T1 : T2)
        .push_back(j);
  }
  return {T1, T2};
}

struct ExceptionalSet {
  std::vector<Square> regions;  // A = K ∩ (union of these squares)
  std::vector<int> T1, T2;
  double content_bound = 0.0;
  double residual_measure = 0.0;
};

inline ExceptionalSet exceptional_set(const ModificationTrace& t, int cover_levels = 8) {
  ExceptionalSet out;
  std::tie(out.T1, out.T2) = split_T(t);
  const double s = 1.0 + t.params.epsilon;
  for (int k : t.S) {
    const auto& Q = t.steps[static_cast<std::size_t>(k - 1)].square;
    out.regions.push_back(dilate(Q, 2.0 * t.params.R));
    out.content_bound += std::pow(2.0 * t.params.R * Q.side(), s);
  }
  for (int j : out.T1) {
    const auto& st = t.stage1[static_cast<std::size_t>(j)];
    out.regions.push_back(st.square.square());
    out.content_bound += greedy_content(st.piece, s, cover_levels);
  }
  for (int j : out.T2) out.residual_measure += final_mass(t, t.stage1[static_cast<std::size_t>(j)].id);
  return out;
}

}  // namespace potlab
