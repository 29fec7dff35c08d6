#pragma once

// Boundary discretization, the logarithmic energy kernel, and the equilibrium
// measure solver.
//
// The discrete problem is: minimize w^T K w over the probability simplex,
// where K_ab = log 1/|z_a - z_b| off the diagonal. At the minimizer the
// potential (K w)_a equals the Robin constant on the support of w.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "potlab/error.hpp"
#include "potlab/geometry.hpp"
#include "potlab/parallel.hpp"

namespace potlab {

struct BoundaryNode {
  Point point;
  std::size_t component = 0;  // index into the mesh's scene
  double arc_weight = 0.0;    // boundary length represented by the node
  bool near_corner = false;   // adjacent to a corner of the boundary
};

struct BoundaryMesh {
  CompactScene scene;
  std::vector<BoundaryNode> nodes;
  /// Nodes of component k occupy [offsets[k], offsets[k + 1]).
  std::vector<std::size_t> offsets;
  std::vector<double> component_lengths;

  std::size_t size() const { return nodes.size(); }
};

/// Diagonal rule for the point-collocated log kernel.
enum class SelfEnergy {
  /// log(2 pi / s): the punctured-trapezoid correction; exact for circles.
  periodic_trapezoid,
  /// log(2 / s) + 1: mean of log 1/|t| over a straight segment of length s.
  segment_mean,
};

struct SolverConfig {
  double nodes_per_unit_length = 64.0;
  int min_nodes_per_component = 64;
  SelfEnergy self_energy = SelfEnergy::periodic_trapezoid;
  double negative_weight_tolerance = 1e-10;
  double pg_tolerance = 1e-10;
  long pg_max_iterations = 100000;
};

enum class SolveMethod { linear, projected_gradient };

struct SolveDiagnostics {
  SolveMethod method = SolveMethod::linear;
  long iterations = 0;
  /// max |(K w)_a - robin| over positive-weight nodes away from corners.
  double kkt_residual = 0.0;
  /// min (K w)_a - robin over zero-weight nodes (>= 0 at a true minimizer).
  double min_offsupport_gap = 0.0;
  std::size_t flagged_corner_nodes = 0;
  double projected_gradient_norm = 0.0;
};

struct EquilibriumSolution {
  BoundaryMesh mesh;
  std::vector<double> weights;
  double robin = 0.0;
  double capacity = 1.0;
  SolveDiagnostics diagnostics;

  /// Equilibrium mass carried by component k.
  double component_mass(std::size_t k) const {
    double m = 0.0;
    for (std::size_t a = mesh.offsets[k]; a < mesh.offsets[k + 1]; ++a) m += weights[a];
    return m;
  }
};

// ---------------------------------------------------------------------------

/// Places nodes uniformly in arc length on every component boundary. Circles
/// get nodes at angles 2 pi k / n; other pieces get segment midpoints.
inline BoundaryMesh discretize_boundary(const CompactScene& scene,
                                        double nodes_per_unit_length,
                                        int min_nodes_per_component) {
  if (scene.empty()) throw InputError("discretize_boundary: empty scene");
  if (!(nodes_per_unit_length > 0.0))
    throw InputError("discretize_boundary: node density must be positive");
  validate(scene);

  BoundaryMesh mesh;
  mesh.scene = scene;
  mesh.offsets.push_back(0);
  for (std::size_t k = 0; k < scene.size(); ++k) {
    const auto pieces = boundary_pieces(scene.components[k]);
    double total = 0.0;
    for (const auto& p : pieces) total += length(p);
    if (!(total > 0.0))
      throw InputError("component '" + scene.components[k].id + "' has empty boundary");
    mesh.component_lengths.push_back(total);
    const auto n = std::max<long>(min_nodes_per_component,
                                  static_cast<long>(std::ceil(nodes_per_unit_length * total)));

    for (const auto& piece : pieces) {
      const double len = length(piece);
      if (len <= 1e-14 * total) continue;
      if (const auto* arc = std::get_if<Arc>(&piece); arc && arc->full) {
        for (long m = 0; m < n; ++m)
          mesh.nodes.push_back({arc->at(2.0 * std::numbers::pi * m / n), k,
                                len / static_cast<double>(n), false});
        continue;
      }
      const auto m = std::max<long>(
          1, static_cast<long>(std::ceil(static_cast<double>(n) * len / total - 1e-9)));
      for (long q = 0; q < m; ++q) {
        const double t = (q + 0.5) / static_cast<double>(m);
        Point p;
        if (const auto* a = std::get_if<Arc>(&piece))
          p = a->at(a->begin + t * (a->end - a->begin));
        else {
          const auto& s = std::get<Segment>(piece);
          p = s.a + t * (s.b - s.a);
        }
        mesh.nodes.push_back({p, k, len / static_cast<double>(m), q == 0 || q == m - 1});
      }
    }
    mesh.offsets.push_back(mesh.nodes.size());
  }
  return mesh;
}

inline BoundaryMesh discretize_boundary(const CompactScene& scene, const SolverConfig& cfg) {
  return discretize_boundary(scene, cfg.nodes_per_unit_length, cfg.min_nodes_per_component);
}

inline double self_energy(double arc_weight, SelfEnergy rule) {
  switch (rule) {
    case SelfEnergy::periodic_trapezoid:
      return std::log(2.0 * std::numbers::pi / arc_weight);
    case SelfEnergy::segment_mean:
      return std::log(2.0 / arc_weight) + 1.0;
  }
  return 0.0;
}

/// Symmetric kernel K_ab = log 1/|z_a - z_b| with the chosen diagonal rule.
inline Eigen::MatrixXd assemble_kernel(const BoundaryMesh& mesh,
                                       SelfEnergy rule = SelfEnergy::periodic_trapezoid) {
  const std::size_t n = mesh.size();
  if (n < 2) throw InputError("assemble_kernel: need at least two nodes");
  Eigen::MatrixXd K(n, n);
  std::vector<char> coincident(n, 0);
  parallel_for(n, [&](std::size_t a) {
    const Point za = mesh.nodes[a].point;
    K(a, a) = self_energy(mesh.nodes[a].arc_weight, rule);
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      const double d = distance(za, mesh.nodes[b].point);
      if (!(d > 1e-14)) coincident[a] = 1;
      K(b, a) = -std::log(d);
    }
  });
  for (std::size_t a = 0; a < n; ++a)
    if (coincident[a])
      throw DomainError("assemble_kernel: coincident boundary nodes (singular kernel)");
  return K;
}

namespace detail {

/// Euclidean projection onto the probability simplex (sort-based).
inline Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

struct PgResult {
  Eigen::VectorXd w;
  long iterations = 0;
  double pg_norm = 0.0;
};

// Projected gradient with Barzilai-Borwein steps and exact line search along
// the projected direction (the objective is quadratic).
inline PgResult projected_gradient(const Eigen::MatrixXd& K, Eigen::VectorXd w,
                                   const SolverConfig& cfg) {
  w = project_to_simplex(w);
  Eigen::VectorXd Kw = K * w;
  double lambda = 1.0 / std::max(1.0, K.cwiseAbs().maxCoeff());
  PgResult out;
  for (long it = 0;; ++it) {
    const Eigen::VectorXd g = 2.0 * Kw;
    out.pg_norm = (project_to_simplex(w - g) - w).cwiseAbs().maxCoeff();
    out.iterations = it;
    if (out.pg_norm < cfg.pg_tolerance) break;
    if (it >= cfg.pg_max_iterations)
      throw SolverError("projected gradient did not converge", out.pg_norm, it);
    const Eigen::VectorXd d = project_to_simplex(w - lambda * g) - w;
    const Eigen::VectorXd Kd = K * d;
    const double gd = g.dot(d);
    const double dKd = d.dot(Kd);
    if (!(gd < 0.0)) {
      // No descent along the projected direction: stationary up to roundoff.
      break;
    }
    double t = 1.0;
    if (dKd > 0.0) t = std::min(1.0, -gd / (2.0 * dKd));
    w += t * d;
    Kw += t * Kd;
    const double ss = t * t * d.squaredNorm();
    const double sy = 2.0 * t * t * dKd;
    lambda = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 1e12;
  }
  out.w = std::move(w);
  return out;
}

}  // namespace detail

/// Equilibrium measure of the discretized boundary.
///
/// First solves the bordered system [K -1; 1^T 0][w; robin] = [0; 1]. If a
/// weight is more negative than the configured tolerance the solve falls back
/// to projected gradient on the simplex, warm-started from `warm_start` when
/// its size matches the mesh, otherwise from the clamped linear solution.
inline EquilibriumSolution solve_equilibrium(BoundaryMesh mesh, const SolverConfig& cfg = {},
                                             std::span<const double> warm_start = {}) {
  const std::size_t n = mesh.size();
  const Eigen::MatrixXd K = assemble_kernel(mesh, cfg.self_energy);

  Eigen::MatrixXd A(n + 1, n + 1);
  A.topLeftCorner(n, n) = K;
  A.topRightCorner(n, 1).setConstant(-1.0);
  A.bottomLeftCorner(1, n).setConstant(1.0);
  A(n, n) = 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  const Eigen::VectorXd x = A.partialPivLu().solve(rhs);

  EquilibriumSolution sol;
  sol.diagnostics.flagged_corner_nodes = static_cast<std::size_t>(std::count_if(
      mesh.nodes.begin(), mesh.nodes.end(), [](const auto& nd) { return nd.near_corner; }));

  Eigen::VectorXd w = x.head(n);
  double robin = x(n);
  const bool finite = w.allFinite() && std::isfinite(robin);
  if (finite && w.minCoeff() >= -cfg.negative_weight_tolerance) {
    sol.diagnostics.method = SolveMethod::linear;
    w = w.cwiseMax(0.0);
    w /= w.sum();
  } else {
    Eigen::VectorXd start;
    if (warm_start.size() == n)
      start = Eigen::Map<const Eigen::VectorXd>(warm_start.data(), static_cast<Eigen::Index>(n));
    else if (finite)
      start = w.cwiseMax(0.0);
    else
      start = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
    if (!(start.sum() > 0.0)) start.setConstant(1.0 / static_cast<double>(n));
    start /= start.sum();
    auto pg = detail::projected_gradient(K, start, cfg);
    w = pg.w.cwiseMax(0.0);
    w /= w.sum();
    robin = w.dot(K * w);
    sol.diagnostics.method = SolveMethod::projected_gradient;
    sol.diagnostics.iterations = pg.iterations;
    sol.diagnostics.projected_gradient_norm = pg.pg_norm;
  }

  const Eigen::VectorXd pot = K * w;
  double kkt = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  constexpr double tiny = 10.0 * std::numeric_limits<double>::epsilon();
  for (std::size_t a = 0; a < n; ++a) {
    if (w(a) > tiny) {
      if (!mesh.nodes[a].near_corner) kkt = std::max(kkt, std::abs(pot(a) - robin));
    } else {
      gap = std::min(gap, pot(a) - robin);
    }
  }
  sol.diagnostics.kkt_residual = kkt;
  sol.diagnostics.min_offsupport_gap = std::isfinite(gap) ? gap : 0.0;

  sol.weights.assign(w.data(), w.data() + n);
  sol.robin = robin;
  sol.capacity = std::exp(-robin);
  sol.mesh = std::move(mesh);
  return sol;
}

inline EquilibriumSolution solve_equilibrium(const CompactScene& scene,
                                             const SolverConfig& cfg = {}) {
  return solve_equilibrium(discretize_boundary(scene, cfg), cfg);
}

/// Logarithmic capacity of the scene, e^{-robin}.
inline double capacity(const CompactScene& scene, const SolverConfig& cfg = {}) {
  return solve_equilibrium(scene, cfg).capacity;
}

/// The potential U(z) = sum_a w_a log 1/|z - z_a|.
inline double log_potential_at(const EquilibriumSolution& sol, Point z) {
  if (!is_finite(z)) throw DomainError("log_potential_at: non-finite point");
  double u = 0.0;
  for (std::size_t a = 0; a < sol.weights.size(); ++a) {
    const double d = distance(z, sol.mesh.nodes[a].point);
    if (d < 1e-12) throw DomainError("log_potential_at: point coincides with a boundary node");
    u -= sol.weights[a] * std::log(d);
  }
  return u;
}

}  // namespace potlab
