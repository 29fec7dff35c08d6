#pragma once

// Harmonic measure with pole at infinity (the equilibrium measure), closed
// forms for the disc and annulus, and a small single-layer Dirichlet solver
// used to cross-check the annulus formula.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "potlab/error.hpp"
#include "potlab/geometry.hpp"
#include "potlab/potential.hpp"

namespace potlab {

/// Selects whole components by id.
struct ComponentSelector {
  std::vector<std::string> ids;
};

/// Nodes in the open disc.
struct BallSelector {
  Disc ball;
};

/// Nodes in the closed rectangle.
struct BoxSelector {
  Rect box;
};

/// Nodes whose polar angle about `center` lies in [begin, begin + sweep).
struct SectorSelector {
  Point center;
  double begin = 0.0;
  double sweep = 0.0;
};

using BoundarySelector =
    std::variant<ComponentSelector, BallSelector, BoxSelector, SectorSelector>;

inline bool selects(const BoundarySelector& sel, const BoundaryMesh& mesh, std::size_t a) {
  const BoundaryNode& node = mesh.nodes[a];
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ComponentSelector>) {
          const auto& id = mesh.scene.components[node.component].id;
          return std::find(s.ids.begin(), s.ids.end(), id) != s.ids.end();
        } else if constexpr (std::is_same_v<S, BallSelector>) {
          return distance(node.point, s.ball.center) < s.ball.radius;
        } else if constexpr (std::is_same_v<S, BoxSelector>) {
          return s.box.contains(node.point);
        } else {
          constexpr double two_pi = 2.0 * std::numbers::pi;
          const Point v = node.point - s.center;
          double t = std::atan2(v.y, v.x) - s.begin;
          t -= two_pi * std::floor(t / two_pi);
          return t < s.sweep;
        }
      },
      sel);
}

/// Equilibrium mass of the selected nodes.
inline double harmonic_measure(const EquilibriumSolution& sol, const BoundarySelector& sel) {
  double m = 0.0;
  for (std::size_t a = 0; a < sol.weights.size(); ++a)
    if (selects(sel, sol.mesh, a)) m += sol.weights[a];
  return m;
}

/// Equilibrium mass in the open disc B(center, r).
inline double measure_ball(const EquilibriumSolution& sol, Point center, double r) {
  if (!(r > 0.0)) throw InputError("measure_ball: radius must be positive");
  return harmonic_measure(sol, BallSelector{{center, r}});
}

/// Green function of the disc {|w| < R} with pole at xi.
inline double disc_green_reference(double R, Point w, Point xi) {
  if (!(R > 0.0)) throw InputError("disc_green_reference: R must be positive");
  if (norm(w) > R || norm(xi) > R)
    throw DomainError("disc_green_reference: points must lie in the disc");
  if (w == xi) throw DomainError("disc_green_reference: w coincides with the pole");
  const std::complex<double> a(w.x / R, w.y / R), b(xi.x / R, xi.y / R);
  return std::log(std::abs((1.0 - a * std::conj(b)) / (a - b)));
}

/// Harmonic measure of the inner disc (radius e^-gamma_B) seen from z in the
/// annulus between it and the circle of radius R.
inline double annulus_measure_reference(double R, double gamma_B, Point z) {
  const double rb = std::exp(-gamma_B);
  const double rz = norm(z);
  if (!(R > rb)) throw InputError("annulus_measure_reference: need R > e^-gamma_B");
  if (rz < rb * (1 - 1e-12) || rz > R * (1 + 1e-12))
    throw DomainError("annulus_measure_reference: z lies outside the annulus");
  return std::log(R / rz) / (std::log(R) + gamma_B);
}

/// Single-layer potential u(z) = sum_a sigma_a log 1/|z - z_a| + constant.
struct SingleLayerSolution {
  std::vector<Point> nodes;
  std::vector<double> sigma;
  double constant = 0.0;

  double operator()(Point z) const {
    double u = constant;
    for (std::size_t a = 0; a < nodes.size(); ++a) u -= sigma[a] * std::log(distance(z, nodes[a]));
    return u;
  }
};

/// Solves u = values on the mesh nodes for a single layer plus a constant,
/// with total charge zero. For a bounded multiply connected domain whose
/// boundary is the mesh this is the Dirichlet solution inside the domain.
inline SingleLayerSolution single_layer_dirichlet(const BoundaryMesh& mesh,
                                                  std::span<const double> values,
                                                  SelfEnergy rule = SelfEnergy::periodic_trapezoid) {
  const std::size_t n = mesh.size();
  if (values.size() != n) throw InputError("single_layer_dirichlet: one value per node");
  Eigen::MatrixXd A(n + 1, n + 1);
  A.topLeftCorner(n, n) = assemble_kernel(mesh, rule);
  A.topRightCorner(n, 1).setConstant(1.0);
  A.bottomLeftCorner(1, n).setConstant(1.0);
  A(n, n) = 0.0;
  Eigen::VectorXd rhs(n + 1);
  for (std::size_t a = 0; a < n; ++a) rhs(static_cast<Eigen::Index>(a)) = values[a];
  rhs(static_cast<Eigen::Index>(n)) = 0.0;
  const Eigen::VectorXd x = A.partialPivLu().solve(rhs);
  if (!x.allFinite()) throw SolverError("single_layer_dirichlet: singular system", 0.0, 0);
  SingleLayerSolution out;
  for (const auto& nd : mesh.nodes) out.nodes.push_back(nd.point);
  out.sigma.assign(x.data(), x.data() + n);
  out.constant = x(static_cast<Eigen::Index>(n));
  return out;
}

/// Numerical harmonic measure of the inner disc in the annulus
/// e^-gamma_B < |z| < R, from a single-layer solve with `nodes` per circle.
inline double annulus_measure_numeric(double R, double gamma_B, Point z, int nodes) {
  const double rb = std::exp(-gamma_B);
  if (!(R > rb)) throw InputError("annulus_measure_numeric: need R > e^-gamma_B");
  CompactScene circles{{{"inner", Disc{{0, 0}, rb}, std::nullopt},
                        {"outer", Disc{{0, 0}, R}, std::nullopt}}};
  const auto mesh = discretize_boundary(circles, 1e-300, nodes);
  std::vector<double> values(mesh.size());
  for (std::size_t a = 0; a < mesh.size(); ++a) values[a] = mesh.nodes[a].component == 0 ? 1.0 : 0.0;
  const auto u = single_layer_dirichlet(mesh, values);
  const double rz = norm(z);
  if (rz <= rb || rz >= R) throw DomainError("annulus_measure_numeric: z outside the annulus");
  return u(z);
}

}  // namespace potlab
