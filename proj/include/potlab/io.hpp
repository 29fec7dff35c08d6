#pragma once

// JSON and CSV formats for scenes, selectors, configuration, solutions,
// curves, critical points, traces and reports.

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "potlab/error.hpp"
#include "potlab/geometry.hpp"
#include "potlab/green.hpp"
#include "potlab/harmonic.hpp"
#include "potlab/jones_wolff.hpp"
#include "potlab/potential.hpp"
#include "potlab/verify.hpp"

namespace potlab {

using Json = nlohmann::ordered_json;

namespace detail {

inline double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw InputError(std::string("expected numeric field '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
  if (!out) throw InputError("write to '" + path + "' failed");
}

inline Json parse_json(const std::string& text, const std::string& origin = "input") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(origin + ": " + e.what());
  }
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Geometry

inline Json to_json(Point p) { return Json::array({p.x, p.y}); }

inline Json to_json(const Rect& r) {
  return Json{{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}};
}

inline Json to_json(const Disc& d) {
  return Json{{"cx", d.center.x}, {"cy", d.center.y}, {"r", d.radius}};
}

inline Json to_json(const Square& s) {
  return Json{{"x0", s.corner.x}, {"y0", s.corner.y}, {"side", s.side}};
}

inline Json to_json(const DyadicSquare& q) {
  return Json{{"scale", q.scale}, {"i", q.i}, {"j", q.j}, {"side", q.side()}};
}

inline Json to_json(const Component& c) {
  Json j{{"id", c.id}};
  if (const auto* d = std::get_if<Disc>(&c.shape))
    j["disc"] = to_json(*d);
  else
    j["square"] = to_json(std::get<Square>(c.shape));
  if (c.clip) j["clip"] = to_json(*c.clip);
  return j;
}

inline Json to_json(const CompactScene& scene) {
  Json arr = Json::array();
  for (const auto& c : scene.components) arr.push_back(to_json(c));
  return Json{{"components", arr}};
}

inline CompactScene scene_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("components") || !j.at("components").is_array())
    throw InputError("scene: expected an object with a 'components' array");
  CompactScene scene;
  for (const auto& c : j.at("components")) {
    if (!c.contains("id") || !c.at("id").is_string()) throw InputError("scene: component without string id");
    Component comp;
    comp.id = c.at("id").get<std::string>();
    if (c.contains("disc")) {
      const auto& d = c.at("disc");
      comp.shape = Disc{{detail::number(d, "cx"), detail::number(d, "cy")}, detail::number(d, "r")};
    } else if (c.contains("square")) {
      const auto& s = c.at("square");
      comp.shape = Square{{detail::number(s, "x0"), detail::number(s, "y0")}, detail::number(s, "side")};
    } else {
      throw InputError("scene: component '" + comp.id + "' has neither disc nor square");
    }
    if (c.contains("clip")) {
      const auto& r = c.at("clip");
      comp.clip = Rect{detail::number(r, "x0"), detail::number(r, "y0"), detail::number(r, "x1"),
                       detail::number(r, "y1")};
    }
    scene.components.push_back(std::move(comp));
  }
  validate(scene);
  return scene;
}

inline CompactScene load_scene(const std::string& path) {
  return scene_from_json(parse_json(read_file(path), path));
}

// ---------------------------------------------------------------------------
// Selectors and configuration

inline BoundarySelector selector_from_json(const Json& j) {
  if (j.contains("components")) {
    ComponentSelector s;
    for (const auto& id : j.at("components")) s.ids.push_back(id.get<std::string>());
    return s;
  }
  if (j.contains("ball")) {
    const auto& b = j.at("ball");
    const double r = detail::number(b, "r");
    if (!(r > 0.0)) throw InputError("selector: ball radius must be positive");
    return BallSelector{{{detail::number(b, "cx"), detail::number(b, "cy")}, r}};
  }
  if (j.contains("box")) {
    const auto& r = j.at("box");
    return BoxSelector{{detail::number(r, "x0"), detail::number(r, "y0"), detail::number(r, "x1"),
                        detail::number(r, "y1")}};
  }
  if (j.contains("sector")) {
    const auto& s = j.at("sector");
    return SectorSelector{{detail::number(s, "cx"), detail::number(s, "cy")},
                          detail::number(s, "begin"), detail::number(s, "sweep")};
  }
  throw InputError("selector: expected 'components', 'ball', 'box' or 'sector'");
}

inline Json to_json(const BoundarySelector& sel) {
  return std::visit(
      [](const auto& s) -> Json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ComponentSelector>)
          return Json{{"components", s.ids}};
        else if constexpr (std::is_same_v<S, BallSelector>)
          return Json{{"ball", to_json(s.ball)}};
        else if constexpr (std::is_same_v<S, BoxSelector>)
          return Json{{"box", to_json(s.box)}};
        else
          return Json{{"sector", {{"cx", s.center.x}, {"cy", s.center.y}, {"begin", s.begin}, {"sweep", s.sweep}}}};
      },
      sel);
}

inline const char* to_string(SelfEnergy s) {
  return s == SelfEnergy::periodic_trapezoid ? "periodic_trapezoid" : "segment_mean";
}

inline const char* to_string(SolveMethod m) {
  return m == SolveMethod::linear ? "linear" : "projected_gradient";
}

inline void apply_solver_config(const Json& j, SolverConfig& cfg) {
  if (j.contains("nodes_per_unit_length")) cfg.nodes_per_unit_length = detail::number(j, "nodes_per_unit_length");
  if (j.contains("min_nodes_per_component"))
    cfg.min_nodes_per_component = static_cast<int>(detail::number(j, "min_nodes_per_component"));
  if (j.contains("self_energy")) {
    const auto s = j.at("self_energy").get<std::string>();
    if (s == "periodic_trapezoid") cfg.self_energy = SelfEnergy::periodic_trapezoid;
    else if (s == "segment_mean") cfg.self_energy = SelfEnergy::segment_mean;
    else throw InputError("solver: unknown self_energy '" + s + "'");
  }
  if (j.contains("negative_weight_tolerance"))
    cfg.negative_weight_tolerance = detail::number(j, "negative_weight_tolerance");
  if (j.contains("pg_tolerance")) cfg.pg_tolerance = detail::number(j, "pg_tolerance");
  if (j.contains("pg_max_iterations"))
    cfg.pg_max_iterations = static_cast<long>(detail::number(j, "pg_max_iterations"));
  if (!(cfg.nodes_per_unit_length > 0.0) || cfg.min_nodes_per_component < 2)
    throw InputError("solver: node density must be positive and min nodes at least 2");
}

inline Json to_json(const SolverConfig& cfg) {
  return Json{{"nodes_per_unit_length", cfg.nodes_per_unit_length},
              {"min_nodes_per_component", cfg.min_nodes_per_component},
              {"self_energy", to_string(cfg.self_energy)},
              {"negative_weight_tolerance", cfg.negative_weight_tolerance},
              {"pg_tolerance", cfg.pg_tolerance},
              {"pg_max_iterations", cfg.pg_max_iterations}};
}

inline void apply_pipeline_config(const Json& j, PipelineParams& p) {
  if (j.contains("epsilon")) p.epsilon = detail::number(j, "epsilon");
  if (j.contains("M")) p.M = detail::number(j, "M");
  if (j.contains("rho")) p.rho = detail::number(j, "rho");
  if (j.contains("R")) p.R = static_cast<int>(detail::number(j, "R"));
  if (j.contains("p") && j.contains("q"))
    p.pq = {{static_cast<int>(detail::number(j, "p")), static_cast<int>(detail::number(j, "q"))}};
  if (j.contains("solver")) apply_solver_config(j.at("solver"), p.solver);
  p.validate();
}

inline Json to_json(const PipelineParams& p) {
  Json j{{"epsilon", p.epsilon}, {"M", p.M}, {"rho", p.rho}, {"R", p.R}};
  if (p.pq) {
    j["p"] = p.pq->first;
    j["q"] = p.pq->second;
  } else {
    j["pq"] = "auto";
  }
  j["in_regime"] = p.in_regime();
  j["solver"] = to_json(p.solver);
  return j;
}

// ---------------------------------------------------------------------------
// Solutions, curves, critical points

inline Json solution_header(const EquilibriumSolution& sol) {
  Json masses = Json::object();
  for (std::size_t k = 0; k < sol.mesh.scene.size(); ++k)
    masses[sol.mesh.scene.components[k].id] = sol.component_mass(k);
  return Json{{"robin", sol.robin},
              {"capacity", sol.capacity},
              {"nodes", sol.mesh.size()},
              {"method", to_string(sol.diagnostics.method)},
              {"iterations", sol.diagnostics.iterations},
              {"kkt_residual", sol.diagnostics.kkt_residual},
              {"min_offsupport_gap", sol.diagnostics.min_offsupport_gap},
              {"flagged_corner_nodes", sol.diagnostics.flagged_corner_nodes},
              {"component_masses", masses}};
}

inline std::string solution_csv(const EquilibriumSolution& sol) {
  std::string out = "x,y,weight,component\n";
  char buf[128];
  for (std::size_t a = 0; a < sol.weights.size(); ++a) {
    const auto& n = sol.mesh.nodes[a];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", n.point.x, n.point.y, sol.weights[a]);
    out += buf + sol.mesh.scene.components[n.component].id + "\n";
  }
  return out;
}

inline Json to_json(const LevelCurve& c) {
  Json verts = Json::array();
  for (const auto& v : c.vertices) verts.push_back(to_json(v));
  return Json{{"level", c.level},
              {"closed", c.closed},
              {"vertex_count", c.vertices.size()},
              {"enclosed_components", c.enclosed_components},
              {"vertices", verts},
              {"grad_norms", c.grad_norms}};
}

inline std::string curve_csv(const GreenField& f, const LevelCurve& c) {
  std::string out = "x,y,g,grad_norm\n";
  char buf[160];
  for (std::size_t k = 0; k < c.vertices.size(); ++k) {
    const auto& v = c.vertices[k];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", v.x, v.y,
                  f.value_unchecked(to_complex(v)), c.grad_norms[k]);
    out += buf;
  }
  return out;
}

inline Json to_json(const CriticalPoint& c) {
  return Json{{"x", c.location.x}, {"y", c.location.y}, {"g", c.green_value}, {"multiplicity", c.multiplicity}};
}

inline Json to_json(const std::vector<CriticalPoint>& cps) {
  Json arr = Json::array();
  for (const auto& c : cps) arr.push_back(to_json(c));
  return arr;
}

// ---------------------------------------------------------------------------
// Pipeline

inline Json to_json(const SolutionSummary& s) {
  Json masses = Json::object();
  for (const auto& [id, m] : s.masses) masses[id] = m;
  return Json{{"robin", s.robin},
              {"capacity", s.capacity},
              {"method", to_string(s.method)},
              {"kkt_residual", s.kkt_residual},
              {"component_masses", masses}};
}

inline Json to_json(const MonotonicityRecord& m) {
  return Json{{"step", m.step}, {"square", to_json(m.square)}, {"selector", m.selector},
              {"before", m.before}, {"after", m.after}};
}

inline Json to_json(const ModificationTrace& t) {
  Json stage1 = Json::array();
  for (const auto& s : t.stage1)
    stage1.push_back(Json{{"id", s.id},
                          {"square", to_json(s.square)},
                          {"pieces", to_json(s.piece)["components"]},
                          {"capacity_E", s.capacity_E},
                          {"disc", to_json(s.disc)},
                          {"omega_Q", s.omega_Q}});
  Json steps = Json::array();
  for (const auto& s : t.steps)
    steps.push_back(Json{{"index", s.index},
                         {"square", to_json(s.square)},
                         {"selection_mass", s.selection_mass},
                         {"removed", s.removed},
                         {"protected_kept", s.protected_kept},
                         {"absorbed", s.absorbed},
                         {"added", {{"id", s.disc_id}, {"disc", to_json(s.disc)}}},
                         {"capacity_E", s.capacity_E},
                         {"after_annulus", to_json(s.after_annulus)},
                         {"after_step", to_json(s.after_step)}});
  Json mono = Json::array();
  for (const auto& m : t.monotonicity) mono.push_back(to_json(m));
  return Json{{"params", to_json(t.params)},
              {"p", t.p},
              {"q", t.q},
              {"initial_scene", to_json(t.initial)},
              {"initial_solution", to_json(t.initial_solution)},
              {"stage1", stage1},
              {"steps", steps},
              {"monotonicity", mono},
              {"final_scene", to_json(t.final_scene)},
              {"S", t.S},
              {"T", t.T},
              {"final_solution", solution_header(t.final_solution)}};
}

inline Json to_json(const ExceptionalSet& e) {
  Json regions = Json::array();
  for (const auto& r : e.regions) regions.push_back(to_json(r));
  return Json{{"regions", regions},
              {"T1", e.T1},
              {"T2", e.T2},
              {"content_bound", e.content_bound},
              {"residual_measure", e.residual_measure}};
}

inline Json to_json(const AlphaDecision& d) {
  return Json{{"component", d.component},
              {"disc", to_json(d.disc)},
              {"square", to_json(d.square)},
              {"omega", d.omega},
              {"alpha", d.alpha},
              {"case", d.case_},
              {"curve_level", d.curve.level},
              {"curve_vertices", d.curve.vertices.size()},
              {"escape_log_ratio", d.escape_log_ratio},
              {"escape_ok", d.escape_ok},
              {"min_distance_over_alpha", d.min_distance_over_alpha}};
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const VerificationReport& r) {
  Json inputs = Json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  Json quantities = Json::object();
  for (const auto& [k, v] : r.quantities) quantities[k] = v;
  Json ineq = Json::array();
  for (const auto& i : r.inequalities)
    ineq.push_back(Json{{"name", i.name}, {"lhs", i.lhs}, {"op", i.op}, {"rhs", i.rhs}, {"holds", i.holds}});
  Json residuals = Json::object();
  for (const auto& [k, v] : r.residuals) residuals[k] = v;
  Json tol = Json::object();
  for (const auto& [k, v] : r.tolerances) tol[k] = v;
  return Json{{"name", r.name},   {"passed", r.passed()},   {"inputs", inputs},
              {"quantities", quantities}, {"inequalities", ineq}, {"residuals", residuals},
              {"tolerances", tol}};
}

}  // namespace potlab
