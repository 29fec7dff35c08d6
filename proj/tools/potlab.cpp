// potlab: command-line front end for the potential-theory library.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "potlab/potlab.hpp"

namespace fs = std::filesystem;
using namespace potlab;

namespace {

struct Common {
  std::string scene_path;
  std::string generator;
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out;
  std::string out_dir;
  int min_nodes = 0;
  double density = 0.0;
};

struct AssertionFailure {};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scene", c.scene_path, "Scene JSON file");
  cmd->add_option("--generator", c.generator,
                  "Scene generator, e.g. cantor_discs:depth=2,ratio=0.25");
  cmd->add_option("--seed", c.seed, "Random seed for generators and probes");
  cmd->add_option("--config", c.config_path, "JSON config with 'solver' and 'pipeline' blocks");
  cmd->add_option("--out", c.out, "Write the JSON artifact here instead of stdout");
  cmd->add_option("--out-dir", c.out_dir, "Directory for all artifacts (JSON, CSV, SVG)");
  cmd->add_option("--nodes", c.min_nodes, "Minimum boundary nodes per component");
  cmd->add_option("--density", c.density, "Boundary nodes per unit length");
}

Point parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InputError("point '" + text + "' is not x,y");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::logic_error&) {
    throw InputError("point '" + text + "' is not numeric");
  }
}

class Run {
 public:
  explicit Run(const Common& c) : c_(c) {
    if (!c.config_path.empty()) {
      const Json cfg = parse_json(read_file(c.config_path), c.config_path);
      if (cfg.contains("solver")) apply_solver_config(cfg.at("solver"), params_.solver);
      if (cfg.contains("pipeline")) apply_pipeline_config(cfg.at("pipeline"), params_);
    }
    if (c.min_nodes > 0) params_.solver.min_nodes_per_component = c.min_nodes;
    if (c.density > 0) params_.solver.nodes_per_unit_length = c.density;
    if (!c.out_dir.empty()) fs::create_directories(c.out_dir);
  }

  PipelineParams& params() { return params_; }
  const SolverConfig& solver() const { return params_.solver; }

  CompactScene scene() const {
    if (!c_.scene_path.empty() && !c_.generator.empty())
      throw InputError("give either --scene or --generator, not both");
    if (!c_.scene_path.empty()) return load_scene(c_.scene_path);
    if (!c_.generator.empty()) return generate_scene(parse_generator(c_.generator), c_.seed);
    throw InputError("a scene is required (--scene or --generator)");
  }

  /// Writes the main JSON artifact and echoes a summary line when it goes to
  /// a file.
  void emit(const std::string& name, const Json& j, const std::string& summary) const {
    const std::string text = dump(j);
    bool to_file = false;
    if (!c_.out.empty()) {
      write_file(c_.out, text);
      to_file = true;
    }
    if (!c_.out_dir.empty()) {
      write_file((fs::path(c_.out_dir) / (name + ".json")).string(), text);
      to_file = true;
    }
    if (to_file)
      std::cout << summary << "\n";
    else
      std::cout << text;
  }

  void extra(const std::string& file, const std::string& content) const {
    if (!c_.out_dir.empty()) write_file((fs::path(c_.out_dir) / file).string(), content);
  }

  std::uint64_t seed() const { return c_.seed; }

 private:
  const Common& c_;
  PipelineParams params_;
};

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logarithmic potential theory toolkit"};
  app.require_subcommand(1);
  Common common;

  auto* cap = app.add_subcommand("capacity", "Equilibrium measure, Robin constant and capacity");
  add_common(cap, common);

  auto* green = app.add_subcommand("green-eval", "Green function and gradient at points");
  add_common(green, common);
  std::vector<std::string> points;
  green->add_option("--point", points, "Evaluation point x,y (repeatable)")->required();

  auto* hm = app.add_subcommand("harmonic-measure", "Harmonic measure of a boundary selector");
  add_common(hm, common);
  std::string selector_path, selector_json;
  hm->add_option("--selector", selector_path, "Selector JSON file");
  hm->add_option("--selector-json", selector_json, "Selector JSON text");

  auto* trace = app.add_subcommand("trace-level", "Trace a level curve of the Green function");
  add_common(trace, common);
  double level = 0.0;
  std::string seed_point;
  trace->add_option("--level", level, "Level c > 0")->required();
  trace->add_option("--from", seed_point, "Seed point x,y near the curve")->required();

  auto* crit = app.add_subcommand("critical-points", "Critical points of the Green function");
  add_common(crit, common);
  int resolution = 64;
  crit->add_option("--resolution", resolution, "Seed grid resolution per axis");

  auto* modify = app.add_subcommand("modify", "Run the dyadic domain modification");
  add_common(modify, common);
  std::optional<double> eps, M, rho;
  std::optional<int> R, p, q;
  modify->add_option("--eps", eps, "epsilon");
  modify->add_option("--M", M, "M");
  modify->add_option("--rho", rho, "rho = 2^-N");
  modify->add_option("--R", R, "integer dilation R >= 3");
  modify->add_option("--p", p, "residue class p (with --q)");
  modify->add_option("--q", q, "residue class q (with --p)");

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  add_common(verify, common);
  std::string suite = "all";
  verify->add_option("--suite", suite, "lemma3|lemma4|gradient|contour|flux|pipeline|all");
  for (auto* cmd : {verify}) {
    cmd->add_option("--eps", eps, "epsilon");
    cmd->add_option("--M", M, "M");
    cmd->add_option("--rho", rho, "rho = 2^-N");
    cmd->add_option("--R", R, "integer dilation R >= 3");
  }

  auto* render = app.add_subcommand("render", "Draw a scene or a modification trace as SVG");
  add_common(render, common);
  std::string trace_path;
  std::vector<double> levels;
  bool with_critical = false;
  render->add_option("--trace", trace_path, "Trace JSON written by modify");
  render->add_option("--levels", levels, "Level curves to draw, one per component")->delimiter(',');
  render->add_flag("--critical", with_critical, "Mark critical points");

  auto* gen = app.add_subcommand("generate", "Write a generated scene as JSON");
  add_common(gen, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Run run(common);
    auto& params = run.params();
    if (eps) params.epsilon = *eps;
    if (M) params.M = *M;
    if (rho) params.rho = *rho;
    if (R) params.R = *R;
    if (p.has_value() != q.has_value()) throw InputError("--p and --q go together");
    if (p) params.pq = {{*p, *q}};
    params.validate();

    if (*cap) {
      const auto sol = solve_equilibrium(run.scene(), run.solver());
      run.extra("solution.csv", solution_csv(sol));
      run.emit("capacity", solution_header(sol), fmt("capacity %.12g", sol.capacity));
    } else if (*green) {
      const GreenField f(solve_equilibrium(run.scene(), run.solver()));
      Json arr = Json::array();
      for (const auto& text : points) {
        const Point z = parse_point(text);
        const auto g = green_gradient(f, z);
        arr.push_back(Json{{"x", z.x},
                           {"y", z.y},
                           {"g", green_at(f, z)},
                           {"grad", to_json(g.vector)},
                           {"dg", Json::array({g.derivative.real(), g.derivative.imag()})}});
      }
      run.emit("green", Json{{"robin", f.robin()}, {"points", arr}},
               std::to_string(points.size()) + " points evaluated");
    } else if (*hm) {
      Json sj;
      if (!selector_path.empty()) sj = parse_json(read_file(selector_path), selector_path);
      else if (!selector_json.empty()) sj = parse_json(selector_json, "--selector-json");
      else throw InputError("a selector is required (--selector or --selector-json)");
      const auto sel = selector_from_json(sj);
      const auto sol = solve_equilibrium(run.scene(), run.solver());
      const double m = harmonic_measure(sol, sel);
      run.emit("harmonic_measure", Json{{"selector", to_json(sel)}, {"measure", m}},
               fmt("harmonic measure %.12g", m));
    } else if (*trace) {
      const auto scene = run.scene();
      const GreenField f(solve_equilibrium(scene, run.solver()));
      const auto curve = trace_level_curve(f, level, parse_point(seed_point));
      Json j = to_json(curve);
      j["flux"] = contour_flux(f, curve);
      run.extra("curve.csv", curve_csv(f, curve));
      run.extra("curve.svg", render_svg(Figure{scene, {}, {}, {curve}, {}, "level curve"}));
      run.emit("curve", j, std::to_string(curve.vertices.size()) + " vertices");
    } else if (*crit) {
      const auto scene = run.scene();
      const GreenField f(solve_equilibrium(scene, run.solver()));
      CriticalSearchOptions opt;
      opt.seed_grid_resolution = resolution;
      const auto cps = find_critical_points(f, opt);
      run.extra("critical_points.svg", render_svg(Figure{scene, {}, {}, {}, cps, "critical points"}));
      run.emit("critical_points", Json{{"critical_points", to_json(cps)}},
               std::to_string(cps.size()) + " critical points");
    } else if (*modify) {
      const auto t = modify_domain(run.scene(), params);
      Json j = to_json(t);
      j["exceptional_set"] = to_json(exceptional_set(t));
      Figure fig{t.final_scene, {}, {}, {}, {}, "modified domain"};
      for (const auto& s : t.steps) {
        fig.squares.push_back(s.square.square());
        fig.annuli.emplace_back(dilate(s.square, params.R), s.square.square());
      }
      run.extra("trace.svg", render_svg(fig));
      run.emit("trace", j,
               std::to_string(t.steps.size()) + " steps, " +
                   std::to_string(t.final_scene.size()) + " discs in K*");
    } else if (*verify) {
      SuiteOptions opt;
      opt.params = params;
      opt.seed = run.seed();
      const auto reports = run_verification_suite(run.scene(), suite, opt);
      Json arr = Json::array();
      std::string text;
      bool ok = true;
      for (const auto& r : reports) {
        arr.push_back(to_json(r));
        text += r.to_text();
        ok = ok && r.passed();
      }
      run.extra("report.txt", text);
      run.emit("report", Json{{"suite", suite}, {"passed", ok}, {"reports", arr}},
               std::string(ok ? "PASS" : "FAIL") + " (" + std::to_string(reports.size()) + " reports)");
      if (!ok) {
        std::cerr << text;
        throw AssertionFailure{};
      }
    } else if (*render) {
      Figure fig;
      if (!trace_path.empty()) {
        const Json t = parse_json(read_file(trace_path), trace_path);
        fig.scene = scene_from_json(t.at("final_scene"));
        const int Rt = t.at("params").at("R").get<int>();
        for (const auto& s : t.at("steps")) {
          const DyadicSquare Q{s.at("square").at("scale").get<int>(), s.at("square").at("i").get<std::int64_t>(),
                               s.at("square").at("j").get<std::int64_t>()};
          fig.squares.push_back(Q.square());
          fig.annuli.emplace_back(dilate(Q, Rt), Q.square());
        }
        fig.title = "modified domain";
      } else {
        fig.scene = run.scene();
        fig.title = "scene";
        if (!levels.empty() || with_critical) {
          const GreenField f(solve_equilibrium(fig.scene, run.solver()));
          const auto cps = find_critical_points(f);
          if (with_critical) fig.critical = cps;
          for (std::size_t k = 0; k < levels.size() && k < fig.scene.size(); ++k)
            fig.curves.push_back(trace_level_curve(f, levels[k], level_seed(f, k, levels[k])));
        }
      }
      const std::string svg = render_svg(fig);
      run.extra("figure.svg", svg);
      if (!common.out.empty()) write_file(common.out, svg);
      if (common.out.empty() && common.out_dir.empty()) std::cout << svg;
    } else if (*gen) {
      const auto scene = run.scene();
      run.emit("scene", to_json(scene), std::to_string(scene.size()) + " components");
    }
    return 0;
  } catch (const AssertionFailure&) {
    return 1;
  } catch (const InputError& e) {
    std::cerr << "potlab: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "potlab: " << e.what() << "\n";
    return 2;
  } catch (const PipelineError& e) {
    std::cerr << "potlab: " << e.what() << " (after " << e.partial_trace().steps.size()
              << " steps)\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "potlab: " << e.what() << "\n";
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "potlab: malformed JSON: " << e.what() << "\n";
    return 2;
  }
}
