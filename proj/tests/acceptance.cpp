// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "potlab/potlab.hpp"

using namespace potlab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

CompactScene discs(std::initializer_list<Disc> ds) {
  CompactScene s;
  int k = 0;
  for (const auto& d : ds) s.components.push_back({"c" + std::to_string(k++), d, std::nullopt});
  return s;
}

SolverConfig exact_nodes(int n) {
  SolverConfig cfg;
  cfg.nodes_per_unit_length = 1e-9;
  cfg.min_nodes_per_component = n;
  return cfg;
}

struct Outcome {
  bool pass;
  std::string detail;
};

// Relative errors below this are indistinguishable from roundoff in the
// solve, so no convergence rate can be read off them.
constexpr double roundoff_floor = 1e-13;

Outcome disc_capacity() {
  bool ok = true;
  std::string d;
  for (double r : {0.25, 0.5, 1.0}) {
    const auto scene = discs({Disc{{0.1, -0.05}, r}});
    double err[2];
    double worst_time = 0;
    int idx = 0;
    for (int n : {256, 1024}) {
      const auto t0 = Clock::now();
      const double c = capacity(scene, exact_nodes(n));
      worst_time = std::max(worst_time, seconds_since(t0));
      err[idx++] = std::abs(c - r) / r;
    }
    std::string order;
    if (err[0] > roundoff_floor && err[1] > roundoff_floor) {
      const double p = std::log(err[0] / err[1]) / std::log(4.0);
      order = fmt("%.2f", p);
      ok = ok && p >= 1.8;
    } else {
      order = "n/a (both errors at roundoff)";
    }
    ok = ok && err[0] < 1e-3 && err[1] < 1e-4 && worst_time < 2.0;
    d += fmt(" r=%g: err256=%.2e err1024=%.2e order=%s t=%.2fs;", r, err[0], err[1], order.c_str(),
             worst_time);
  }
  return {ok, d};
}

Outcome disc_green() {
  const double r = 0.5;
  const GreenField f(solve_equilibrium(discs({Disc{{0, 0}, r}}), {}));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> rad(1.05 * r, 5.0), ang(0, 2 * std::numbers::pi);
  double worst = 0;
  for (int k = 0; k < 200; ++k) {
    const double q = rad(rng), t = ang(rng);
    const Point z{q * std::cos(t), q * std::sin(t)};
    worst = std::max(worst, std::abs(green_at(f, z) - std::log(q / r)));
  }
  return {worst < 1e-3, fmt(" max error over 200 points %.2e", worst)};
}

Outcome arc_measure() {
  const auto sol = solve_equilibrium(discs({Disc{{0, 0}, 1.0}}), exact_nodes(2048));
  double worst = 0;
  for (double th : {std::numbers::pi / 6, std::numbers::pi / 2, std::numbers::pi})
    worst = std::max(worst, std::abs(harmonic_measure(sol, SectorSelector{{0, 0}, 0.1, th}) -
                                     th / (2 * std::numbers::pi)));
  return {worst < 1e-3, fmt(" max error %.2e (2048 nodes)", worst)};
}

Outcome annulus() {
  const double spot = annulus_measure_reference(100, std::log(2.0), {50, 0});
  bool ok = std::abs(spot - 0.13082) < 5e-6;
  std::string d = fmt(" reference(100, log 2, 50)=%.6f;", spot);
  for (double R : {10.0, 100.0}) {
    const Point z{R / 2, 0};
    const double ref = annulus_measure_reference(R, std::log(2.0), z);
    const double num = annulus_measure_numeric(R, std::log(2.0), z, 256);
    ok = ok && std::abs(ref - num) < 1e-2;
    d += fmt(" R=%g numeric=%.6f reference=%.6f;", R, num, ref);
  }
  return {ok, d};
}

std::vector<CompactScene> identity_scenes() {
  return {discs({Disc{{0, 0}, 0.2}}),
          discs({Disc{{-0.25, 0}, 0.15}, Disc{{0.25, 0}, 0.15}}),
          discs({Disc{{-0.2, 0.05}, 0.2}, Disc{{0.3, -0.05}, 0.08}}),
          discs({Disc{{-0.25, -0.15}, 0.1}, Disc{{0.25, -0.15}, 0.12}, Disc{{0, 0.25}, 0.09}})};
}

Outcome critical_counts() {
  const std::vector<CompactScene> scenes = {
      discs({Disc{{-0.25, 0}, 0.15}, Disc{{0.25, 0}, 0.15}}),
      discs({Disc{{-0.25, -0.15}, 0.1}, Disc{{0.25, -0.15}, 0.12}, Disc{{0, 0.25}, 0.09}}),
      discs({Disc{{-0.2, -0.2}, 0.08}, Disc{{0.22, -0.18}, 0.1}, Disc{{0.2, 0.2}, 0.06},
             Disc{{-0.21, 0.19}, 0.09}})};
  bool ok = true;
  std::string d;
  for (const auto& s : scenes) {
    const auto t0 = Clock::now();
    const GreenField f(solve_equilibrium(s, {}));
    const auto cps = find_critical_points(f);
    int newton = 0;
    for (const auto& c : cps) newton += c.multiplicity;
    const int arg = count_critical_by_argument(f, circle_contour({0, 0}, 2.0, 720));
    const double t = seconds_since(t0);
    const int expect = static_cast<int>(s.size()) - 1;
    ok = ok && newton == expect && arg == expect && t < 10.0;
    d += fmt(" %zu discs: newton=%d argument=%d t=%.2fs;", s.size(), newton, arg, t);
  }
  return {ok, d};
}

Outcome curve_identities(bool winding) {
  bool ok = true;
  std::string d;
  const std::vector<double> fr{0.4, 0.6};
  for (const auto& s : identity_scenes()) {
    SolverConfig cfg;
    if (s.size() == 1) cfg.min_nodes_per_component = 512;
    const GreenField f(solve_for_levels(s, cfg, fr.front()));
    const auto crit = find_critical_points(f);
    const auto curves = separating_level_curves(f, fr, crit);
    if (winding) {
      double worst = 0;
      for (const auto& c : curves) worst = std::max(worst, std::abs(contour_log_grad_winding(f, c.vertices) + 1.0));
      ok = ok && worst < 1e-2;
      d += fmt(" %zu comp: max |winding+1|=%.2e;", s.size(), worst);
    } else {
      const auto rep = check_lemma3(f, curves, crit);
      const double res = rep.get("identity_residual");
      const double tol = s.size() == 1 ? 1e-6 : 1e-2;
      ok = ok && rep.passed() && res < tol && rep.get("lhs") > -std::log(2.0);
      d += fmt(" %zu comp: residual=%.2e lhs=%.4f;", s.size(), res, rep.get("lhs"));
    }
  }
  return {ok, d};
}

Outcome pipeline() {
  const auto scene = cantor_discs(2, 0.25);
  PipelineParams p;  // eps 0.5, M 8, rho 1/16, R 4
  const auto t0 = Clock::now();
  const auto t = modify_domain(scene, p);
  const double secs = seconds_since(t0);
  PipelineParams fine = p;
  fine.solver.nodes_per_unit_length *= 2;
  fine.solver.min_nodes_per_component *= 2;
  const auto t2 = modify_domain(scene, fine);
  const double c1 = ball_growth_constant(t), c2 = ball_growth_constant(t2);
  const double stability = std::max(c1, c2) / std::min(c1, c2);
  const auto rep = check_pipeline(t, PipelineCheckOptions{20, 1, 1e-4});
  const bool disjoint = pairwise_disjoint_discs(t.final_scene);
  const bool covered = coverage_holds(t);
  const double mono = rep.get("monotonicity_min_gain");
  const bool ok = secs < 60 && disjoint && covered && stability < 2.0 && rep.passed() &&
                  rep.get("monotonicity_selectors") >= 20;
  return {ok, fmt(" t=%.2fs steps=%zu K*=%zu disjoint=%d coverage=%d growth=%.4f/%.4f (x%.3f) "
                  "monotonicity min gain=%.2e over %g selectors; in_regime=%d",
                  secs, t.steps.size(), t.final_scene.size(), disjoint, covered, c1, c2, stability,
                  mono, rep.get("monotonicity_selectors"), p.in_regime())};
}

Outcome content_ratio() {
  bool finite = true;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto scene = random_discs(2 + static_cast<int>(seed % 7), seed);
    for (double s : {1.0, 1.5, 2.0}) {
      const auto rep = check_lemma4(scene, s);
      finite = finite && rep.passed() && std::isfinite(rep.get("ratio"));
    }
  }
  // For a disc the cover value is exactly r^s; the computed capacity carries
  // roundoff of a few ulps, which the power s amplifies.
  bool discs_ok = true;
  double worst_excess = -1;
  for (double r : {0.05, 0.2, 0.45})
    for (double s : {1.0, 1.5, 2.0}) {
      const double excess = check_lemma4(discs({Disc{{0.01, 0.02}, r}}), s).get("ratio") - 1.0;
      discs_ok = discs_ok && excess <= 4.0 * s * std::numeric_limits<double>::epsilon();
      worst_excess = std::max(worst_excess, excess);
    }
  return {finite && discs_ok,
          fmt(" 150 random cases finite=%d; max disc ratio - 1 = %.3g (roundoff allowance 4 s eps)",
              finite, worst_excess)};
}

int run_cli(const std::string& args) {
  const int st = std::system((std::string(POTLAB_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "potlab_acceptance";
  fs::remove_all(root);
  bool ok = true;
  std::string d;
  const std::string scene = std::string("--scene ") + POTLAB_DATA_DIR + "/scenes/three_discs.json";
  const std::vector<std::pair<std::string, std::string>> jobs = {
      {"modify --generator cantor_discs:depth=2,ratio=0.25 --seed 3", "trace.json"},
      {"verify --suite all " + scene + " --seed 3", "report.json"}};
  for (const auto& [args, file] : jobs) {
    std::string bytes[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path dir = root / (file + std::to_string(k));
      const int code = run_cli(args + " --out-dir " + dir.string());
      ok = ok && code == 0;
      bytes[k] = fs::exists(dir / file) ? read_file((dir / file).string()) : "";
    }
    const bool same = !bytes[0].empty() && bytes[0] == bytes[1];
    ok = ok && same;
    d += fmt(" %s: %s (%zu bytes);", file.c_str(), same ? "identical" : "DIFFERENT", bytes[0].size());
  }
  return {ok, d};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"disc capacity", disc_capacity},
      {"disc Green function", disc_green},
      {"arc harmonic measure", arc_measure},
      {"annulus reference", annulus},
      {"critical point counts", critical_counts},
      {"level curve integral identity", [] { return curve_identities(false); }},
      {"winding identity", [] { return curve_identities(true); }},
      {"modification pipeline", pipeline},
      {"content versus capacity", content_ratio},
      {"determinism", determinism}};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string(" exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %zu %s: %s%s\n", k + 1, criteria[k].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
