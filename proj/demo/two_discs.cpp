// Walks through the main objects for two equal discs: capacity, the saddle
// of the Green function, a pair of level curves and the contour identity.

#include <cstdio>

#include "potlab/potlab.hpp"

int main() {
  using namespace potlab;
  CompactScene scene;
  scene.components.push_back({"left", Disc{{-0.25, 0.0}, 0.15}, std::nullopt});
  scene.components.push_back({"right", Disc{{0.25, 0.0}, 0.15}, std::nullopt});

  // Refine the mesh until curves at half the saddle level are well resolved.
  const GreenField f(solve_for_levels(scene, SolverConfig{}, 0.5));
  std::printf("capacity %.10f  robin %.10f  (%zu nodes)\n", f.solution().capacity, f.robin(),
              f.solution().mesh.size());

  const auto critical = find_critical_points(f);
  for (const auto& c : critical)
    std::printf("critical point (%.6f, %.6f)  g = %.8f\n", c.location.x, c.location.y, c.green_value);

  const std::vector<double> fractions{0.5, 0.5};
  const auto curves = separating_level_curves(f, fractions, critical);
  const auto report = check_lemma3(f, curves, critical);
  std::fputs(report.to_text().c_str(), stdout);

  Figure fig{scene, {}, {}, curves, critical, "two discs"};
  write_file("two_discs.svg", render_svg(fig));
  std::puts("wrote two_discs.svg");
  return report.passed() ? 0 : 1;
}
