#pragma once

// Deterministic test scenes inside the disc |z| < 1/2.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "potlab/error.hpp"
#include "potlab/geometry.hpp"

namespace potlab {

struct GeneratorSpec {
  std::string name;
  std::map<std::string, double> params;

  double get(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

/// Parses "name" or "name:key=value,key=value".
inline GeneratorSpec parse_generator(const std::string& text) {
  GeneratorSpec spec;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  if (colon == std::string::npos) return spec;
  std::size_t pos = colon + 1;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw InputError("generator parameter '" + item + "' is not key=value");
    try {
      std::size_t used = 0;
      const double v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
      spec.params[item.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw InputError("generator parameter '" + item + "' has a non-numeric value");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return spec;
}

/// 4^depth discs: each disc of radius r is replaced by four children of
/// radius ratio * r centred at (+-r/2, +-r/2) from it.
inline CompactScene cantor_discs(int depth, double ratio, double r0 = 0.45) {
  if (depth < 0 || depth > 6) throw InputError("cantor_discs: depth must lie in [0, 6]");
  if (!(ratio > 0.0 && ratio < 0.29)) throw InputError("cantor_discs: ratio must lie in (0, 0.29)");
  std::vector<Disc> level{{{0.0, 0.0}, r0}};
  for (int d = 0; d < depth; ++d) {
    std::vector<Disc> next;
    for (const auto& b : level)
      for (int sy : {-1, 1})
        for (int sx : {-1, 1})
          next.push_back({{b.center.x + sx * b.radius / 2, b.center.y + sy * b.radius / 2},
                          ratio * b.radius});
    level = std::move(next);
  }
  CompactScene scene;
  for (std::size_t k = 0; k < level.size(); ++k)
    scene.components.push_back({"c" + std::to_string(k), level[k], std::nullopt});
  return scene;
}

/// n pairwise separated discs with radii in [rmin, rmax], drawn by
/// rejection sampling. Uniform draws use the top 53 bits of mt19937_64 so the
/// output does not depend on the standard library.
inline CompactScene random_discs(int n, std::uint64_t seed, double rmin = 0.02, double rmax = 0.08,
                                 double gap = 0.01) {
  if (n < 1) throw InputError("random_discs: n must be positive");
  if (!(rmin > 0.0 && rmax >= rmin && rmax < 0.25)) throw InputError("random_discs: bad radii");
  std::mt19937_64 rng(seed);
  const auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Disc> discs;
  for (long attempt = 0; static_cast<int>(discs.size()) < n; ++attempt) {
    if (attempt > 100000L * n) throw InputError("random_discs: could not place discs");
    const double r = rmin + (rmax - rmin) * uniform();
    const double lim = 0.5 - r - 1e-3;
    const Point c{(2 * uniform() - 1) * lim, (2 * uniform() - 1) * lim};
    if (norm(c) >= lim) continue;
    bool ok = true;
    for (const auto& d : discs) ok = ok && distance(c, d.center) > r + d.radius + gap;
    if (ok) discs.push_back({c, r});
  }
  CompactScene scene;
  for (std::size_t k = 0; k < discs.size(); ++k)
    scene.components.push_back({"d" + std::to_string(k), discs[k], std::nullopt});
  return scene;
}

/// n x n axis-parallel squares on a regular grid over [-0.3, 0.3]^2.
inline CompactScene grid_squares(int n, double fill = 0.5) {
  if (n < 1 || n > 64) throw InputError("grid_squares: n must lie in [1, 64]");
  if (!(fill > 0.0 && fill < 1.0)) throw InputError("grid_squares: fill must lie in (0, 1)");
  const double cell = 0.6 / n, side = fill * cell;
  CompactScene scene;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      scene.components.push_back(
          {"s" + std::to_string(j * n + i),
           Square{{-0.3 + (i + 0.5) * cell - side / 2, -0.3 + (j + 0.5) * cell - side / 2}, side},
           std::nullopt});
  return scene;
}

inline CompactScene generate_scene(const GeneratorSpec& spec, std::uint64_t seed) {
  if (spec.name == "cantor_discs")
    return cantor_discs(static_cast<int>(spec.get("depth", 2)), spec.get("ratio", 0.25),
                        spec.get("r0", 0.45));
  if (spec.name == "random_discs")
    return random_discs(static_cast<int>(spec.get("n", 8)),
                        static_cast<std::uint64_t>(spec.get("seed", static_cast<double>(seed))),
                        spec.get("rmin", 0.02), spec.get("rmax", 0.08), spec.get("gap", 0.01));
  if (spec.name == "grid_squares")
    return grid_squares(static_cast<int>(spec.get("n", 3)), spec.get("fill", 0.5));
  throw InputError("unknown generator '" + spec.name + "'");
}

}  // namespace potlab
