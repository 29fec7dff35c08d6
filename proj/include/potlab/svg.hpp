#pragma once

// Deterministic SVG figures of scenes, squares, annuli and level curves.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "potlab/geometry.hpp"
#include "potlab/green.hpp"

namespace potlab {

struct SvgStyle {
  double width_px = 800.0;
  std::string scene_fill = "#4a6fa5";
  std::string square_stroke = "#d08c2b";
  std::string annulus_fill = "#f2d7a7";
  std::string curve_stroke = "#b33a3a";
  std::string marker_fill = "#222222";
};

struct Figure {
  CompactScene scene;
  std::vector<Square> squares;
  std::vector<std::pair<Square, Square>> annuli;  // (outer, inner)
  std::vector<LevelCurve> curves;
  std::vector<CriticalPoint> critical;
  std::string title;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf == std::string("-0") ? "0" : buf;
}

// Coordinates are emitted with y flipped so that +y points up.
inline std::string pt(Point p) { return num(p.x) + "," + num(-p.y); }

inline std::string rect_path(const Rect& r) {
  return "M" + pt({r.x0, r.y0}) + " L" + pt({r.x1, r.y0}) + " L" + pt({r.x1, r.y1}) + " L" +
         pt({r.x0, r.y1}) + " Z";
}

inline std::string component_path(const Component& c) {
  if (!c.clip) {
    if (const auto* d = std::get_if<Disc>(&c.shape)) {
      const std::string r = num(d->radius);
      const Point a{d->center.x + d->radius, d->center.y}, b{d->center.x - d->radius, d->center.y};
      return "M" + pt(a) + " A" + r + "," + r + " 0 1 0 " + pt(b) + " A" + r + "," + r + " 0 1 0 " +
             pt(a) + " Z";
    }
    return rect_path(std::get<Square>(c.shape).rect());
  }
  // Clipped pieces: polygonal outline sampled along the boundary pieces.
  std::string d;
  bool first = true;
  for (const auto& piece : boundary_pieces(c)) {
    const int n = std::holds_alternative<Arc>(piece) ? 32 : 1;
    for (int k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      Point p;
      if (const auto* a = std::get_if<Arc>(&piece))
        p = a->at(a->begin + t * (a->end - a->begin));
      else {
        const auto& s = std::get<Segment>(piece);
        p = s.a + t * (s.b - s.a);
      }
      d += (first ? "M" : " L") + pt(p);
      first = false;
    }
  }
  return d + " Z";
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_svg(const Figure& fig, const SvgStyle& style = {}) {
  std::optional<Rect> box = scene_bounds(fig.scene);
  const auto grow = [&](const Rect& r) { box = box ? bounding_union(*box, r) : r; };
  for (const auto& s : fig.squares) grow(s.rect());
  for (const auto& [outer, inner] : fig.annuli) grow(outer.rect());
  for (const auto& c : fig.curves)
    for (const auto& v : c.vertices) grow({v.x, v.y, v.x, v.y});
  for (const auto& c : fig.critical) grow({c.location.x, c.location.y, c.location.x, c.location.y});

  Rect view{0, -1, 1, 0};
  if (box) {
    const double span = std::max({box->width(), box->height(), 1e-9});
    const double m = 0.05 * span;
    view = {box->x0 - m, -box->y1 - m, box->x1 + m, -box->y0 + m};
  }
  const double w = view.width(), h = view.height();
  const double stroke = 0.002 * std::max(w, h);

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(style.width_px) +
         "\" height=\"" + detail::num(style.width_px * h / w) + "\" viewBox=\"" +
         detail::num(view.x0) + " " + detail::num(view.y0) + " " + detail::num(w) + " " +
         detail::num(h) + "\">\n";
  out += "<metadata>{\"generator\":\"potlab\",\"components\":" + std::to_string(fig.scene.size()) +
         ",\"squares\":" + std::to_string(fig.squares.size()) +
         ",\"annuli\":" + std::to_string(fig.annuli.size()) +
         ",\"curves\":" + std::to_string(fig.curves.size()) +
         ",\"critical_points\":" + std::to_string(fig.critical.size()) + "}</metadata>\n";
  if (!fig.title.empty()) out += "<title>" + detail::escape(fig.title) + "</title>\n";

  for (const auto& [outer, inner] : fig.annuli)
    out += "<path d=\"" + detail::rect_path(outer.rect()) + " " + detail::rect_path(inner.rect()) +
           "\" fill=\"" + style.annulus_fill + "\" fill-rule=\"evenodd\" stroke=\"none\"/>\n";
  for (const auto& s : fig.squares)
    out += "<path d=\"" + detail::rect_path(s.rect()) + "\" fill=\"none\" stroke=\"" +
           style.square_stroke + "\" stroke-width=\"" + detail::num(stroke) + "\"/>\n";
  for (const auto& c : fig.scene.components)
    out += "<path id=\"" + detail::escape(c.id) + "\" d=\"" + detail::component_path(c) +
           "\" fill=\"" + style.scene_fill + "\" stroke=\"none\"/>\n";
  for (const auto& c : fig.curves) {
    if (c.vertices.empty()) continue;
    std::string d = "M" + detail::pt(c.vertices.front());
    for (std::size_t k = 1; k < c.vertices.size(); ++k) d += " L" + detail::pt(c.vertices[k]);
    if (c.closed) d += " Z";
    out += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + style.curve_stroke +
           "\" stroke-width=\"" + detail::num(stroke) + "\"/>\n";
  }
  for (const auto& c : fig.critical)
    out += "<circle cx=\"" + detail::num(c.location.x) + "\" cy=\"" + detail::num(-c.location.y) +
           "\" r=\"" + detail::num(3 * stroke) + "\" fill=\"" + style.marker_fill + "\"/>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace potlab
