#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pqcausal/diamond.hpp"
#include "pqcausal/plateau.hpp"

namespace pqcausal {

namespace detail {

// Fixed-width decimal formatting; emitted documents must be byte-stable for
// identical inputs, so no locale or default-precision streams.
inline std::string fmt6(double x) {
  char buf[40];
  if (x == 0.0) x = 0.0;  // normalize -0
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

struct SvgCanvas {
  std::string body;
  double x0, y0, x1, y1;  // world window, y up
  double w = 640, hgt = 640;

  double px(double x) const { return (x - x0) / (x1 - x0) * w; }
  double py(double y) const { return hgt - (y - y0) / (y1 - y0) * hgt; }

  void rect(double x, double y, double dx, double dy, const std::string& fill) {
    body += "<rect x=\"" + fmt6(px(x)) + "\" y=\"" + fmt6(py(y + dy)) +
            "\" width=\"" + fmt6(dx / (x1 - x0) * w) + "\" height=\"" +
            fmt6(dy / (y1 - y0) * hgt) + "\" fill=\"" + fill + "\"/>\n";
  }

  void line(double xa, double ya, double xb, double yb,
            const std::string& stroke) {
    body += "<line x1=\"" + fmt6(px(xa)) + "\" y1=\"" + fmt6(py(ya)) +
            "\" x2=\"" + fmt6(px(xb)) + "\" y2=\"" + fmt6(py(yb)) +
            "\" stroke=\"" + stroke + "\" stroke-width=\"1\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke) {
    if (pts.empty()) return;
    body += "<polyline fill=\"none\" stroke=\"" + stroke +
            "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts)
      body += fmt6(px(x)) + "," + fmt6(py(y)) + " ";
    body += "\"/>\n";
  }

  std::string finish() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt6(w) +
           "\" height=\"" + fmt6(hgt) + "\" viewBox=\"0 0 " + fmt6(w) + " " +
           fmt6(hgt) + "\">\n" + body + "</svg>\n";
  }
};

}  // namespace detail

// 2-D slice of the diamond spanned by one spatial and one temporal axis, the
// remaining coordinates pinned by base_point. Membership is shaded cell by
// cell; the boundary polyline is found by radial bisection from the slice
// base, accurate to about a thousandth. Degenerate slices (base outside the
// diamond) still produce a valid document with axes.
inline std::string svg_diamond_slice(const FlatDiamond& d, int spatial_axis,
                                     int temporal_axis, const Vec& base_point,
                                     int resolution = 64) {
  require(spatial_axis >= 0 && spatial_axis < d.p,
          "svg_diamond_slice: spatial axis out of range");
  require(temporal_axis >= 0 && temporal_axis < d.q,
          "svg_diamond_slice: temporal axis out of range");
  require(base_point.size() == d.dim(), "svg_diamond_slice: dimension mismatch");
  require(resolution >= 2, "svg_diamond_slice: resolution too small");

  auto at = [&](double u, double v) {
    Vec pt = base_point;
    pt(spatial_axis) = u;
    pt(d.p + temporal_axis) = v;
    return pt;
  };

  detail::SvgCanvas cv{.body = {}, .x0 = -1.3, .y0 = -1.3, .x1 = 1.3, .y1 = 1.3};
  const double cell = 2.6 / resolution;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const double u = -1.3 + (i + 0.5) * cell;
      const double v = -1.3 + (j + 0.5) * cell;
      if (in_flat_diamond(d, at(u, v)))
        cv.rect(-1.3 + i * cell, -1.3 + j * cell, cell, cell, "#cfe0f5");
    }
  }

  cv.line(-1.3, 0, 1.3, 0, "#888888");
  cv.line(0, -1.3, 0, 1.3, "#888888");

  Vec origin = base_point;
  origin(spatial_axis) = 0;
  origin(d.p + temporal_axis) = 0;
  if (in_flat_diamond(d, origin)) {
    std::vector<std::pair<double, double>> poly;
    const int K = 256;
    for (int k = 0; k <= K; ++k) {
      const double th = 2.0 * std::numbers::pi * (k % K) / K;
      double lo = 0.0, hi = 2.0;
      for (int step = 0; step < 24; ++step) {
        const double mid = (lo + hi) / 2.0;
        if (in_flat_diamond(d, at(mid * std::cos(th), mid * std::sin(th))))
          lo = mid;
        else
          hi = mid;
      }
      poly.emplace_back(lo * std::cos(th), lo * std::sin(th));
    }
    cv.polyline(poly, "#1f4e96");
  }
  return cv.finish();
}

// CSV companion of the slice: header then one row per sampled cell center.
inline std::string csv_diamond_slice(const FlatDiamond& d, int spatial_axis,
                                     int temporal_axis, const Vec& base_point,
                                     int resolution = 64) {
  require(spatial_axis >= 0 && spatial_axis < d.p,
          "csv_diamond_slice: spatial axis out of range");
  require(temporal_axis >= 0 && temporal_axis < d.q,
          "csv_diamond_slice: temporal axis out of range");
  require(base_point.size() == d.dim(), "csv_diamond_slice: dimension mismatch");
  require(resolution >= 2, "csv_diamond_slice: resolution too small");
  std::string out = "x_plus,x_minus,member\n";
  const double cell = 2.6 / resolution;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const double u = -1.3 + (i + 0.5) * cell;
      const double v = -1.3 + (j + 0.5) * cell;
      Vec pt = base_point;
      pt(spatial_axis) = u;
      pt(d.p + temporal_axis) = v;
      out += detail::fmt6(u) + "," + detail::fmt6(v) + "," +
             (in_flat_diamond(d, pt) ? "1" : "0") + "\n";
    }
  }
  return out;
}

// Heightfield of a section: q = 2 renders one colored cell per grid cell
// (first value component, blue low to red high); q = 1 renders a polyline.
inline std::string svg_section_heightfield(const GridSection& s) {
  const GridBase& g = *s.base;
  double lo = s.values.col(0).minCoeff();
  double hi = s.values.col(0).maxCoeff();
  if (hi - lo < 1e-12) hi = lo + 1.0;

  auto color = [&](double v) {
    const double t = (v - lo) / (hi - lo);
    const int r = static_cast<int>(40 + 200 * t);
    const int b = static_cast<int>(240 - 200 * t);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x50%02x", r, b);
    return std::string(buf);
  };

  double x0 = g.nodes.front()(0), x1 = x0;
  double y0 = g.q == 2 ? g.nodes.front()(1) : lo, y1 = y0;
  for (const Vec& n : g.nodes) {
    x0 = std::min(x0, n(0));
    x1 = std::max(x1, n(0));
    if (g.q == 2) {
      y0 = std::min(y0, n(1));
      y1 = std::max(y1, n(1));
    }
  }
  if (g.q == 1) {
    y0 = lo;
    y1 = hi;
  }
  const double padx = std::max(1e-9, 0.05 * (x1 - x0));
  const double pady = std::max(1e-9, 0.05 * (y1 - y0));
  detail::SvgCanvas cv{.body = {},
                       .x0 = x0 - padx,
                       .y0 = y0 - pady,
                       .x1 = x1 + padx,
                       .y1 = y1 + pady};

  if (g.q == 2) {
    for (const auto& c : g.cells) {
      const double v = (s.values(c[0], 0) + s.values(c[1], 0) +
                        s.values(c[2], 0) + s.values(c[3], 0)) /
                       4.0;
      cv.rect(g.nodes[c[0]](0), g.nodes[c[0]](1), g.h, g.h, color(v));
    }
  } else {
    std::vector<std::pair<double, double>> poly;
    for (int i = 0; i < g.count(); ++i)
      poly.emplace_back(g.nodes[i](0), s.values(i, 0));
    cv.polyline(poly, "#1f4e96");
  }
  return cv.finish();
}

}  // namespace pqcausal
