#pragma once
// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls the engine's geometry, search, or labeling code.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

// Boost 1.74 snaps overlay inputs to an integer grid unless this is set,
// which costs about 1e-8 relative accuracy in intersection areas.
#ifndef BOOST_GEOMETRY_NO_ROBUSTNESS
#define BOOST_GEOMETRY_NO_ROBUSTNESS
#endif
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_point.hpp>

#include "groupsense/chart.hpp"
#include "groupsense/diagnose.hpp"
#include "groupsense/features.hpp"
#include "groupsense/group.hpp"
#include "groupsense/model.hpp"

namespace oracle {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint>;
using BMulti = bg::model::multi_point<BPoint>;
using BMultiPolygon = bg::model::multi_polygon<BPolygon>;

struct Pt {
  double x;
  double y;
};

inline std::vector<Pt> pixels(const groupsense::Chart& c) {
  std::vector<Pt> out;
  const double n = static_cast<double>(c.size());
  const double span = c.plot.value_max - c.plot.value_min;
  const double top = c.plot.height_px * c.plot.pad_fraction;
  const double band = c.plot.height_px - 2.0 * top;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double frac = (c.plot.value_max - c.points[i].value) / span;
    out.push_back({c.plot.width_px * (static_cast<double>(i) + 0.5) / n, top + frac * band});
  }
  return out;
}

// Boost hull; segments become a 1 px wide rectangle along the farthest pair
// and points a 1x1 square. Same degeneracy cut as the engine documents.
inline BPolygon region(const std::vector<Pt>& pts) {
  double diam = 0;
  Pt a = pts[0], b = pts[0];
  for (const auto& p : pts) {
    for (const auto& q : pts) {
      const double d = std::hypot(p.x - q.x, p.y - q.y);
      if (d > diam) {
        diam = d;
        a = p;
        b = q;
      }
    }
  }
  BPolygon poly;
  if (diam == 0) {
    bg::append(poly.outer(), BPoint(a.x - 0.5, a.y - 0.5));
    bg::append(poly.outer(), BPoint(a.x - 0.5, a.y + 0.5));
    bg::append(poly.outer(), BPoint(a.x + 0.5, a.y + 0.5));
    bg::append(poly.outer(), BPoint(a.x + 0.5, a.y - 0.5));
    bg::correct(poly);
    return poly;
  }
  BMulti mp;
  for (const auto& p : pts) bg::append(mp, BPoint(p.x, p.y));
  BPolygon hull;
  bg::convex_hull(mp, hull);
  if (std::abs(bg::area(hull)) > 1e-9 * diam * diam) return hull;
  const double ux = (b.x - a.x) / diam, uy = (b.y - a.y) / diam;
  const double nx = -uy * 0.5, ny = ux * 0.5;
  bg::append(poly.outer(), BPoint(a.x + nx, a.y + ny));
  bg::append(poly.outer(), BPoint(b.x + nx, b.y + ny));
  bg::append(poly.outer(), BPoint(b.x - nx, b.y - ny));
  bg::append(poly.outer(), BPoint(a.x - nx, a.y - ny));
  bg::correct(poly);
  return poly;
}

inline double hull_overlap(const std::vector<Pt>& g, const std::vector<Pt>& r) {
  const BPolygon hg = region(g), hr = region(r);
  BMultiPolygon inter;
  bg::intersection(hg, hr, inter);
  const double ia = std::abs(bg::area(inter));
  if (ia == 0) return 0;
  return ia / (std::abs(bg::area(hg)) + std::abs(bg::area(hr)) - ia);
}

// Closed-form least squares via raw sums; absolute residual sum.
inline std::pair<double, double> fit(const std::vector<Pt>& g) {
  const double n = static_cast<double>(g.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : g) {
    sx += p.x;
    sy += p.y;
    sxx += p.x * p.x;
    sxy += p.x * p.y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double err = 0;
  if (g.size() > 2) {
    for (const auto& p : g) err += std::abs(p.y - (slope * p.x + icpt));
  }
  return {slope, err};
}

inline groupsense::FeatureVector features(const groupsense::Chart& c, const std::vector<int>& members) {
  using groupsense::Feature;
  const auto px = pixels(c);
  std::vector<Pt> g, r;
  for (std::size_t i = 0; i < px.size(); ++i) {
    (std::find(members.begin(), members.end(), static_cast<int>(i)) != members.end() ? g : r).push_back(px[i]);
  }
  groupsense::FeatureVector fv;
  const auto [slope, err] = fit(g);
  fv[Feature::kSlope] = slope;
  fv[Feature::kError] = err;
  double xs = std::numeric_limits<double>::infinity(), ys = xs, md = xs;
  for (const auto& p : g) {
    for (const auto& q : r) {
      xs = std::min(xs, std::abs(p.x - q.x));
      ys = std::min(ys, std::abs(p.y - q.y));
      md = std::min(md, std::hypot(p.x - q.x, p.y - q.y));
    }
  }
  fv[Feature::kXSep] = xs;
  fv[Feature::kYSep] = ys;
  fv[Feature::kCvxOverlap] = hull_overlap(g, r);
  auto centroid = [](const std::vector<Pt>& s) {
    Pt m{0, 0};
    for (const auto& p : s) {
      m.x += p.x / static_cast<double>(s.size());
      m.y += p.y / static_cast<double>(s.size());
    }
    return m;
  };
  const Pt cg = centroid(g), cr = centroid(r);
  fv[Feature::kCentroidDistance] = std::hypot(cg.x - cr.x, cg.y - cr.y) /
                                   std::hypot(c.plot.width_px, c.plot.height_px);
  double diam = 0;
  for (const auto& p : g) diam += std::hypot(p.x - cg.x, p.y - cg.y) / static_cast<double>(g.size());
  fv[Feature::kCentroidDiameter] = diam;
  fv[Feature::kCentroidRatio] = md / diam;
  return fv;
}

// Every subset of sizes 2..n-1 by bitmask scan.
inline std::vector<std::vector<int>> subsets(int n) {
  std::vector<std::vector<int>> out;
  for (unsigned m = 0; m < (1U << n); ++m) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i) {
      if (m & (1U << i)) s.push_back(i);
    }
    if (s.size() >= 2 && static_cast<int>(s.size()) <= n - 1) out.push_back(s);
  }
  return out;
}

inline bool label(const groupsense::FeatureVector& f, std::size_t size) {
  using groupsense::Feature;
  if (f[Feature::kError] <= 4.0 && size >= 3) return true;
  if (f[Feature::kCentroidRatio] >= 3.0 && f[Feature::kCvxOverlap] == 0.0) return true;
  return f[Feature::kYSep] >= 30.0;
}

// All label orders via next_permutation, filtered by category contiguity.
inline std::vector<std::vector<std::string>> valid_orders(const groupsense::Chart& c) {
  std::vector<std::string> labels;
  for (const auto& p : c.points) labels.push_back(p.label);
  std::sort(labels.begin(), labels.end());
  std::vector<std::vector<std::string>> out;
  do {
    bool ok = true;
    if (c.hierarchy) {
      for (const auto& cat : *c.hierarchy) {
        std::vector<std::size_t> pos;
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (std::find(cat.members.begin(), cat.members.end(), labels[i]) != cat.members.end()) pos.push_back(i);
        }
        if (pos.back() - pos.front() + 1 != pos.size()) ok = false;
      }
    }
    if (ok) out.push_back(labels);
  } while (std::next_permutation(labels.begin(), labels.end()));
  return out;
}

inline groupsense::Chart reorder(const groupsense::Chart& c, const std::vector<std::string>& order) {
  groupsense::Chart out = c;
  out.points.clear();
  for (const auto& l : order) {
    for (const auto& p : c.points) {
      if (p.label == l) out.points.push_back(p);
    }
  }
  return out;
}

inline double score(const groupsense::DiagnosisReport& rep, double alpha) {
  double sd = 0;
  double sv = 0;
  for (const auto& d : rep.detected) {
    const bool desired = std::find(rep.desired.begin(), rep.desired.end(), d.group) != rep.desired.end();
    if (desired) {
      sd += d.prob;
    } else {
      sv += 1;
    }
  }
  return alpha * sd - (1 - alpha) * sv;
}

inline double brute_best(const groupsense::Chart& c, const std::vector<groupsense::Group>& desired,
                         const groupsense::GroupingModel& model, double alpha,
                         const groupsense::DiagnoseOptions& opts = {}) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& order : valid_orders(c)) {
    best = std::max(best, score(groupsense::diagnose(reorder(c, order), desired, model, opts), alpha));
  }
  return best;
}

}  // namespace oracle
