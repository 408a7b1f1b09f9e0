#include "groupsense/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "groupsense/error.hpp"

namespace groupsense {

namespace {

constexpr std::array<std::string_view, kNumFeatures> kNames = {
    "slope",     "error",          "x_sep",        "y_sep", "cvx_overlap",
    "centroid_distance", "centroid_diameter", "centroid_ratio",
};

// Relative area below which a hull is treated as a segment.
constexpr double kDegenerateAreaRel = 1e-9;

double cross(const PixelPoint& o, const PixelPoint& a, const PixelPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist(const PixelPoint& a, const PixelPoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

PixelPoint centroid(std::span<const PixelPoint> pts) {
  PixelPoint c;
  for (const auto& p : pts) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(pts.size());
  c.y /= static_cast<double>(pts.size());
  return c;
}

std::vector<PixelPoint> rectangle_along(const PixelPoint& a, const PixelPoint& b) {
  const double len = dist(a, b);
  const double nx = -(b.y - a.y) / len * 0.5;
  const double ny = (b.x - a.x) / len * 0.5;
  std::vector<PixelPoint> rect = {
      {a.x - nx, a.y - ny}, {b.x - nx, b.y - ny}, {b.x + nx, b.y + ny}, {a.x + nx, a.y + ny}};
  if (polygon_area(rect) < 0) std::reverse(rect.begin(), rect.end());
  return rect;
}

}  // namespace

std::string_view feature_name(Feature f) { return kNames[index_of(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (kNames[i] == name) return static_cast<Feature>(i);
  }
  return std::nullopt;
}

std::vector<Feature> FeatureSet::list() const {
  std::vector<Feature> out;
  for (Feature f : kAllFeatures) {
    if (contains(f)) out.push_back(f);
  }
  return out;
}

FeatureSet cluster_feature_set() {
  return {Feature::kXSep,           Feature::kYSep,
          Feature::kCvxOverlap,     Feature::kCentroidDistance,
          Feature::kCentroidDiameter, Feature::kCentroidRatio};
}

FeatureSet colinear_feature_set() { return {Feature::kSlope, Feature::kError}; }

LinearFit linear_fit(std::span<const PixelPoint> pts) {
  if (pts.size() < 2) throw Error(ErrorCode::kInvalidArgument, "linear_fit needs >= 2 points");
  const PixelPoint c = centroid(pts);
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& p : pts) {
    sxx += (p.x - c.x) * (p.x - c.x);
    sxy += (p.x - c.x) * (p.y - c.y);
  }
  if (sxx == 0.0) throw Error(ErrorCode::kInvalidArgument, "linear_fit: all x coordinates equal");

  LinearFit fit;
  fit.slope = sxy / sxx;
  if (pts.size() == 2) return fit;
  for (const auto& p : pts) {
    fit.error += std::abs(p.y - (c.y + fit.slope * (p.x - c.x)));
  }
  return fit;
}

ClusterFeatures cluster_features(std::span<const PixelPoint> g, std::span<const PixelPoint> r,
                                 const PlotGeometry& plot) {
  if (g.empty() || r.empty())
    throw Error(ErrorCode::kInvalidArgument, "cluster_features needs non-empty g and r");
  ClusterFeatures out;
  const PixelPoint cg = centroid(g);
  const PixelPoint cr = centroid(r);
  out.centroid_distance = dist(cg, cr) / plot.diagonal();

  for (const auto& p : g) out.centroid_diameter += dist(p, cg);
  out.centroid_diameter /= static_cast<double>(g.size());

  double min_d = std::numeric_limits<double>::infinity();
  out.x_sep = std::numeric_limits<double>::infinity();
  out.y_sep = std::numeric_limits<double>::infinity();
  for (const auto& p : g) {
    for (const auto& q : r) {
      min_d = std::min(min_d, dist(p, q));
      out.x_sep = std::min(out.x_sep, std::abs(p.x - q.x));
      out.y_sep = std::min(out.y_sep, std::abs(p.y - q.y));
    }
  }
  out.centroid_ratio = out.centroid_diameter > 0.0
                           ? min_d / out.centroid_diameter
                           : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<PixelPoint> convex_hull(std::span<const PixelPoint> pts) {
  std::vector<PixelPoint> p(pts.begin(), pts.end());
  std::sort(p.begin(), p.end(), [](const PixelPoint& a, const PixelPoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;

  // Andrew's monotone chain.
  std::vector<PixelPoint> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], p[i - 1]) <= 0) --k;
    hull[k++] = p[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(std::span<const PixelPoint> poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

std::vector<PixelPoint> hull_region(std::span<const PixelPoint> pts) {
  if (pts.empty()) return {};
  double diam = 0.0;
  PixelPoint far_a = pts[0];
  PixelPoint far_b = pts[0];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = dist(pts[i], pts[j]);
      if (d > diam) {
        diam = d;
        far_a = pts[i];
        far_b = pts[j];
      }
    }
  }
  if (diam == 0.0) {
    const auto& c = pts[0];
    return {{c.x - 0.5, c.y - 0.5}, {c.x + 0.5, c.y - 0.5}, {c.x + 0.5, c.y + 0.5},
            {c.x - 0.5, c.y + 0.5}};
  }
  auto hull = convex_hull(pts);
  if (hull.size() >= 3 && polygon_area(hull) > kDegenerateAreaRel * diam * diam) return hull;
  return rectangle_along(far_a, far_b);
}

std::vector<PixelPoint> clip_convex(std::span<const PixelPoint> subject,
                                    std::span<const PixelPoint> clip) {
  // Sutherland-Hodgman: clip the subject against each edge's inner half-plane.
  std::vector<PixelPoint> out(subject.begin(), subject.end());
  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const auto& a = clip[e];
    const auto& b = clip[(e + 1) % clip.size()];
    std::vector<PixelPoint> in = std::move(out);
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const auto& cur = in[i];
      const auto& prev = in[(i + in.size() - 1) % in.size()];
      const double dc = cross(a, b, cur);
      const double dp = cross(a, b, prev);
      if (dc >= 0) {
        if (dp < 0) {
          const double t = dp / (dp - dc);
          out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
        }
        out.push_back(cur);
      } else if (dp >= 0) {
        const double t = dp / (dp - dc);
        out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
      }
    }
  }
  return out;
}

double convex_hull_overlap(std::span<const PixelPoint> g, std::span<const PixelPoint> r) {
  const auto hg = hull_region(g);
  const auto hr = hull_region(r);
  if (hg.empty() || hr.empty()) return 0.0;
  const auto inter = clip_convex(hg, hr);
  const double ia = inter.size() >= 3 ? std::max(0.0, polygon_area(inter)) : 0.0;
  if (ia == 0.0) return 0.0;
  const double ua = polygon_area(hg) + polygon_area(hr) - ia;
  return std::clamp(ia / ua, 0.0, 1.0);
}

FeatureVector feature_vector(const PixelLayout& layout, GroupMask mask, const PlotGeometry& plot) {
  std::vector<PixelPoint> g;
  std::vector<PixelPoint> r;
  for (std::size_t i = 0; i < layout.coords.size(); ++i) {
    ((mask >> i) & 1U ? g : r).push_back(layout.coords[i]);
  }
  if (g.size() < 2 || r.empty())
    throw Error(ErrorCode::kInvalidArgument, "feature_vector: group must have >= 2 members and a non-empty complement");

  const LinearFit fit = linear_fit(g);
  const ClusterFeatures cl = cluster_features(g, r, plot);

  FeatureVector fv;
  fv[Feature::kSlope] = fit.slope;
  fv[Feature::kError] = fit.error;
  fv[Feature::kXSep] = cl.x_sep;
  fv[Feature::kYSep] = cl.y_sep;
  fv[Feature::kCvxOverlap] = convex_hull_overlap(g, r);
  fv[Feature::kCentroidDistance] = cl.centroid_distance;
  fv[Feature::kCentroidDiameter] = cl.centroid_diameter;
  fv[Feature::kCentroidRatio] = cl.centroid_ratio;
  return fv;
}

FeatureVector feature_vector(const Chart& chart, const Group& group) {
  validate_group(chart, group);
  return feature_vector(layout(chart), mask_of(chart, group), chart.plot);
}

}  // namespace groupsense
