#pragma once

#include <array>
#include <bitset>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "groupsense/chart.hpp"
#include "groupsense/group.hpp"

namespace groupsense {

/// Geometric features of a candidate group g against the rest r, in the
/// canonical (CSV column) order.
enum class Feature : int {
  kSlope = 0,
  kError,
  kXSep,
  kYSep,
  kCvxOverlap,
  kCentroidDistance,
  kCentroidDiameter,
  kCentroidRatio,
};

inline constexpr std::size_t kNumFeatures = 8;

inline constexpr std::array<Feature, kNumFeatures> kAllFeatures = {
    Feature::kSlope,     Feature::kError,           Feature::kXSep,
    Feature::kYSep,      Feature::kCvxOverlap,      Feature::kCentroidDistance,
    Feature::kCentroidDiameter, Feature::kCentroidRatio,
};

std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);

inline constexpr std::size_t index_of(Feature f) { return static_cast<std::size_t>(f); }

/// Set of features a model may read.
class FeatureSet {
 public:
  FeatureSet() = default;
  FeatureSet(std::initializer_list<Feature> features) {
    for (Feature f : features) bits_.set(index_of(f));
  }
  static FeatureSet all() { return FeatureSet(std::bitset<kNumFeatures>().set()); }

  bool contains(Feature f) const { return bits_.test(index_of(f)); }
  void insert(Feature f) { bits_.set(index_of(f)); }
  void erase(Feature f) { bits_.reset(index_of(f)); }
  bool empty() const { return bits_.none(); }
  std::size_t size() const { return bits_.count(); }
  bool is_subset_of(const FeatureSet& other) const { return (bits_ & ~other.bits_).none(); }
  /// Members in canonical order.
  std::vector<Feature> list() const;

  bool operator==(const FeatureSet&) const = default;

 private:
  explicit FeatureSet(std::bitset<kNumFeatures> bits) : bits_(bits) {}
  std::bitset<kNumFeatures> bits_;
};

/// Features describing cluster separation.
FeatureSet cluster_feature_set();
/// Features describing co-linearity.
FeatureSet colinear_feature_set();

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double operator[](Feature f) const { return values[index_of(f)]; }
  double& operator[](Feature f) { return values[index_of(f)]; }
  bool operator==(const FeatureVector&) const = default;
};

struct LinearFit {
  double slope = 0.0;
  /// Sum of absolute residuals, in pixels.
  double error = 0.0;
};

/// Ordinary least squares y = a + slope * x. The reported error is the sum of
/// absolute residuals; exactly 0 for two points. Throws kInvalidArgument for
/// fewer than two points or when all x coincide.
LinearFit linear_fit(std::span<const PixelPoint> pts);

struct ClusterFeatures {
  double centroid_distance = 0.0;  // centroid gap / plot diagonal
  double centroid_diameter = 0.0;  // mean distance of g to its centroid
  double centroid_ratio = 0.0;     // min g-r distance / centroid_diameter
  double x_sep = 0.0;
  double y_sep = 0.0;
};

ClusterFeatures cluster_features(std::span<const PixelPoint> g, std::span<const PixelPoint> r,
                                 const PlotGeometry& plot);

/// Intersection-over-union of the convex hulls of g and r.
double convex_hull_overlap(std::span<const PixelPoint> g, std::span<const PixelPoint> r);

// Geometry helpers, exposed for tests.

/// Hull vertices with positive signed area, collinear vertices dropped.
std::vector<PixelPoint> convex_hull(std::span<const PixelPoint> pts);
/// Hull as a region with positive area. A hull collapsing to a segment
/// becomes a 1 px wide rectangle along the segment; a single location
/// becomes a 1x1 px square.
std::vector<PixelPoint> hull_region(std::span<const PixelPoint> pts);
double polygon_area(std::span<const PixelPoint> poly);
/// Intersection of two convex polygons with positive signed area.
std::vector<PixelPoint> clip_convex(std::span<const PixelPoint> subject,
                                    std::span<const PixelPoint> clip);

/// Assembles all features for the points selected by `mask` within `layout`.
FeatureVector feature_vector(const PixelLayout& layout, GroupMask mask, const PlotGeometry& plot);

/// Lays out the chart and computes the features of `group` against its
/// complement.
FeatureVector feature_vector(const Chart& chart, const Group& group);

}  // namespace groupsense
