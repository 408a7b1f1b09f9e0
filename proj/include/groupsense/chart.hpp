#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace groupsense {

/// Plot area in pixels plus the data range mapped onto it. The vertical
/// padding band keeps the extreme values off the plot border.
struct PlotGeometry {
  double width_px = 400.0;
  double height_px = 300.0;
  double pad_fraction = 0.05;
  double value_min = 0.0;
  double value_max = 100.0;

  double diagonal() const;
  bool operator==(const PlotGeometry&) const = default;
};

struct DataPoint {
  std::string label;
  double value = 0.0;
  bool operator==(const DataPoint&) const = default;
};

/// A named set of labels that must stay contiguous on the x-axis.
struct Category {
  std::string name;
  std::vector<std::string> members;
  bool operator==(const Category&) const = default;
};

/// A dot plot: points in x-slot order, an optional category hierarchy, and
/// the plot geometry they are drawn into.
struct Chart {
  std::vector<DataPoint> points;
  std::optional<std::vector<Category>> hierarchy;
  PlotGeometry plot;

  std::size_t size() const { return points.size(); }
  /// Index of `label` in point order, or -1.
  int index_of(std::string_view label) const;
  std::vector<std::string> labels() const;

  bool operator==(const Chart&) const = default;
};

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const PixelPoint&) const = default;
};

/// Pixel coordinates, one per chart point, in the chart's point order.
/// Screen convention: y grows downward.
struct PixelLayout {
  std::vector<PixelPoint> coords;
};

/// Throws Error(kInvariantViolation) with a field path on the first broken
/// invariant: unique non-empty labels, >= 2 points, finite values inside the
/// plot's value range, sane geometry, and a hierarchy that partitions the
/// points.
void validate(const Chart& chart);

/// Places point i of n at x = width * (i + 0.5) / n and maps values linearly
/// so value_max lands on the top padding line and value_min on the bottom.
PixelLayout layout(const Chart& chart);

/// Uniform values in [0, 100], labels A, B, C, ... Deterministic per seed on
/// every platform.
Chart generate_random_chart(int n = 6, std::uint64_t seed = 0);

/// Spreadsheet-style label for slot i: A..Z, AA, AB, ...
std::string slot_label(int index);

/// Reorders the points to `order`. Values, hierarchy and geometry carry
/// over. Throws kInvalidArgument unless `order` is a bijection on the labels.
Chart apply_permutation(const Chart& chart, std::span<const std::string> order);

/// The chart with its x-order reversed.
Chart mirrored(const Chart& chart);

}  // namespace groupsense
