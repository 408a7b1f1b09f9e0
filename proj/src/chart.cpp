#include "groupsense/chart.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "groupsense/error.hpp"

namespace groupsense {

double PlotGeometry::diagonal() const { return std::hypot(width_px, height_px); }

int Chart::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> Chart::labels() const {
  std::vector<std::string> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.label);
  return out;
}

namespace {

[[noreturn]] void invariant(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kInvariantViolation, msg, path);
}

void validate_plot(const PlotGeometry& plot) {
  if (!(plot.width_px > 0.0) || !std::isfinite(plot.width_px))
    invariant("/plot/width_px", "width_px must be positive");
  if (!(plot.height_px > 0.0) || !std::isfinite(plot.height_px))
    invariant("/plot/height_px", "height_px must be positive");
  if (!(plot.pad_fraction >= 0.0 && plot.pad_fraction < 0.5))
    invariant("/plot/pad_fraction", "pad_fraction must lie in [0, 0.5)");
  if (!std::isfinite(plot.value_min) || !std::isfinite(plot.value_max))
    invariant("/plot/value_min", "value range must be finite");
  if (!(plot.value_min < plot.value_max))
    invariant("/plot/value_max", "degenerate scale: value_min must be below value_max");
}

}  // namespace

void validate(const Chart& chart) {
  validate_plot(chart.plot);
  if (chart.points.size() < 2) invariant("/points", "a chart needs at least 2 points");

  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < chart.points.size(); ++i) {
    const auto& p = chart.points[i];
    const std::string path = "/points/" + std::to_string(i);
    if (p.label.empty()) invariant(path + "/label", "labels must be non-empty");
    if (!seen.insert(p.label).second)
      invariant(path + "/label", "duplicate label '" + p.label + "'");
    if (!std::isfinite(p.value)) invariant(path + "/value", "value must be finite");
    if (p.value < chart.plot.value_min || p.value > chart.plot.value_max)
      invariant(path + "/value", "value outside [value_min, value_max]");
  }

  if (!chart.hierarchy) return;
  std::unordered_set<std::string> covered;
  const auto& cats = *chart.hierarchy;
  for (std::size_t c = 0; c < cats.size(); ++c) {
    const std::string path = "/hierarchy/" + std::to_string(c);
    if (cats[c].members.empty()) invariant(path + "/members", "empty category");
    for (std::size_t m = 0; m < cats[c].members.size(); ++m) {
      const auto& label = cats[c].members[m];
      const std::string mpath = path + "/members/" + std::to_string(m);
      if (!seen.contains(label)) invariant(mpath, "unknown label '" + label + "'");
      if (!covered.insert(label).second)
        invariant(mpath, "label '" + label + "' appears in more than one category");
    }
  }
  if (covered.size() != chart.points.size())
    invariant("/hierarchy", "hierarchy must cover every point");
}

PixelLayout layout(const Chart& chart) {
  validate(chart);
  const auto& plot = chart.plot;
  const double n = static_cast<double>(chart.points.size());
  const double top = plot.height_px * plot.pad_fraction;
  const double band = plot.height_px * (1.0 - 2.0 * plot.pad_fraction);
  const double span = plot.value_max - plot.value_min;

  PixelLayout out;
  out.coords.reserve(chart.points.size());
  for (std::size_t i = 0; i < chart.points.size(); ++i) {
    const double x = plot.width_px * (static_cast<double>(i) + 0.5) / n;
    const double y = top + (plot.value_max - chart.points[i].value) / span * band;
    out.coords.push_back({x, y});
  }
  return out;
}

std::string slot_label(int index) {
  std::string out;
  for (int i = index + 1; i > 0; i = (i - 1) / 26) {
    out.insert(out.begin(), static_cast<char>('A' + (i - 1) % 26));
  }
  return out;
}

Chart generate_random_chart(int n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "generate_random_chart: n must be >= 2");
  // mt19937_64's output sequence is fixed by the standard; the 53-bit
  // mantissa mapping below avoids the implementation-defined distributions.
  std::mt19937_64 rng(seed);
  Chart chart;
  chart.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    chart.points.push_back({slot_label(i), 100.0 * unit});
  }
  return chart;
}

Chart apply_permutation(const Chart& chart, std::span<const std::string> order) {
  if (order.size() != chart.points.size())
    throw Error(ErrorCode::kInvalidArgument, "order length differs from chart size", "/order");
  std::unordered_map<std::string_view, std::size_t> where;
  for (std::size_t i = 0; i < chart.points.size(); ++i) where.emplace(chart.points[i].label, i);

  std::vector<bool> used(chart.points.size(), false);
  Chart out = chart;
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto it = where.find(order[i]);
    if (it == where.end())
      throw Error(ErrorCode::kInvalidArgument, "unknown label '" + order[i] + "' in order",
                  "/order/" + std::to_string(i));
    if (used[it->second])
      throw Error(ErrorCode::kInvalidArgument, "label '" + order[i] + "' repeated in order",
                  "/order/" + std::to_string(i));
    used[it->second] = true;
    out.points[i] = chart.points[it->second];
  }
  return out;
}

Chart mirrored(const Chart& chart) {
  Chart out = chart;
  std::reverse(out.points.begin(), out.points.end());
  return out;
}

}  // namespace groupsense
