#include "groupsense/diagnose.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "groupsense/error.hpp"

namespace groupsense {

std::vector<Group> enumerate_candidates(const Chart& chart) {
  if (chart.size() < 3)
    throw Error(ErrorCode::kInvalidArgument, "candidate enumeration needs at least 3 points");
  std::vector<Group> out;
  for (GroupMask mask : candidate_masks(chart.size())) out.push_back(group_of(chart, mask));
  return out;
}

bool is_colinear(const FeatureVector& features, double epsilon_line) {
  return features[Feature::kError] <= epsilon_line;
}

DiagnosisReport diagnose(const Chart& chart, std::span<const Group> desired,
                         const GroupingModel& model, const DiagnoseOptions& options,
                         std::string chart_id) {
  if (!(options.threshold >= 0.0 && options.threshold <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "threshold must lie in [0, 1]", "/threshold");
  const PixelLayout px = layout(chart);
  const std::size_t n = chart.size();

  std::set<GroupMask> desired_masks;
  for (std::size_t i = 0; i < desired.size(); ++i) {
    const std::string path = "/desired/" + std::to_string(i);
    validate_group(chart, desired[i], path);
    if (!desired_masks.insert(mask_of(chart, desired[i])).second)
      throw Error(ErrorCode::kInvariantViolation, "duplicate desired group", path);
  }

  struct Scored {
    GroupMask mask;
    double prob;
    bool colinear;
  };
  std::vector<Scored> kept;
  for (GroupMask mask : candidate_masks(n)) {
    const FeatureVector fv = feature_vector(px, mask, chart.plot);
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    const double prob = model.predict(fv, size, n);
    if (prob >= options.threshold) kept.push_back({mask, prob, is_colinear(fv, options.epsilon_line)});
  }

  DiagnosisReport report;
  report.chart_id = std::move(chart_id);
  report.desired.assign(desired.begin(), desired.end());
  report.threshold = options.threshold;
  report.epsilon_line = options.epsilon_line;
  report.model_version = model.model_id();

  std::set<GroupMask> detected_masks;
  for (const auto& s : kept) {
    if (s.colinear) {
      const bool dominated = std::any_of(kept.begin(), kept.end(), [&](const Scored& o) {
        return o.colinear && o.mask != s.mask && (s.mask & o.mask) == s.mask;
      });
      if (dominated) continue;
    }
    detected_masks.insert(s.mask);
    report.detected.push_back(
        {group_of(chart, s.mask), s.prob, !desired_masks.contains(s.mask), s.colinear});
  }
  std::sort(report.detected.begin(), report.detected.end(),
            [](const DetectedGroup& a, const DetectedGroup& b) {
              if (a.group.size() != b.group.size()) return a.group.size() < b.group.size();
              if (a.prob != b.prob) return a.prob > b.prob;
              return a.group < b.group;
            });

  for (const Group& g : desired) {
    if (!detected_masks.contains(mask_of(chart, g))) report.missed_desired.push_back(g);
  }
  return report;
}

}  // namespace groupsense
