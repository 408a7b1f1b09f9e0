#pragma once

#include <span>
#include <string>
#include <vector>

#include "groupsense/chart.hpp"
#include "groupsense/features.hpp"
#include "groupsense/group.hpp"
#include "groupsense/model.hpp"

namespace groupsense {

struct DiagnoseOptions {
  /// Minimum predicted probability for a candidate to count as perceived.
  double threshold = 0.9;
  /// Line-fit error (px) at or below which a group is co-linear.
  double epsilon_line = 4.0;
};

struct DetectedGroup {
  Group group;
  double prob = 0.0;
  bool violation = false;
  bool colinear = false;

  bool operator==(const DetectedGroup&) const = default;
};

struct DiagnosisReport {
  std::string chart_id;
  std::vector<Group> desired;
  /// Sorted by size, then descending probability, then members.
  std::vector<DetectedGroup> detected;
  /// Desired groups that were not detected (or were pruned).
  std::vector<Group> missed_desired;
  double threshold = 0.9;
  double epsilon_line = 4.0;
  std::string model_version;
};

/// All groups of sizes 2 .. n-1 in canonical order. Throws kInvalidArgument
/// for n < 3.
std::vector<Group> enumerate_candidates(const Chart& chart);

/// error <= epsilon_line.
bool is_colinear(const FeatureVector& features, double epsilon_line = 4.0);

/// Predicts every candidate group, keeps those at or above the threshold,
/// prunes co-linear groups that are strict subsets of another detected
/// co-linear group, and flags everything outside `desired` as a violation.
/// Desired groups must be valid for the chart and distinct.
DiagnosisReport diagnose(const Chart& chart, std::span<const Group> desired,
                         const GroupingModel& model, const DiagnoseOptions& options = {},
                         std::string chart_id = {});

}  // namespace groupsense
