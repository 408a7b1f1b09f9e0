#include "groupsense/group.hpp"

#include <algorithm>
#include <bit>

#include "groupsense/error.hpp"

namespace groupsense {

Group::Group(std::vector<std::string> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool Group::contains(const std::string& label) const {
  return std::binary_search(members_.begin(), members_.end(), label);
}

bool Group::is_strict_subset_of(const Group& other) const {
  return size() < other.size() &&
         std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                       members_.end());
}

void validate_group(const Chart& chart, const Group& group, const std::string& path) {
  const std::size_t n = chart.size();
  if (group.size() < 2 || group.size() + 1 > n) {
    throw Error(ErrorCode::kInvariantViolation,
                "group size " + std::to_string(group.size()) + " outside [2, " +
                    std::to_string(n > 0 ? n - 1 : 0) + "]",
                path);
  }
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (chart.index_of(group.members()[i]) < 0) {
      throw Error(ErrorCode::kInvariantViolation,
                  "unknown label '" + group.members()[i] + "'", path + "/" + std::to_string(i));
    }
  }
}

GroupMask mask_of(const Chart& chart, const Group& group) {
  if (chart.size() > kMaxMaskPoints)
    throw Error(ErrorCode::kBudgetExceeded, "chart too large for group masks");
  GroupMask mask = 0;
  for (const auto& label : group.members()) {
    const int idx = chart.index_of(label);
    if (idx < 0) throw Error(ErrorCode::kInvariantViolation, "unknown label '" + label + "'");
    mask |= GroupMask{1} << idx;
  }
  return mask;
}

Group group_of(const Chart& chart, GroupMask mask) {
  std::vector<std::string> members;
  members.reserve(static_cast<std::size_t>(std::popcount(mask)));
  for (std::size_t i = 0; i < chart.size() && i < kMaxMaskPoints; ++i) {
    if (mask & (GroupMask{1} << i)) members.push_back(chart.points[i].label);
  }
  return Group(std::move(members));
}

std::vector<GroupMask> candidate_masks(std::size_t n) {
  if (n > kMaxCandidatePoints)
    throw Error(ErrorCode::kBudgetExceeded,
                "too many points to enumerate candidate groups (" + std::to_string(n) + ")");
  std::vector<GroupMask> out;
  for (std::size_t size = 2; size + 1 <= n; ++size) {
    // Selector with `size` leading ones walks combinations in lexicographic
    // order of their slot indices.
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
    do {
      GroupMask mask = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (pick[i]) mask |= GroupMask{1} << i;
      }
      out.push_back(mask);
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return out;
}

}  // namespace groupsense
