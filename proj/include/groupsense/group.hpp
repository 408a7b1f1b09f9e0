#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "groupsense/chart.hpp"

namespace groupsense {

/// A candidate group: a set of point labels, kept sorted and unique so that
/// equality does not depend on how the group was spelled or on x-order.
class Group {
 public:
  Group() = default;
  explicit Group(std::vector<std::string> members);
  Group(std::initializer_list<std::string> members)
      : Group(std::vector<std::string>(members)) {}

  const std::vector<std::string>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(const std::string& label) const;
  bool is_strict_subset_of(const Group& other) const;

  auto operator<=>(const Group&) const = default;

 private:
  std::vector<std::string> members_;
};

/// Bit i set <=> chart point i (in current x-order) is a member.
using GroupMask = std::uint64_t;

/// Charts larger than this cannot be enumerated into masks.
inline constexpr std::size_t kMaxMaskPoints = 64;

/// Throws Error(kInvariantViolation) unless 2 <= |group| <= n - 1 and every
/// member is a chart label.
void validate_group(const Chart& chart, const Group& group, const std::string& path = "/group");

GroupMask mask_of(const Chart& chart, const Group& group);
Group group_of(const Chart& chart, GroupMask mask);

/// All subsets of sizes 2 .. n-1 of an n-point chart, ordered by size and
/// then lexicographically by member slot. Throws kBudgetExceeded above
/// kMaxCandidatePoints.
std::vector<GroupMask> candidate_masks(std::size_t n);

inline constexpr std::size_t kMaxCandidatePoints = 20;

}  // namespace groupsense
