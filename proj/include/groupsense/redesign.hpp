#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "groupsense/chart.hpp"
#include "groupsense/diagnose.hpp"
#include "groupsense/group.hpp"
#include "groupsense/model.hpp"

namespace groupsense {

/// 10!: the largest search the engine runs without hierarchy constraints.
inline constexpr std::uint64_t kDefaultPermutationBudget = 3628800;

using LabelOrder = std::vector<std::string>;

/// True iff each hierarchy category occupies a contiguous run of slots.
/// Charts without hierarchy accept every order.
bool respects_hierarchy(const Chart& chart, std::span<const std::string> order);

/// Number of hierarchy-valid orders: n! without hierarchy, otherwise
/// (#categories)! * prod(|category|!). Saturates at UINT64_MAX.
std::uint64_t count_valid_permutations(const Chart& chart);

/// Visits the hierarchy-valid orders as slot-index sequences (indices into
/// the chart's current point order) in lexicographic order.
void for_each_valid_order(const Chart& chart, const std::function<void(std::span<const int>)>& visit);

/// Hierarchy-valid orders in lexicographic order of the chart's slot
/// indices. With `allowed`, only those orders (deduplicated, and still
/// subject to the hierarchy). Throws kBudgetExceeded above `budget`.
std::vector<LabelOrder> valid_permutations(const Chart& chart,
                                           const std::optional<std::vector<LabelOrder>>& allowed = std::nullopt,
                                           std::uint64_t budget = kDefaultPermutationBudget);

struct PermutationScore {
  LabelOrder order;
  double s = 0.0;    // alpha * s_d - (1 - alpha) * s_v
  double s_d = 0.0;  // summed probability of detected desired groups
  std::size_t s_v = 0;  // number of violations
  std::size_t desired_met = 0;
  DiagnosisReport report;
};

/// Scores an existing diagnosis: s_d sums the probabilities of detected
/// desired groups, s_v counts violations.
PermutationScore score_report(LabelOrder order, DiagnosisReport report, double alpha);

/// Applies `order`, diagnoses, and scores. Throws kInvalidArgument for alpha
/// outside [0, 1] or an order that is not a permutation of the labels.
PermutationScore score_permutation(const Chart& chart, std::span<const std::string> order,
                                   std::span<const Group> desired, const GroupingModel& model,
                                   double alpha, const DiagnoseOptions& options = {});

/// Ranking used for top-k: higher s, then fewer violations, then more desired
/// groups met, then lexicographically smaller label order.
bool ranks_before(const PermutationScore& a, const PermutationScore& b);

struct LandscapeCell {
  std::size_t violations = 0;
  std::size_t desired_met = 0;
  std::uint64_t count = 0;
  std::vector<LabelOrder> exemplars;  // first few in enumeration order
};

/// Distribution of valid permutations over (violations, desired_met).
struct LandscapeMatrix {
  std::vector<LandscapeCell> cells;  // sorted by (violations, desired_met)
  std::uint64_t total = 0;
};

struct RedesignOptions {
  double alpha = 0.5;
  std::size_t k = 5;
  DiagnoseOptions diagnose;
  std::uint64_t budget = kDefaultPermutationBudget;
  /// Caller-supplied allow-list of orders, intersected with the hierarchy.
  std::optional<std::vector<LabelOrder>> allowed_orders;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
  bool include_landscape = false;
  std::size_t exemplars_per_cell = 3;
  /// Called after each scored batch with (examined, total).
  std::function<void(std::uint64_t, std::uint64_t)> progress;
};

struct RedesignResult {
  std::vector<PermutationScore> top;  // best first
  std::uint64_t examined = 0;
  std::optional<LandscapeMatrix> landscape;
};

/// Exhaustively scores every valid permutation and returns the k best.
/// Throws kBudgetExceeded when the number of valid orders exceeds the budget.
RedesignResult redesign(const Chart& chart, std::span<const Group> desired,
                        const GroupingModel& model, const RedesignOptions& options = {});

/// The full (violations, desired_met) distribution over valid permutations.
LandscapeMatrix landscape(const Chart& chart, std::span<const Group> desired,
                          const GroupingModel& model, const RedesignOptions& options = {});

}  // namespace groupsense
