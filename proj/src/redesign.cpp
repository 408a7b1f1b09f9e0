#include "groupsense/redesign.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "groupsense/error.hpp"

namespace groupsense {

namespace {

constexpr std::size_t kBatchSize = 256;

// Category index per slot; every point is its own category when the chart
// has no hierarchy.
std::vector<int> category_of_slots(const Chart& chart) {
  std::vector<int> cat(chart.size());
  if (!chart.hierarchy) {
    for (std::size_t i = 0; i < cat.size(); ++i) cat[i] = static_cast<int>(i);
    return cat;
  }
  for (std::size_t c = 0; c < chart.hierarchy->size(); ++c) {
    for (const auto& label : (*chart.hierarchy)[c].members) {
      cat[static_cast<std::size_t>(chart.index_of(label))] = static_cast<int>(c);
    }
  }
  return cat;
}

std::uint64_t saturating_factorial(std::uint64_t n) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (out > std::numeric_limits<std::uint64_t>::max() / i) return std::numeric_limits<std::uint64_t>::max();
    out *= i;
  }
  return out;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

LabelOrder labels_for(const Chart& chart, std::span<const int> slots) {
  LabelOrder out;
  out.reserve(slots.size());
  for (int s : slots) out.push_back(chart.points[static_cast<std::size_t>(s)].label);
  return out;
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]", "/alpha");
}

struct SearchOutput {
  std::vector<PermutationScore> top;
  std::map<std::pair<std::size_t, std::size_t>, LandscapeCell> cells;
  std::uint64_t examined = 0;
};

SearchOutput search(const Chart& chart, std::span<const Group> desired, const GroupingModel& model,
                    const RedesignOptions& options, bool keep_top, bool keep_cells) {
  check_alpha(options.alpha);
  if (keep_top && options.k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1", "/k");
  validate(chart);
  for (std::size_t i = 0; i < desired.size(); ++i) validate_group(chart, desired[i], "/desired/" + std::to_string(i));

  std::uint64_t total = 0;
  std::vector<std::vector<int>> listed;
  if (options.allowed_orders) {
    for (const auto& order : valid_permutations(chart, options.allowed_orders, options.budget)) {
      std::vector<int> slots;
      for (const auto& label : order) slots.push_back(chart.index_of(label));
      listed.push_back(std::move(slots));
    }
    total = listed.size();
  } else {
    total = count_valid_permutations(chart);
    if (total > options.budget) {
      throw Error(ErrorCode::kBudgetExceeded,
                  "search space of " + std::to_string(total) + " orders exceeds the budget of " +
                      std::to_string(options.budget) + "; add hierarchy constraints to shrink it");
    }
  }

  const unsigned threads =
      std::max(1U, options.threads ? options.threads : std::thread::hardware_concurrency());
  SearchOutput out;
  std::vector<std::vector<int>> batch;
  batch.reserve(kBatchSize);

  auto flush = [&] {
    std::vector<PermutationScore> scored(batch.size());
    std::exception_ptr failure;
    std::mutex failure_mu;
    {
      std::vector<std::jthread> workers;
      const unsigned used = std::min<unsigned>(threads, static_cast<unsigned>(batch.size()));
      for (unsigned t = 0; t < used; ++t) {
        workers.emplace_back([&, t] {
          try {
            for (std::size_t i = t; i < batch.size(); i += used) {
              const LabelOrder order = labels_for(chart, batch[i]);
              scored[i] = score_report(order,
                                       diagnose(apply_permutation(chart, order), desired, model, options.diagnose),
                                       options.alpha);
            }
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);

    for (auto& s : scored) {
      if (keep_cells) {
        auto& cell = out.cells[{s.s_v, s.desired_met}];
        cell.violations = s.s_v;
        cell.desired_met = s.desired_met;
        ++cell.count;
        if (cell.exemplars.size() < options.exemplars_per_cell) cell.exemplars.push_back(s.order);
      }
      if (keep_top && (out.top.size() < options.k || ranks_before(s, out.top.back()))) {
        auto pos = std::lower_bound(out.top.begin(), out.top.end(), s, ranks_before);
        out.top.insert(pos, std::move(s));
        if (out.top.size() > options.k) out.top.pop_back();
      }
    }
    out.examined += batch.size();
    batch.clear();
    if (options.progress) options.progress(out.examined, total);
  };

  auto visit = [&](std::span<const int> slots) {
    batch.emplace_back(slots.begin(), slots.end());
    if (batch.size() == kBatchSize) flush();
  };
  if (options.allowed_orders) {
    for (const auto& slots : listed) visit(slots);
  } else {
    for_each_valid_order(chart, visit);
  }
  if (!batch.empty()) flush();
  return out;
}

}  // namespace

bool respects_hierarchy(const Chart& chart, std::span<const std::string> order) {
  if (!chart.hierarchy) return true;
  std::unordered_map<std::string_view, std::size_t> category;
  for (std::size_t c = 0; c < chart.hierarchy->size(); ++c) {
    for (const auto& label : (*chart.hierarchy)[c].members) category[label] = c;
  }
  std::set<std::size_t> closed;
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto it = category.find(order[i]);
    if (it == category.end()) return false;
    if (i > 0 && category.at(order[i - 1]) != it->second) {
      if (closed.contains(it->second)) return false;
      closed.insert(category.at(order[i - 1]));
    }
  }
  return true;
}

std::uint64_t count_valid_permutations(const Chart& chart) {
  if (!chart.hierarchy) return saturating_factorial(chart.size());
  std::uint64_t out = saturating_factorial(chart.hierarchy->size());
  for (const auto& cat : *chart.hierarchy) out = saturating_mul(out, saturating_factorial(cat.members.size()));
  return out;
}

void for_each_valid_order(const Chart& chart, const std::function<void(std::span<const int>)>& visit) {
  validate(chart);
  const std::vector<int> cat = category_of_slots(chart);
  const std::size_t n = chart.size();
  std::vector<int> remaining(n, 0);
  std::vector<int> category_size(n, 0);
  for (int c : cat) {
    ++remaining[static_cast<std::size_t>(c)];
    ++category_size[static_cast<std::size_t>(c)];
  }
  std::vector<bool> used(n, false);
  std::vector<int> order;
  order.reserve(n);

  // Choosing the smallest admissible slot first yields lexicographic order.
  auto dfs = [&](auto&& self, int open) -> void {
    if (order.size() == n) {
      visit(order);
      return;
    }
    for (std::size_t s = 0; s < n; ++s) {
      if (used[s]) continue;
      const int c = cat[s];
      const auto cu = static_cast<std::size_t>(c);
      if (open >= 0 ? c != open : remaining[cu] != category_size[cu]) continue;
      used[s] = true;
      --remaining[cu];
      order.push_back(static_cast<int>(s));
      self(self, remaining[cu] > 0 ? c : -1);
      order.pop_back();
      ++remaining[cu];
      used[s] = false;
    }
  };
  dfs(dfs, -1);
}

std::vector<LabelOrder> valid_permutations(const Chart& chart,
                                           const std::optional<std::vector<LabelOrder>>& allowed,
                                           std::uint64_t budget) {
  validate(chart);
  std::vector<LabelOrder> out;
  if (allowed) {
    std::set<std::vector<int>> slots;
    for (std::size_t i = 0; i < allowed->size(); ++i) {
      const auto& order = (*allowed)[i];
      // Rejects non-bijections with a path.
      (void)apply_permutation(chart, order);
      if (!respects_hierarchy(chart, order)) continue;
      std::vector<int> idx;
      for (const auto& label : order) idx.push_back(chart.index_of(label));
      slots.insert(std::move(idx));
    }
    if (slots.size() > budget)
      throw Error(ErrorCode::kBudgetExceeded, "allow-list exceeds the permutation budget");
    for (const auto& s : slots) out.push_back(labels_for(chart, s));
    return out;
  }
  const std::uint64_t total = count_valid_permutations(chart);
  if (total > budget) {
    throw Error(ErrorCode::kBudgetExceeded,
                std::to_string(total) + " valid orders exceed the budget of " + std::to_string(budget) +
                    "; add hierarchy constraints to shrink the search");
  }
  out.reserve(static_cast<std::size_t>(total));
  for_each_valid_order(chart, [&](std::span<const int> slots) { out.push_back(labels_for(chart, slots)); });
  return out;
}

PermutationScore score_permutation(const Chart& chart, std::span<const std::string> order,
                                   std::span<const Group> desired, const GroupingModel& model,
                                   double alpha, const DiagnoseOptions& options) {
  check_alpha(alpha);
  const Chart permuted = apply_permutation(chart, order);
  return score_report(LabelOrder(order.begin(), order.end()), diagnose(permuted, desired, model, options),
                      alpha);
}

PermutationScore score_report(LabelOrder order, DiagnosisReport report, double alpha) {
  check_alpha(alpha);
  PermutationScore out;
  out.order = std::move(order);
  for (const auto& d : report.detected) {
    if (d.violation) {
      ++out.s_v;
    } else {
      out.s_d += d.prob;
      ++out.desired_met;
    }
  }
  out.s = alpha * out.s_d - (1.0 - alpha) * static_cast<double>(out.s_v);
  out.report = std::move(report);
  return out;
}

bool ranks_before(const PermutationScore& a, const PermutationScore& b) {
  if (a.s != b.s) return a.s > b.s;
  if (a.s_v != b.s_v) return a.s_v < b.s_v;
  if (a.desired_met != b.desired_met) return a.desired_met > b.desired_met;
  return a.order < b.order;
}

RedesignResult redesign(const Chart& chart, std::span<const Group> desired,
                        const GroupingModel& model, const RedesignOptions& options) {
  SearchOutput found = search(chart, desired, model, options, true, options.include_landscape);
  RedesignResult out;
  out.top = std::move(found.top);
  out.examined = found.examined;
  if (options.include_landscape) {
    LandscapeMatrix m;
    m.total = found.examined;
    for (auto& [key, cell] : found.cells) m.cells.push_back(std::move(cell));
    out.landscape = std::move(m);
  }
  return out;
}

LandscapeMatrix landscape(const Chart& chart, std::span<const Group> desired,
                          const GroupingModel& model, const RedesignOptions& options) {
  SearchOutput found = search(chart, desired, model, options, false, true);
  LandscapeMatrix m;
  m.total = found.examined;
  for (auto& [key, cell] : found.cells) m.cells.push_back(std::move(cell));
  return m;
}

}  // namespace groupsense
