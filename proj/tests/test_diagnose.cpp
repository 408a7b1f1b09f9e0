#include <algorithm>
#include <set>

#include "doctest.h"
#include "groupsense/default_model.hpp"
#include "groupsense/diagnose.hpp"
#include "groupsense/error.hpp"
#include "oracle.hpp"

using namespace groupsense;

namespace {

Chart chart_of(std::initializer_list<double> values) {
  Chart c;
  int i = 0;
  for (double v : values) c.points.push_back({slot_label(i++), v});
  return c;
}

// 0.95 when error < split, else 0.05.
GroupingModel error_model(double split = 4.5) {
  std::vector<TreeNode> nodes(3);
  nodes[0] = {false, Feature::kError, split, 1, 2, 0.5, 0};
  nodes[1] = {true, Feature::kSlope, 0, -1, -1, 0.95, 0};
  nodes[2] = {true, Feature::kSlope, 0, -1, -1, 0.05, 0};
  return GroupingModel(DecisionTree(nodes), FeatureSet::all());
}

GroupingModel constant_model(double p) {
  return GroupingModel(DecisionTree::constant(p), FeatureSet::all());
}

bool strict_subset(const Group& a, const Group& b) {
  if (a.size() >= b.size()) return false;
  return std::includes(b.members().begin(), b.members().end(), a.members().begin(), a.members().end());
}

struct RefDetection {
  Group group;
  double prob;
  bool colinear;
};

// Independent diagnose: oracle features, threshold, pairwise pruning.
std::vector<RefDetection> reference(const Chart& c, const GroupingModel& m, const DiagnoseOptions& o) {
  std::vector<RefDetection> kept;
  for (const auto& s : oracle::subsets(static_cast<int>(c.size()))) {
    const auto f = oracle::features(c, s);
    const double p = m.predict(f, s.size(), c.size());
    if (p < o.threshold) continue;
    std::vector<std::string> labels;
    for (int i : s) labels.push_back(c.points[static_cast<std::size_t>(i)].label);
    kept.push_back({Group(labels), p, f[Feature::kError] <= o.epsilon_line});
  }
  std::vector<RefDetection> out;
  for (const auto& a : kept) {
    const bool pruned = a.colinear && std::any_of(kept.begin(), kept.end(), [&](const RefDetection& b) {
                          return b.colinear && strict_subset(a.group, b.group);
                        });
    if (!pruned) out.push_back(a);
  }
  return out;
}

}  // namespace

TEST_CASE("candidates cover sizes 2 to n-1") {
  CHECK(enumerate_candidates(generate_random_chart(6, 1)).size() == 56);
  CHECK(enumerate_candidates(generate_random_chart(3, 1)).size() == 3);
  CHECK(enumerate_candidates(generate_random_chart(8, 1)).size() == 246);
  const auto c = enumerate_candidates(generate_random_chart(5, 1));
  CHECK(std::set<Group>(c.begin(), c.end()).size() == c.size());
  for (const auto& g : c) {
    CHECK(g.size() >= 2);
    CHECK(g.size() <= 4);
  }
  CHECK_THROWS_AS(enumerate_candidates(chart_of({1, 2})), Error);
}

TEST_CASE("co-linearity is a closed error threshold") {
  FeatureVector f;
  CHECK(is_colinear(f));
  f[Feature::kError] = 4.0;
  CHECK(is_colinear(f));
  CHECK(is_colinear(f, 4.0));
  f[Feature::kError] = 4.0000001;
  CHECK_FALSE(is_colinear(f));
  f[Feature::kError] = 50;
  CHECK_FALSE(is_colinear(f));
  CHECK(is_colinear(f, 60));
}

TEST_CASE("sub-lines of a detected line are pruned") {
  const Chart c = chart_of({20, 30, 40, 50, 95, 5});
  const DiagnosisReport r = diagnose(c, {}, error_model());
  auto has = [&](const Group& g) {
    return std::any_of(r.detected.begin(), r.detected.end(), [&](const auto& d) { return d.group == g; });
  };
  CHECK(has(Group{"A", "B", "C", "D"}));
  CHECK_FALSE(has(Group{"A", "B", "C"}));
  CHECK_FALSE(has(Group{"B", "C", "D"}));
  CHECK_FALSE(has(Group{"A", "D"}));
  CHECK_FALSE(has(Group{"B", "C"}));
  for (const auto& a : r.detected) {
    for (const auto& b : r.detected) {
      if (a.colinear && b.colinear) CHECK_FALSE(strict_subset(a.group, b.group));
    }
  }
}

TEST_CASE("pruning never removes a non co-linear group") {
  // A constant model detects everything; only co-linear groups may vanish.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Chart c = generate_random_chart(6, seed);
    const DiagnosisReport r = diagnose(c, {}, constant_model(0.95));
    const DiagnoseOptions o;
    for (const auto& s : oracle::subsets(6)) {
      const auto f = oracle::features(c, s);
      if (f[Feature::kError] <= o.epsilon_line) continue;
      std::vector<std::string> labels;
      for (int i : s) labels.push_back(c.points[static_cast<std::size_t>(i)].label);
      const Group g(labels);
      CHECK(std::any_of(r.detected.begin(), r.detected.end(), [&](const auto& d) { return d.group == g; }));
    }
  }
}

TEST_CASE("violations and missed desired groups") {
  const Chart c = chart_of({20, 30, 40, 50, 95, 5});
  const DiagnosisReport none = diagnose(c, {}, error_model());
  CHECK(!none.detected.empty());
  for (const auto& d : none.detected) CHECK(d.violation);

  std::vector<Group> desired;
  for (const auto& d : none.detected) desired.push_back(d.group);
  const DiagnosisReport exact = diagnose(c, desired, error_model());
  for (const auto& d : exact.detected) CHECK_FALSE(d.violation);
  CHECK(exact.missed_desired.empty());

  const std::vector<Group> two = {Group{"A", "B", "C", "D"}, Group{"E", "F"}};
  DiagnoseOptions strict;
  strict.threshold = 1.0;
  const DiagnosisReport empty = diagnose(c, two, error_model(), strict);
  CHECK(empty.detected.empty());
  CHECK(empty.missed_desired == two);

  // A pruned desired group is missed.
  const std::vector<Group> sub = {Group{"A", "B", "C"}};
  CHECK(diagnose(c, sub, error_model()).missed_desired == sub);
}

TEST_CASE("desired groups are validated") {
  const Chart c = chart_of({20, 30, 40, 50, 95, 5});
  const std::vector<Group> dup = {Group{"A", "B"}, Group{"B", "A"}};
  CHECK_THROWS_AS(diagnose(c, dup, error_model()), Error);
  const std::vector<Group> unknown = {Group{"A", "Q"}};
  CHECK_THROWS_AS(diagnose(c, unknown, error_model()), Error);
  const std::vector<Group> everything = {Group{"A", "B", "C", "D", "E", "F"}};
  CHECK_THROWS_AS(diagnose(c, everything, error_model()), Error);
}

TEST_CASE("diagnose agrees with an independent re-implementation") {
  const GroupingModel& m = default_model();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Chart c = generate_random_chart(6, 500 + seed);
    for (double threshold : {0.5, 0.9}) {
      DiagnoseOptions o;
      o.threshold = threshold;
      const std::vector<Group> desired = {Group{"A", "B"}, Group{"C", "D", "E"}};
      const DiagnosisReport r = diagnose(c, desired, m, o);
      const auto ref = reference(c, m, o);
      REQUIRE(r.detected.size() == ref.size());
      for (const auto& want : ref) {
        const auto it = std::find_if(r.detected.begin(), r.detected.end(), [&](const auto& d) { return d.group == want.group; });
        REQUIRE(it != r.detected.end());
        CHECK(it->prob == doctest::Approx(want.prob));
        CHECK(it->prob >= threshold);
        CHECK(it->colinear == want.colinear);
        CHECK(it->violation == (std::find(desired.begin(), desired.end(), want.group) == desired.end()));
      }
      // detected and missed_desired cover the desired set exactly once.
      for (const auto& g : desired) {
        const auto hits = std::count_if(r.detected.begin(), r.detected.end(), [&](const auto& d) { return d.group == g; }) +
                          std::count(r.missed_desired.begin(), r.missed_desired.end(), g);
        CHECK(hits == 1);
      }
      // Sorted by size, then descending probability.
      for (std::size_t i = 1; i < r.detected.size(); ++i) {
        const auto& a = r.detected[i - 1];
        const auto& b = r.detected[i];
        CHECK((a.group.size() < b.group.size() || (a.group.size() == b.group.size() && a.prob >= b.prob)));
      }
    }
  }
}

TEST_CASE("a chart and its mirror diagnose identically under a slope-free model") {
  const GroupingModel& m = default_model();
  REQUIRE_FALSE(m.features_read().contains(Feature::kSlope));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Chart c = generate_random_chart(6, seed);
    const DiagnosisReport a = diagnose(c, {}, m);
    const DiagnosisReport b = diagnose(mirrored(c), {}, m);
    REQUIRE(a.detected.size() == b.detected.size());
    for (std::size_t i = 0; i < a.detected.size(); ++i) {
      CHECK(a.detected[i].group == b.detected[i].group);
      CHECK(a.detected[i].prob == doctest::Approx(b.detected[i].prob).epsilon(1e-12));
    }
  }
}
