// Acceptance run: one PASS/FAIL line per criterion. Tolerances and budgets
// are fixed here, not taken from the command line.

#include <chrono>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "groupsense/dataset.hpp"
#include "groupsense/default_model.hpp"
#include "groupsense/diagnose.hpp"
#include "groupsense/evaluation.hpp"
#include "groupsense/redesign.hpp"
#include "groupsense/shap.hpp"
#include "groupsense/training.hpp"
#include "oracle.hpp"

using namespace groupsense;

namespace {

constexpr double kFeatureTol = 1e-9;
constexpr double kFeatureBudgetS = 10.0;
constexpr double kRedesignBudgetS = 60.0;
constexpr double kShapTol = 1e-9;
constexpr double kShapBudgetS = 1.0;
constexpr double kMinF1 = 0.95;
constexpr double kVifTarget = 1.0 / (1.0 - 0.64);
constexpr double kVifTol = 1e-6;
constexpr double kVifThreshold = 5.0;

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Group group_of_slots(const Chart& c, const std::vector<int>& s) {
  std::vector<std::string> labels;
  for (int i : s) labels.push_back(c.points[static_cast<std::size_t>(i)].label);
  return Group(labels);
}

std::vector<Group> seeded_desired(const Chart& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto all = oracle::subsets(static_cast<int>(c.size()));
  std::set<Group> out;
  const std::size_t n = rng() % 3;
  while (out.size() < n) out.insert(group_of_slots(c, all[rng() % all.size()]));
  return {out.begin(), out.end()};
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void feature_oracle() {
  double worst = 0;
  double engine_s = 0;
  std::size_t compared = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Chart c = generate_random_chart(6, seed);
    const auto subsets = oracle::subsets(6);
    std::vector<FeatureVector> ours;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& s : subsets) ours.push_back(feature_vector(c, group_of_slots(c, s)));
    engine_s += seconds_since(t0);
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      const FeatureVector ref = oracle::features(c, subsets[i]);
      for (Feature f : kAllFeatures) worst = std::max(worst, std::abs(ours[i][f] - ref[f]));
      ++compared;
    }
  }
  report("feature-oracle", worst <= kFeatureTol && engine_s < kFeatureBudgetS && compared == 200 * 56,
         fmt("%zu groups, max abs diff %.3g (tol %.0e), engine %.3f s (budget %.0f s)", compared, worst,
             kFeatureTol, engine_s, kFeatureBudgetS));
}

void candidate_counts() {
  const auto six = enumerate_candidates(generate_random_chart(6, 1)).size();
  const auto three = enumerate_candidates(generate_random_chart(3, 1)).size();
  report("candidate-count", six == 56 && three == 3, fmt("n=6: %zu, n=3: %zu", six, three));
}

void permutation_counts() {
  const GroupingModel& m = default_model();
  const Chart plain = generate_random_chart(6, 5);
  Chart h = plain;
  h.hierarchy = std::vector<Category>{{"x", {"A", "B"}}, {"y", {"C", "D"}}, {"z", {"E", "F"}}};
  const auto p = valid_permutations(plain);
  const auto q = valid_permutations(h);
  const auto ref = oracle::valid_orders(h);
  const bool same = std::set<LabelOrder>(q.begin(), q.end()) == std::set<LabelOrder>(ref.begin(), ref.end());
  const std::vector<Group> desired = {Group{"A", "B"}};
  auto cell_sum = [](const LandscapeMatrix& l) {
    std::uint64_t s = 0;
    for (const auto& c : l.cells) s += c.count;
    return s;
  };
  const auto lp = cell_sum(landscape(plain, desired, m));
  const auto lh = cell_sum(landscape(h, desired, m));
  report("permutation-count", p.size() == 720 && q.size() == 48 && same && lp == 720 && lh == 48,
         fmt("plain %zu, 3x2 hierarchy %zu (filter oracle %zu, same set %s), landscape sums %llu / %llu", p.size(),
             q.size(), ref.size(), same ? "yes" : "no", static_cast<unsigned long long>(lp),
             static_cast<unsigned long long>(lh)));
}

void redesign_optimality() {
  const GroupingModel& m = default_model();
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t matched = 0;
  double worst = 0;
  for (std::uint64_t f = 0; f < 25; ++f) {
    const Chart c = generate_random_chart(6, 4000 + f);
    const auto desired = seeded_desired(c, f);
    RedesignOptions o;
    o.k = 1;
    o.alpha = 0.5;
    const double ours = redesign(c, desired, m, o).top.at(0).s;
    const double brute = oracle::brute_best(c, desired, m, o.alpha);
    worst = std::max(worst, std::abs(ours - brute));
    if (std::abs(ours - brute) <= 1e-12) ++matched;
  }
  const double elapsed = seconds_since(t0);
  report("redesign-optimality", matched == 25 && elapsed < kRedesignBudgetS,
         fmt("%zu/25 fixtures match brute force (max diff %.3g), %.2f s incl. brute force (budget %.0f s)", matched,
             worst, elapsed, kRedesignBudgetS));
}

void mirror_symmetry() {
  const GroupingModel& m = default_model();
  std::size_t diag_ok = 0, multiset_ok = 0;
  const bool slope_free = !m.features_read().contains(Feature::kSlope);
  for (std::uint64_t f = 0; f < 25; ++f) {
    const Chart c = generate_random_chart(6, 4000 + f);
    const auto desired = seeded_desired(c, f);
    const auto a = diagnose(c, desired, m);
    const auto b = diagnose(mirrored(c), desired, m);
    bool same = a.detected.size() == b.detected.size() && a.missed_desired == b.missed_desired;
    for (std::size_t i = 0; same && i < a.detected.size(); ++i) {
      same = a.detected[i].group == b.detected[i].group && std::abs(a.detected[i].prob - b.detected[i].prob) <= 1e-12;
    }
    diag_ok += same ? 1 : 0;

    std::multiset<double> fwd, rev;
    for (const auto& order : valid_permutations(c)) {
      const LabelOrder back(order.rbegin(), order.rend());
      fwd.insert(score_permutation(c, order, desired, m, 0.5).s);
      rev.insert(score_permutation(c, back, desired, m, 0.5).s);
    }
    multiset_ok += fwd == rev ? 1 : 0;
  }
  report("mirror-symmetry", slope_free && diag_ok == 25 && multiset_ok == 25,
         fmt("model slope-free: %s, diagnosis equal %zu/25, score multiset equal %zu/25", slope_free ? "yes" : "no",
             diag_ok, multiset_ok));
}

void colinear_pruning() {
  Chart c;
  const double v[] = {20, 30, 40, 50, 95, 5};
  for (int i = 0; i < 6; ++i) c.points.push_back({slot_label(i), v[i]});
  std::vector<TreeNode> nodes(3);
  nodes[0] = {false, Feature::kError, 4.5, 1, 2, 0.5, 0};
  nodes[1] = {true, Feature::kSlope, 0, -1, -1, 0.95, 0};
  nodes[2] = {true, Feature::kSlope, 0, -1, -1, 0.05, 0};
  const GroupingModel detects_lines(DecisionTree(nodes), FeatureSet::all());
  const auto r = diagnose(c, {}, detects_lines);
  std::size_t offending = 0;
  for (const auto& a : r.detected) {
    for (const auto& b : r.detected) {
      if (!a.colinear || !b.colinear || a.group.size() >= b.group.size()) continue;
      if (std::includes(b.group.members().begin(), b.group.members().end(), a.group.members().begin(),
                        a.group.members().end()))
        ++offending;
    }
  }
  const bool line_kept = std::any_of(r.detected.begin(), r.detected.end(),
                                     [](const auto& d) { return d.group == Group{"A", "B", "C", "D"}; });
  report("colinear-pruning", offending == 0 && line_kept,
         fmt("4-point line reported: %s, strict co-linear subsets left: %zu, detected %zu", line_kept ? "yes" : "no",
             offending, r.detected.size()));
}

void training_pipeline() {
  const auto ex = oracle_examples(5000, 1);
  const DatasetSplit s = split_dataset(ex, 1);
  TreeTrainOptions o;
  o.max_depth = 3;
  const DecisionTree tree = train_decision_tree(s.train, o);
  const GroupingModel m(tree, o.policy);
  const EvalReport test = evaluate(m, s.test);
  const EvalReport hold = evaluate(m, s.holdout);
  report("training-pipeline", hold.f1 >= kMinF1 && tree.depth() <= 3,
         fmt("split %zu/%zu/%zu, depth %d, holdout P %.3f R %.3f F1 %.3f (min %.2f), test F1 %.3f", s.train.size(),
             s.test.size(), s.holdout.size(), tree.depth(), hold.precision, hold.recall, hold.f1, kMinF1, test.f1));
}

void shap_properties() {
  const GroupingModel& m = default_model();
  const auto ex = oracle_examples(3000, 9);
  std::vector<FeatureVector> bg;
  for (std::size_t i = 0; i < 50; ++i) bg.push_back(ex[i * 59].features);
  // Background closed under swapping x_sep and y_sep for the symmetry check.
  std::vector<FeatureVector> sym_bg = bg;
  for (const auto& b : bg) {
    FeatureVector w = b;
    std::swap(w.values[index_of(Feature::kXSep)], w.values[index_of(Feature::kYSep)]);
    sym_bg.push_back(w);
  }
  const ScoreFunction sym = [&](const FeatureVector& x) {
    FeatureVector w = x;
    std::swap(w.values[index_of(Feature::kXSep)], w.values[index_of(Feature::kYSep)]);
    return m.predict(x, 3, 6) + m.predict(w, 3, 6);
  };
  double eff = 0, dummy = 0, symgap = 0, slowest = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto& e = ex[100 + i * 23];
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = shap_exact(m, e.features, e.group_size(), e.chart_size, bg);
    slowest = std::max(slowest, seconds_since(t0));
    eff = std::max(eff, std::abs(s.base_value + std::accumulate(s.phi.begin(), s.phi.end(), 0.0) - s.prediction));
    for (Feature f : kAllFeatures) {
      if (!m.features_read().contains(f)) dummy = std::max(dummy, std::abs(s[f]));
    }
    FeatureVector x = e.features;
    x[Feature::kYSep] = x[Feature::kXSep];
    const auto t = shap_exact(sym, x, sym_bg);
    symgap = std::max(symgap, std::abs(t[Feature::kXSep] - t[Feature::kYSep]));
  }
  report("shap-properties", eff <= kShapTol && dummy <= kShapTol && symgap <= kShapTol && slowest < kShapBudgetS,
         fmt("100 instances: efficiency %.2g, dummy %.2g, symmetry %.2g (tol %.0e), slowest %.4f s (budget %.0f s)",
             eff, dummy, symgap, kShapTol, slowest, kShapBudgetS));
}

void vif_behaviour() {
  std::size_t dup_dropped = 0;
  double worst = 0;
  bool kept = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    const std::size_t n = 400;
    std::vector<double> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = z(rng);
      b[i] = z(rng);
      c[i] = z(rng);
    }
    // Centre, orthonormalize b against a, then mix to an exact r = 0.8.
    auto centre = [](std::vector<double>& v) {
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      for (double& x : v) x -= mean;
    };
    auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
      return std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
    };
    centre(a);
    centre(b);
    const double na = std::sqrt(dot(a, a));
    for (double& x : a) x /= na;
    const double p = dot(a, b);
    for (std::size_t i = 0; i < n; ++i) b[i] -= p * a[i];
    const double nb = std::sqrt(dot(b, b));
    for (double& x : b) x /= nb;

    std::vector<LabeledExample> ex(n);
    for (std::size_t i = 0; i < n; ++i) {
      ex[i].features[Feature::kXSep] = a[i];
      ex[i].features[Feature::kYSep] = 0.8 * a[i] + 0.6 * b[i];
      ex[i].features[Feature::kError] = c[i];
      ex[i].features[Feature::kCentroidRatio] = c[i];
      ex[i].features[Feature::kCentroidDistance] = b[i];
    }
    const auto dup = prune_by_vif(ex, FeatureSet{Feature::kError, Feature::kCentroidRatio, Feature::kCentroidDistance},
                                  kVifThreshold);
    if (dup.dropped.size() == 1 &&
        (dup.dropped[0] == Feature::kError || dup.dropped[0] == Feature::kCentroidRatio))
      ++dup_dropped;
    const auto pair = prune_by_vif(ex, FeatureSet{Feature::kXSep, Feature::kYSep}, kVifThreshold);
    kept = kept && pair.dropped.empty() && pair.retained.size() == 2;
    for (double v : pair.retained_vif) worst = std::max(worst, std::abs(v - kVifTarget));
  }
  report("vif-behaviour", dup_dropped == 20 && kept && worst <= kVifTol,
         fmt("duplicate dropped %zu/20, r=0.8 pair kept: %s, max |VIF - %.4f| = %.2g", dup_dropped,
             kept ? "yes" : "no", kVifTarget, worst));
}

void negative_soundness() {
  std::mt19937_64 rng(2024);
  ChartsById charts;
  SelectionsByChart sel;
  const auto all = oracle::subsets(6);
  for (int i = 0; i < 200; ++i) {
    const std::string id = "c" + std::to_string(i);
    charts[id] = generate_random_chart(6, static_cast<std::uint64_t>(10000 + i));
    const int picks = static_cast<int>(rng() % 5);
    for (int k = 0; k < picks; ++k) sel[id].push_back(group_of_slots(charts[id], all[rng() % all.size()]));
  }
  std::map<std::string, double> mean;
  double gsum = 0;
  std::size_t gcount = 0;
  auto slots = [](const Chart& c, const Group& g) {
    std::vector<int> out;
    for (const auto& l : g.members()) out.push_back(c.index_of(l));
    std::sort(out.begin(), out.end());
    return out;
  };
  for (const auto& [id, groups] : sel) {
    const std::set<Group> distinct(groups.begin(), groups.end());
    if (distinct.empty()) continue;
    double s = 0;
    for (const auto& g : distinct) s += oracle::features(charts[id], slots(charts[id], g))[Feature::kError];
    mean[id] = s / static_cast<double>(distinct.size());
    gsum += s;
    gcount += distinct.size();
  }
  const auto neg = synthesize_negatives(charts, sel);
  std::size_t bad = 0;
  for (const auto& e : neg) {
    const Chart& c = charts.at(e.chart_id);
    const auto f = oracle::features(c, slots(c, e.group));
    const double threshold = mean.contains(e.chart_id) ? mean[e.chart_id] : gsum / static_cast<double>(gcount);
    const auto& chosen = sel[e.chart_id];
    const bool unselected = std::find(chosen.begin(), chosen.end(), e.group) == chosen.end();
    if (!unselected || !(f[Feature::kError] > threshold) || f[Feature::kCvxOverlap] != 0.0 || e.label) ++bad;
  }
  report("negative-soundness", bad == 0 && !neg.empty(),
         fmt("%zu negatives from 200 charts, %zu fail independent re-check", neg.size(), bad));
}

}  // namespace

int main() {
  feature_oracle();
  candidate_counts();
  permutation_counts();
  redesign_optimality();
  mirror_symmetry();
  colinear_pruning();
  training_pipeline();
  shap_properties();
  vif_behaviour();
  negative_soundness();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
