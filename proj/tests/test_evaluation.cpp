#include <cmath>
#include <random>

#include "doctest.h"
#include "groupsense/error.hpp"
#include "groupsense/evaluation.hpp"

using namespace groupsense;

namespace {

struct Confusion {
  double tp = 0, fp = 0, fn = 0, tn = 0;
};

Confusion count(const std::vector<std::uint8_t>& pred, const std::vector<std::uint8_t>& actual) {
  Confusion c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] && actual[i]) c.tp += 1;
    if (pred[i] && !actual[i]) c.fp += 1;
    if (!pred[i] && actual[i]) c.fn += 1;
    if (!pred[i] && !actual[i]) c.tn += 1;
  }
  return c;
}

LabeledExample with(Feature f, double v, bool label) {
  LabeledExample e;
  e.group = Group{"A", "B", "C"};
  e.chart_size = 6;
  e.features[f] = v;
  e.label = label;
  return e;
}

}  // namespace

TEST_CASE("an all-positive predictor on a balanced set") {
  const std::vector<std::uint8_t> pred(10, 1);
  std::vector<std::uint8_t> actual(10, 0);
  for (int i = 0; i < 5; ++i) actual[static_cast<std::size_t>(i)] = 1;
  const EvalReport r = report_from_predictions(pred, actual);
  CHECK(r.precision == doctest::Approx(0.5));
  CHECK(r.recall == doctest::Approx(1.0));
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(r.support == 10);
}

TEST_CASE("perfect and empty predictors") {
  const std::vector<std::uint8_t> actual = {1, 0, 1, 0, 0};
  const EvalReport perfect = report_from_predictions(actual, actual);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  const std::vector<std::uint8_t> none(5, 0);
  const EvalReport empty = report_from_predictions(none, actual);
  CHECK(empty.no_positive_predictions);
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);

  const std::vector<std::uint8_t> shorter = {1};
  CHECK_THROWS_AS(report_from_predictions(shorter, actual), Error);
}

TEST_CASE("metrics match a naive confusion count on random labels") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> pred(50), actual(50);
    for (std::size_t i = 0; i < 50; ++i) {
      pred[i] = static_cast<std::uint8_t>(rng() % 2);
      actual[i] = static_cast<std::uint8_t>(rng() % 3 == 0);
    }
    const Confusion c = count(pred, actual);
    const EvalReport r = report_from_predictions(pred, actual);
    CHECK(r.true_positives == static_cast<std::size_t>(c.tp));
    CHECK(r.false_positives == static_cast<std::size_t>(c.fp));
    CHECK(r.false_negatives == static_cast<std::size_t>(c.fn));
    CHECK(r.true_negatives == static_cast<std::size_t>(c.tn));
    const double p = c.tp + c.fp > 0 ? c.tp / (c.tp + c.fp) : 0.0;
    const double rec = c.tp + c.fn > 0 ? c.tp / (c.tp + c.fn) : 0.0;
    const double f1 = p + rec > 0 ? 2 * p * rec / (p + rec) : 0.0;
    CHECK(r.precision == doctest::Approx(p).epsilon(1e-12));
    CHECK(r.recall == doctest::Approx(rec).epsilon(1e-12));
    CHECK(r.f1 == doctest::Approx(f1).epsilon(1e-12));
    CHECK(r.precision >= 0.0);
    CHECK(r.precision <= 1.0);
    CHECK(r.f1 <= std::max(r.precision, r.recall) + 1e-12);
  }
}

TEST_CASE("evaluate thresholds the model at one half") {
  std::vector<TreeNode> nodes(3);
  nodes[0] = {false, Feature::kError, 5.0, 1, 2, 0.5, 0};
  nodes[1] = {true, Feature::kSlope, 0, -1, -1, 0.95, 0};
  nodes[2] = {true, Feature::kSlope, 0, -1, -1, 0.05, 0};
  const GroupingModel m(DecisionTree(nodes), FeatureSet::all());
  const std::vector<LabeledExample> ex = {with(Feature::kError, 2, true), with(Feature::kError, 9, false),
                                          with(Feature::kError, 1, false), with(Feature::kError, 7, true)};
  const EvalReport r = evaluate(m, ex);
  CHECK(r.true_positives == 1);
  CHECK(r.false_positives == 1);
  CHECK(r.false_negatives == 1);
  CHECK(r.true_negatives == 1);
}

TEST_CASE("cross-validation summarizes per-fold metrics") {
  const auto ex = oracle_examples(1000, 13);
  ModelSpec spec;
  spec.policy = slope_free_features();
  const EvalReport r = cross_validate(spec, ex, 5, 2);
  REQUIRE(r.fold_stats.has_value());
  CHECK(r.fold_stats->folds == 5);
  CHECK(r.support == ex.size());
  CHECK(r.f1 > 0.85);
  CHECK(r.fold_stats->f1.mean > 0.85);
  CHECK(r.fold_stats->f1.sd >= 0.0);
  CHECK(r.fold_stats->f1.sd < 0.1);
  CHECK(cross_validate(spec, ex, 5, 2).f1 == r.f1);
  CHECK_THROWS_AS(cross_validate(spec, ex, 1, 0), Error);
}

TEST_CASE("correlation matrix of constructed columns") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<LabeledExample> ex;
  for (int i = 0; i < 20000; ++i) {
    LabeledExample e;
    e.group = Group{"A", "B"};
    e.chart_size = 6;
    const double a = z(rng);
    e.features[Feature::kError] = a;
    e.features[Feature::kXSep] = -2 * a + 1;
    e.features[Feature::kYSep] = z(rng);
    ex.push_back(e);
  }
  const CorrelationMatrix m = correlation_matrix(ex);
  const auto i = [](Feature f) { return index_of(f); };
  CHECK(*m[i(Feature::kError)][i(Feature::kError)] == doctest::Approx(1.0));
  CHECK(*m[i(Feature::kError)][i(Feature::kXSep)] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(std::abs(*m[i(Feature::kError)][i(Feature::kYSep)]) < 0.05);
  CHECK_FALSE(m[i(Feature::kSlope)][i(Feature::kError)].has_value());
  for (std::size_t a = 0; a < kNumFeatures; ++a) {
    for (std::size_t b = 0; b < kNumFeatures; ++b) CHECK(m[a][b].has_value() == m[b][a].has_value());
  }
}

TEST_CASE("single-feature and cascade studies run on oracle data") {
  const auto ex = oracle_examples(3000, 17);
  const EvalReport ysep = single_feature_study(ex, FeatureSet{Feature::kYSep});
  const EvalReport err = single_feature_study(ex, FeatureSet{Feature::kError});
  CHECK(ysep.support == 600);
  CHECK(ysep.f1 > 0.0);
  CHECK(err.f1 > 0.0);
  const EvalReport all = single_feature_study(ex, slope_free_features());
  CHECK(all.f1 >= std::max(ysep.f1, err.f1) - 0.02);

  const CascadeStudy cs = cascade_study(ex);
  CHECK(cs.cluster_stage.support == 600);
  CHECK(cs.colinear_stage.support == cs.first_stage_test_errors);
  CHECK(cs.first_stage_train_errors > 0);
}
