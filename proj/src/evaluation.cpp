#include "groupsense/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "groupsense/error.hpp"

namespace groupsense {

namespace {

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<std::uint8_t> predictions(const GroupingModel& model,
                                      std::span<const LabeledExample> examples) {
  std::vector<std::uint8_t> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    out.push_back(model.predict(ex.features, ex.group_size(), ex.chart_size) >= 0.5 ? 1 : 0);
  }
  return out;
}

std::vector<std::uint8_t> labels(std::span<const LabeledExample> examples) {
  std::vector<std::uint8_t> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(ex.label ? 1 : 0);
  return out;
}

}  // namespace

EvalReport report_from_predictions(std::span<const std::uint8_t> predicted,
                                   std::span<const std::uint8_t> actual) {
  if (predicted.size() != actual.size())
    throw Error(ErrorCode::kInvalidArgument, "prediction and label counts differ");
  if (predicted.empty()) throw Error(ErrorCode::kInvalidArgument, "no examples to evaluate");
  EvalReport r;
  r.support = predicted.size();
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] != 0;
    const bool a = actual[i] != 0;
    if (p && a) ++r.true_positives;
    else if (p) ++r.false_positives;
    else if (a) ++r.false_negatives;
    else ++r.true_negatives;
  }
  const auto tp = static_cast<double>(r.true_positives);
  const std::size_t predicted_pos = r.true_positives + r.false_positives;
  const std::size_t actual_pos = r.true_positives + r.false_negatives;
  r.no_positive_predictions = predicted_pos == 0;
  r.precision = predicted_pos == 0 ? 0.0 : tp / static_cast<double>(predicted_pos);
  r.recall = actual_pos == 0 ? 0.0 : tp / static_cast<double>(actual_pos);
  r.f1 = (r.precision > 0.0 && r.recall > 0.0)
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

EvalReport evaluate(const GroupingModel& model, std::span<const LabeledExample> examples) {
  const auto pred = predictions(model, examples);
  const auto act = labels(examples);
  return report_from_predictions(pred, act);
}

EvalReport cross_validate(const ModelSpec& spec, std::span<const LabeledExample> examples,
                          std::size_t k, std::uint64_t seed) {
  const auto fold = stratified_folds(examples, k, seed);
  std::vector<std::uint8_t> pooled(examples.size(), 0);
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> test;
    std::vector<std::size_t> test_index;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (fold[i] == f) {
        test.push_back(examples[i]);
        test_index.push_back(i);
      } else {
        train.push_back(examples[i]);
      }
    }
    const GroupingModel model = fit_model(spec, train);
    const auto pred = predictions(model, test);
    for (std::size_t j = 0; j < pred.size(); ++j) pooled[test_index[j]] = pred[j];
    const auto rep = report_from_predictions(pred, labels(test));
    precision.push_back(rep.precision);
    recall.push_back(rep.recall);
    f1.push_back(rep.f1);
  }
  EvalReport out = report_from_predictions(pooled, labels(examples));
  out.fold_stats = FoldStats{k, summarize(precision), summarize(recall), summarize(f1)};
  return out;
}

EvalReport single_feature_study(std::span<const LabeledExample> examples, const FeatureSet& features,
                                std::uint64_t seed, int max_depth) {
  const DatasetSplit split = split_dataset(examples, seed);
  const GroupingModel model(train_decision_tree(split.train, {max_depth, features}), features);
  return evaluate(model, split.test);
}

CascadeStudy cascade_study(std::span<const LabeledExample> examples, std::uint64_t seed,
                           int max_depth) {
  const DatasetSplit split = split_dataset(examples, seed);
  FeatureSet cluster = cluster_feature_set();
  FeatureSet colinear = colinear_feature_set();

  const DecisionTree first = train_decision_tree(split.train, {max_depth, cluster});
  auto wrong = [&](const LabeledExample& ex) { return (first.predict(ex.features) >= 0.5) != ex.label; };

  CascadeStudy out;
  out.cluster_stage = evaluate(GroupingModel(first, cluster), split.test);

  std::vector<LabeledExample> train_errors;
  std::vector<LabeledExample> test_errors;
  std::copy_if(split.train.begin(), split.train.end(), std::back_inserter(train_errors), wrong);
  std::copy_if(split.test.begin(), split.test.end(), std::back_inserter(test_errors), wrong);
  out.first_stage_train_errors = train_errors.size();
  out.first_stage_test_errors = test_errors.size();
  if (train_errors.empty() || test_errors.empty()) return out;

  const GroupingModel second(train_decision_tree(train_errors, {max_depth, colinear}), colinear);
  out.colinear_stage = evaluate(second, test_errors);
  return out;
}

CorrelationMatrix correlation_matrix(std::span<const LabeledExample> examples) {
  if (examples.size() < 2) throw Error(ErrorCode::kInvalidArgument, "correlation needs >= 2 examples");
  const double n = static_cast<double>(examples.size());
  std::array<double, kNumFeatures> mean{};
  for (const auto& ex : examples) {
    for (std::size_t i = 0; i < kNumFeatures; ++i) mean[i] += ex.features.values[i];
  }
  for (auto& m : mean) m /= n;

  std::array<std::array<double, kNumFeatures>, kNumFeatures> cov{};
  for (const auto& ex : examples) {
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      const double di = ex.features.values[i] - mean[i];
      for (std::size_t j = i; j < kNumFeatures; ++j) cov[i][j] += di * (ex.features.values[j] - mean[j]);
    }
  }

  CorrelationMatrix out;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    for (std::size_t j = i; j < kNumFeatures; ++j) {
      std::optional<double> r;
      if (cov[i][i] > 0.0 && cov[j][j] > 0.0) {
        r = i == j ? 1.0 : std::clamp(cov[i][j] / std::sqrt(cov[i][i] * cov[j][j]), -1.0, 1.0);
      }
      out[i][j] = r;
      out[j][i] = r;
    }
  }
  return out;
}

}  // namespace groupsense
