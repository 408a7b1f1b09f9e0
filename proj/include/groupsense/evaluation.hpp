#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "groupsense/dataset.hpp"
#include "groupsense/model.hpp"
#include "groupsense/training.hpp"

namespace groupsense {

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation across folds
};

struct FoldStats {
  std::size_t folds = 0;
  MetricSummary precision;
  MetricSummary recall;
  MetricSummary f1;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // examples evaluated
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t true_negatives = 0;
  /// Precision is reported as 0 when nothing was predicted positive.
  bool no_positive_predictions = false;
  std::optional<FoldStats> fold_stats;
};

/// Metrics from parallel predicted/actual label sequences.
EvalReport report_from_predictions(std::span<const std::uint8_t> predicted,
                                   std::span<const std::uint8_t> actual);

/// Precision/recall/F1 of `model` at decision threshold 0.5.
EvalReport evaluate(const GroupingModel& model, std::span<const LabeledExample> examples);

/// Stratified k-fold cross-validation of a model recipe. Top-level metrics
/// pool every example's out-of-fold prediction; fold_stats summarize the
/// per-fold metrics.
EvalReport cross_validate(const ModelSpec& spec, std::span<const LabeledExample> examples,
                          std::size_t k = 5, std::uint64_t seed = 0);

/// Trains a tree restricted to `features` on the 70% split and evaluates it
/// on the 20% test split.
EvalReport single_feature_study(std::span<const LabeledExample> examples, const FeatureSet& features,
                                std::uint64_t seed = 0, int max_depth = kDefaultMaxDepth);

/// Two-stage analysis: a cluster-feature tree, then a co-linearity tree
/// trained and evaluated only on the first stage's mistakes.
struct CascadeStudy {
  EvalReport cluster_stage;           // on the test split
  EvalReport colinear_stage;          // on test rows the first stage got wrong
  std::size_t first_stage_train_errors = 0;
  std::size_t first_stage_test_errors = 0;
};

CascadeStudy cascade_study(std::span<const LabeledExample> examples, std::uint64_t seed = 0,
                           int max_depth = kDefaultMaxDepth);

/// Pearson correlations between the eight features. Entries involving a
/// constant feature are nullopt.
using CorrelationMatrix = std::array<std::array<std::optional<double>, kNumFeatures>, kNumFeatures>;

CorrelationMatrix correlation_matrix(std::span<const LabeledExample> examples);

}  // namespace groupsense
