#pragma once

#include <span>
#include <vector>

#include "groupsense/dataset.hpp"
#include "groupsense/model.hpp"

namespace groupsense {

struct TreeTrainOptions {
  int max_depth = kDefaultMaxDepth;
  FeatureSet policy = FeatureSet::all();
};

/// Greedy CART with Gini impurity. Candidate thresholds are midpoints between
/// consecutive distinct values; ties go to the earlier feature in canonical
/// order, then to the lower threshold, so the result does not depend on
/// example order. Single-class or featureless data yields one leaf.
DecisionTree train_decision_tree(std::span<const LabeledExample> examples,
                                 const TreeTrainOptions& options = {});

/// VIF_j = 1 / (1 - R_j^2) from regressing column j on the others (with
/// intercept). Exact collinearity gives +inf; a constant column gives NaN.
std::vector<double> variance_inflation_factors(std::span<const std::vector<double>> columns);

struct VifPruning {
  std::vector<Feature> retained;
  std::vector<Feature> dropped;  // in drop order
  std::vector<double> retained_vif;
};

/// Drops constant columns, then repeatedly drops the feature with the
/// highest VIF while any VIF exceeds `threshold`.
VifPruning prune_by_vif(std::span<const LabeledExample> examples, const FeatureSet& candidates,
                        double threshold);

struct LogisticTrainOptions {
  double vif_threshold = 5.0;
  FeatureSet policy = FeatureSet::all();
  std::size_t max_iterations = 10000;
  double gradient_tolerance = 1e-8;
  double coefficient_cap = 50.0;
};

struct LogisticFit {
  LogisticModel model;
  VifPruning vif;
  std::size_t iterations = 0;
  /// Coefficients hit the cap: the classes are (quasi-)separable.
  bool separated = false;
};

/// VIF pruning followed by unregularized maximum likelihood (Newton steps
/// with backtracking).
LogisticFit train_logistic(std::span<const LabeledExample> examples,
                           const LogisticTrainOptions& options = {});

/// Recipe for fitting a GroupingModel of any kind.
struct ModelSpec {
  ModelKind kind = ModelKind::kTree;
  int max_depth = kDefaultMaxDepth;
  FeatureSet policy = FeatureSet::all();
  double vif_threshold = 5.0;
};

/// Fits `spec` on `train`. Cascades train the co-linearity stage on the rows
/// the cluster stage gets wrong; size-routed models train one stage per size
/// class. `metadata` is attached to the top-level model.
GroupingModel fit_model(const ModelSpec& spec, std::span<const LabeledExample> train,
                        GroupingModel::Metadata metadata = {});

/// The slope-free feature set used by the shipped models.
FeatureSet slope_free_features();

}  // namespace groupsense
