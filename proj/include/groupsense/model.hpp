#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "groupsense/features.hpp"

namespace groupsense {

inline constexpr int kDefaultMaxDepth = 3;

/// One node of a binary decision tree. Split nodes send `feature < threshold`
/// left and everything else (ties included) right. `probability` is the
/// positive fraction of the training rows that reached the node; for a leaf
/// it is the prediction.
struct TreeNode {
  bool is_leaf = true;
  Feature feature = Feature::kSlope;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double probability = 0.0;
  std::size_t samples = 0;

  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  /// Node 0 is the root. Throws kInvariantViolation for dangling or shared
  /// children, cycles, unreachable nodes or probabilities outside [0, 1], and
  /// kDepthViolation when depth exceeds max_depth.
  explicit DecisionTree(std::vector<TreeNode> nodes, int max_depth = kDefaultMaxDepth);

  static DecisionTree constant(double probability, std::size_t samples = 0);

  double predict(const FeatureVector& x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int max_depth() const { return max_depth_; }
  /// Number of split levels on the longest root-to-leaf path.
  int depth() const;
  std::size_t leaf_count() const;
  std::vector<double> leaf_probabilities() const;
  FeatureSet features_used() const;

  /// Collapses every split below depth `d` into a leaf carrying the split
  /// node's own positive fraction.
  DecisionTree pruned_to_depth(int d) const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  int max_depth_;
};

struct LogisticModel {
  std::map<Feature, double> weights;
  double intercept = 0.0;
  /// False when fitting hit the iteration cap or the coefficient cap.
  bool converged = true;

  double predict(const FeatureVector& x) const;
  FeatureSet included_features() const;

  bool operator==(const LogisticModel&) const = default;
};

class GroupingModel;
using ModelPtr = std::shared_ptr<const GroupingModel>;

/// Cluster-feature model whose indecisive outputs fall through to a
/// co-linearity model.
struct CascadeModel {
  ModelPtr cluster_stage;
  ModelPtr colinear_stage;
};

/// Separate models for edge group sizes {2, n-1} and intermediate sizes
/// {3 .. n-2}.
struct SizeRoutedModel {
  ModelPtr edge;
  ModelPtr intermediate;
};

/// Cascade outputs inside (kCascadeLow, kCascadeHigh) are not decisive.
inline constexpr double kCascadeLow = 0.1;
inline constexpr double kCascadeHigh = 0.9;

enum class ModelKind { kTree, kLogistic, kCascade, kSizeRouted };

std::string_view to_string(ModelKind kind);

class GroupingModel {
 public:
  using Body = std::variant<DecisionTree, LogisticModel, CascadeModel, SizeRoutedModel>;
  using Metadata = std::map<std::string, std::string>;

  /// Throws kPolicyViolation when the body reads features outside `policy`
  /// or cascade stages read outside their feature family, and
  /// kInvariantViolation for missing stages.
  GroupingModel(Body body, FeatureSet policy, Metadata metadata = {});

  ModelKind kind() const;
  const Body& body() const { return body_; }
  const FeatureSet& feature_policy() const { return policy_; }
  const Metadata& metadata() const { return metadata_; }
  /// metadata["model_id"], or empty.
  std::string model_id() const;

  /// Probability that a viewer perceives the group. Throws kInvalidArgument
  /// for group sizes outside [2, chart_size - 1] or a non-finite value in a
  /// feature the model reads.
  double predict(const FeatureVector& x, std::size_t group_size, std::size_t chart_size) const;

  /// Features any node of the model actually reads.
  FeatureSet features_read() const;

 private:
  Body body_;
  FeatureSet policy_;
  Metadata metadata_;
};

bool is_edge_size(std::size_t group_size, std::size_t chart_size);

}  // namespace groupsense
