#include "groupsense/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "groupsense/error.hpp"

namespace groupsense {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int depth_from(const std::vector<TreeNode>& nodes, int idx) {
  const auto& n = nodes[static_cast<std::size_t>(idx)];
  if (n.is_leaf) return 0;
  return 1 + std::max(depth_from(nodes, n.left), depth_from(nodes, n.right));
}

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, int max_depth)
    : nodes_(std::move(nodes)), max_depth_(max_depth) {
  if (nodes_.empty()) throw Error(ErrorCode::kInvariantViolation, "tree has no nodes", "/tree/nodes");
  if (max_depth_ < 0) throw Error(ErrorCode::kInvariantViolation, "negative max_depth", "/tree/max_depth");

  // Every non-root node is the child of exactly one split.
  const int n = static_cast<int>(nodes_.size());
  std::vector<int> parents(nodes_.size(), 0);
  for (int i = 0; i < n; ++i) {
    const auto& node = nodes_[static_cast<std::size_t>(i)];
    const std::string path = "/tree/nodes/" + std::to_string(i);
    if (!(node.probability >= 0.0 && node.probability <= 1.0))
      throw Error(ErrorCode::kInvariantViolation, "probability outside [0, 1]", path);
    if (node.is_leaf) continue;
    if (!std::isfinite(node.threshold))
      throw Error(ErrorCode::kInvariantViolation, "non-finite threshold", path);
    for (int child : {node.left, node.right}) {
      if (child <= 0 || child >= n || child == i)
        throw Error(ErrorCode::kInvariantViolation, "split child index out of range", path);
      ++parents[static_cast<std::size_t>(child)];
    }
  }
  if (parents[0] != 0) throw Error(ErrorCode::kInvariantViolation, "root has a parent", "/tree/nodes/0");
  for (int i = 1; i < n; ++i) {
    if (parents[static_cast<std::size_t>(i)] != 1)
      throw Error(ErrorCode::kInvariantViolation, "node must have exactly one parent",
                  "/tree/nodes/" + std::to_string(i));
  }
  // With single parenthood, everything is reachable from the root iff acyclic.
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<int> stack = {0};
  int visited = 0;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(i)])
      throw Error(ErrorCode::kInvariantViolation, "cycle in tree", "/tree/nodes");
    seen[static_cast<std::size_t>(i)] = true;
    ++visited;
    const auto& node = nodes_[static_cast<std::size_t>(i)];
    if (!node.is_leaf) {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  if (visited != n) throw Error(ErrorCode::kInvariantViolation, "unreachable or cyclic nodes", "/tree/nodes");

  if (depth() > max_depth_) {
    throw Error(ErrorCode::kDepthViolation,
                "tree depth " + std::to_string(depth()) + " exceeds max_depth " +
                    std::to_string(max_depth_),
                "/tree");
  }
}

DecisionTree DecisionTree::constant(double probability, std::size_t samples) {
  TreeNode leaf;
  leaf.probability = probability;
  leaf.samples = samples;
  return DecisionTree({leaf});
}

double DecisionTree::predict(const FeatureVector& x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[n.feature] < n.threshold ? n.left : n.right);
  }
  return nodes_[i].probability;
}

int DecisionTree::depth() const { return depth_from(nodes_, 0); }

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf; }));
}

std::vector<double> DecisionTree::leaf_probabilities() const {
  std::vector<double> out;
  for (const auto& n : nodes_) {
    if (n.is_leaf) out.push_back(n.probability);
  }
  return out;
}

FeatureSet DecisionTree::features_used() const {
  FeatureSet out;
  for (const auto& n : nodes_) {
    if (!n.is_leaf) out.insert(n.feature);
  }
  return out;
}

DecisionTree DecisionTree::pruned_to_depth(int d) const {
  std::vector<TreeNode> out;
  // Preorder copy with renumbering.
  auto copy = [&](auto&& self, int src, int level) -> int {
    const int dst = static_cast<int>(out.size());
    out.push_back(nodes_[static_cast<std::size_t>(src)]);
    if (out.back().is_leaf) return dst;
    if (level >= d) {
      out.back().is_leaf = true;
      out.back().left = out.back().right = -1;
      return dst;
    }
    const TreeNode original = nodes_[static_cast<std::size_t>(src)];
    const int l = self(self, original.left, level + 1);
    const int r = self(self, original.right, level + 1);
    out[static_cast<std::size_t>(dst)].left = l;
    out[static_cast<std::size_t>(dst)].right = r;
    return dst;
  };
  copy(copy, 0, 0);
  return DecisionTree(std::move(out), std::min(max_depth_, std::max(d, 0)));
}

double LogisticModel::predict(const FeatureVector& x) const {
  double z = intercept;
  for (const auto& [f, w] : weights) z += w * x[f];
  return 1.0 / (1.0 + std::exp(-z));
}

FeatureSet LogisticModel::included_features() const {
  FeatureSet out;
  for (const auto& [f, w] : weights) out.insert(f);
  return out;
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTree: return "tree";
    case ModelKind::kLogistic: return "logistic";
    case ModelKind::kCascade: return "cascade";
    case ModelKind::kSizeRouted: return "size_routed";
  }
  return "unknown";
}

bool is_edge_size(std::size_t group_size, std::size_t chart_size) {
  return group_size == 2 || group_size + 1 == chart_size;
}

GroupingModel::GroupingModel(Body body, FeatureSet policy, Metadata metadata)
    : body_(std::move(body)), policy_(policy), metadata_(std::move(metadata)) {
  auto require_stage = [](const ModelPtr& stage, const char* name) {
    if (!stage)
      throw Error(ErrorCode::kInvariantViolation, std::string("missing stage ") + name,
                  std::string("/stages/") + name);
  };
  auto require_within = [](const FeatureSet& inner, const FeatureSet& outer, const std::string& path) {
    if (!inner.is_subset_of(outer))
      throw Error(ErrorCode::kPolicyViolation, "model reads features outside its feature_policy", path);
  };

  std::visit(Overloaded{
                 [&](const DecisionTree& t) { require_within(t.features_used(), policy_, "/tree"); },
                 [&](const LogisticModel& m) {
                   require_within(m.included_features(), policy_, "/logistic");
                 },
                 [&](const CascadeModel& c) {
                   require_stage(c.cluster_stage, "cluster_stage");
                   require_stage(c.colinear_stage, "colinear_stage");
                   require_within(c.cluster_stage->feature_policy(), cluster_feature_set(),
                                  "/stages/cluster_stage/feature_policy");
                   require_within(c.colinear_stage->feature_policy(), colinear_feature_set(),
                                  "/stages/colinear_stage/feature_policy");
                   require_within(c.cluster_stage->feature_policy(), policy_, "/stages/cluster_stage");
                   require_within(c.colinear_stage->feature_policy(), policy_, "/stages/colinear_stage");
                 },
                 [&](const SizeRoutedModel& s) {
                   require_stage(s.edge, "edge");
                   require_stage(s.intermediate, "intermediate");
                   require_within(s.edge->feature_policy(), policy_, "/stages/edge");
                   require_within(s.intermediate->feature_policy(), policy_, "/stages/intermediate");
                 },
             },
             body_);
}

ModelKind GroupingModel::kind() const { return static_cast<ModelKind>(body_.index()); }

std::string GroupingModel::model_id() const {
  auto it = metadata_.find("model_id");
  return it == metadata_.end() ? std::string() : it->second;
}

FeatureSet GroupingModel::features_read() const {
  return std::visit(Overloaded{
                        [](const DecisionTree& t) { return t.features_used(); },
                        [](const LogisticModel& m) { return m.included_features(); },
                        [](const CascadeModel& c) {
                          FeatureSet out = c.cluster_stage->features_read();
                          for (Feature f : c.colinear_stage->features_read().list()) out.insert(f);
                          return out;
                        },
                        [](const SizeRoutedModel& s) {
                          FeatureSet out = s.edge->features_read();
                          for (Feature f : s.intermediate->features_read().list()) out.insert(f);
                          return out;
                        },
                    },
                    body_);
}

double GroupingModel::predict(const FeatureVector& x, std::size_t group_size,
                              std::size_t chart_size) const {
  if (group_size < 2 || group_size + 1 > chart_size) {
    throw Error(ErrorCode::kInvalidArgument,
                "group size " + std::to_string(group_size) + " outside [2, chart_size - 1]");
  }
  for (Feature f : policy_.list()) {
    if (!std::isfinite(x[f]))
      throw Error(ErrorCode::kInvalidArgument,
                  "feature '" + std::string(feature_name(f)) + "' is missing or non-finite");
  }
  return std::visit(Overloaded{
                        [&](const DecisionTree& t) { return t.predict(x); },
                        [&](const LogisticModel& m) { return m.predict(x); },
                        [&](const CascadeModel& c) {
                          const double p = c.cluster_stage->predict(x, group_size, chart_size);
                          if (p <= kCascadeLow || p >= kCascadeHigh) return p;
                          return c.colinear_stage->predict(x, group_size, chart_size);
                        },
                        [&](const SizeRoutedModel& s) {
                          const auto& stage = is_edge_size(group_size, chart_size) ? s.edge : s.intermediate;
                          return stage->predict(x, group_size, chart_size);
                        },
                    },
                    body_);
}

}  // namespace groupsense
