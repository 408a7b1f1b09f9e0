#include "groupsense/training.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "groupsense/error.hpp"

namespace groupsense {

namespace {

constexpr double kTieEps = 1e-12;

// n * (weighted Gini impurity) of a two-way partition.
double weighted_gini(double pos_l, double n_l, double pos_r, double n_r) {
  auto part = [](double pos, double n) {
    if (n == 0.0) return 0.0;
    const double neg = n - pos;
    return n - (pos * pos + neg * neg) / n;
  };
  return part(pos_l, n_l) + part(pos_r, n_r);
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const LabeledExample> examples, const TreeTrainOptions& options)
      : examples_(examples), options_(options), features_(options.policy.list()) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> all(examples_.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    Feature feature = Feature::kSlope;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();
  };

  int grow(std::vector<std::size_t>& rows, int depth) {
    const double n = static_cast<double>(rows.size());
    std::size_t positives = 0;
    for (auto i : rows) positives += examples_[i].label ? 1 : 0;

    const int id = static_cast<int>(nodes_.size());
    TreeNode node;
    node.samples = rows.size();
    node.probability = rows.empty() ? 0.0 : static_cast<double>(positives) / n;
    nodes_.push_back(node);

    if (depth >= options_.max_depth || positives == 0 || positives == rows.size()) return id;
    const Split best = best_split(rows, static_cast<double>(positives));
    const double parent = weighted_gini(static_cast<double>(positives), n, 0.0, 0.0);
    if (!(best.score < parent - kTieEps)) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto i : rows) {
      (examples_[i].features[best.feature] < best.threshold ? left : right).push_back(i);
    }
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& self = nodes_[static_cast<std::size_t>(id)];
    self.is_leaf = false;
    self.feature = best.feature;
    self.threshold = best.threshold;
    self.left = l;
    self.right = r;
    return id;
  }

  Split best_split(const std::vector<std::size_t>& rows, double positives) const {
    Split best;
    const double n = static_cast<double>(rows.size());
    std::vector<std::pair<double, bool>> column(rows.size());
    for (Feature f : features_) {
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& ex = examples_[rows[k]];
        column[k] = {ex.features[f], ex.label};
      }
      std::sort(column.begin(), column.end());
      double pos_left = 0.0;
      for (std::size_t k = 0; k + 1 < column.size(); ++k) {
        pos_left += column[k].second ? 1.0 : 0.0;
        const double a = column[k].first;
        const double b = column[k + 1].first;
        if (!(a < b)) continue;
        const double n_left = static_cast<double>(k + 1);
        const double score = weighted_gini(pos_left, n_left, positives - pos_left, n - n_left);
        if (score < best.score - kTieEps) {
          double threshold = a + (b - a) / 2.0;
          if (!(a < threshold)) threshold = b;
          best = {f, threshold, score};
        }
      }
    }
    return best;
  }

  std::span<const LabeledExample> examples_;
  TreeTrainOptions options_;
  std::vector<Feature> features_;
  std::vector<TreeNode> nodes_;
};

double log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd z = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    // log(1 + e^z) without overflow.
    const double softplus = std::max(z[i], 0.0) + std::log1p(std::exp(-std::abs(z[i])));
    ll += y[i] * z[i] - softplus;
  }
  return ll;
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

GroupingModel::Metadata with_entry(GroupingModel::Metadata meta, const std::string& key,
                                   const std::string& value) {
  meta[key] = value;
  return meta;
}

FeatureSet intersect(const FeatureSet& a, const FeatureSet& b) {
  FeatureSet out;
  for (Feature f : a.list()) {
    if (b.contains(f)) out.insert(f);
  }
  return out;
}

double base_rate(std::span<const LabeledExample> rows) {
  if (rows.empty()) return 0.0;
  const auto pos = std::count_if(rows.begin(), rows.end(), [](const auto& e) { return e.label; });
  return static_cast<double>(pos) / static_cast<double>(rows.size());
}

ModelPtr tree_stage(std::span<const LabeledExample> rows, const FeatureSet& policy, int max_depth,
                    double fallback_rate) {
  DecisionTree tree = rows.empty() ? DecisionTree::constant(fallback_rate)
                                   : train_decision_tree(rows, {max_depth, policy});
  return std::make_shared<const GroupingModel>(std::move(tree), policy);
}

}  // namespace

DecisionTree train_decision_tree(std::span<const LabeledExample> examples,
                                 const TreeTrainOptions& options) {
  if (options.max_depth < 0) throw Error(ErrorCode::kInvalidArgument, "max_depth must be >= 0");
  if (examples.empty()) throw Error(ErrorCode::kInvalidArgument, "no training examples");
  return DecisionTree(TreeBuilder(examples, options).build(), options.max_depth);
}

std::vector<double> variance_inflation_factors(std::span<const std::vector<double>> columns) {
  const std::size_t p = columns.size();
  std::vector<double> out(p, std::numeric_limits<double>::quiet_NaN());
  if (p == 0) return out;
  const std::size_t n = columns[0].size();
  for (const auto& c : columns) {
    if (c.size() != n) throw Error(ErrorCode::kInvalidArgument, "VIF columns differ in length");
  }

  for (std::size_t j = 0; j < p; ++j) {
    Eigen::Map<const Eigen::VectorXd> y(columns[j].data(), static_cast<Eigen::Index>(n));
    const double sst = (y.array() - y.mean()).square().sum();
    if (!(sst > 0.0)) continue;
    if (p == 1) {
      out[j] = 1.0;
      continue;
    }
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    a.col(0).setOnes();
    Eigen::Index col = 1;
    for (std::size_t k = 0; k < p; ++k) {
      if (k == j) continue;
      a.col(col++) = Eigen::Map<const Eigen::VectorXd>(columns[k].data(), static_cast<Eigen::Index>(n));
    }
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
    const double ssr = (y - a * coef).squaredNorm();
    out[j] = ssr <= 1e-12 * sst ? std::numeric_limits<double>::infinity() : sst / ssr;
  }
  return out;
}

VifPruning prune_by_vif(std::span<const LabeledExample> examples, const FeatureSet& candidates,
                        double threshold) {
  VifPruning out;
  auto column = [&](Feature f) {
    std::vector<double> c;
    c.reserve(examples.size());
    for (const auto& e : examples) c.push_back(e.features[f]);
    return c;
  };

  std::vector<Feature> current;
  for (Feature f : candidates.list()) {
    const auto c = column(f);
    const bool constant = std::all_of(c.begin(), c.end(), [&](double v) { return v == c.front(); });
    (constant ? out.dropped : current).push_back(f);
  }

  while (true) {
    std::vector<std::vector<double>> cols;
    for (Feature f : current) cols.push_back(column(f));
    auto vif = variance_inflation_factors(cols);
    std::size_t worst = current.size();
    for (std::size_t j = 0; j < current.size(); ++j) {
      if (vif[j] > threshold && (worst == current.size() || vif[j] >= vif[worst])) worst = j;
    }
    if (worst == current.size()) {
      out.retained = current;
      out.retained_vif = std::move(vif);
      return out;
    }
    out.dropped.push_back(current[worst]);
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(worst));
  }
}

LogisticFit train_logistic(std::span<const LabeledExample> examples,
                           const LogisticTrainOptions& options) {
  if (examples.empty()) throw Error(ErrorCode::kInvalidArgument, "no training examples");
  LogisticFit fit;
  fit.vif = prune_by_vif(examples, options.policy, options.vif_threshold);
  const auto& features = fit.vif.retained;

  const auto n = static_cast<Eigen::Index>(examples.size());
  const auto p = static_cast<Eigen::Index>(features.size()) + 1;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& ex = examples[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < p; ++j) x(i, j) = ex.features[features[static_cast<std::size_t>(j - 1)]];
    y[i] = ex.label ? 1.0 : 0.0;
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  bool converged = false;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (fit.iterations = 0; fit.iterations < options.max_iterations; ++fit.iterations) {
    const Eigen::VectorXd mu = sigmoid(x * beta);
    const Eigen::VectorXd grad = x.transpose() * (y - mu) * inv_n;
    if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      converged = true;
      break;
    }
    const Eigen::VectorXd w = (mu.array() * (1.0 - mu.array())).matrix();
    Eigen::MatrixXd hessian = x.transpose() * w.asDiagonal() * x * inv_n;
    hessian.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hessian.ldlt().solve(grad);

    const double ll = log_likelihood(x, y, beta);
    double t = 1.0;
    Eigen::VectorXd next = beta + step;
    while (log_likelihood(x, y, next) < ll && t > 1e-10) {
      t *= 0.5;
      next = beta + t * step;
    }
    beta = next;
    if (beta.lpNorm<Eigen::Infinity>() > options.coefficient_cap) {
      beta = beta.cwiseMax(-options.coefficient_cap).cwiseMin(options.coefficient_cap);
      fit.separated = true;
      break;
    }
  }

  // A linear predictor that classifies every row correctly means complete
  // separation: scaling it up always raises the likelihood, so no MLE exists
  // even if the gradient fell below tolerance on the way.
  if (!fit.separated) {
    const Eigen::VectorXd eta = x * beta;
    bool perfect = true;
    for (Eigen::Index i = 0; i < n && perfect; ++i) perfect = (y[i] > 0.5) ? eta[i] > 0 : eta[i] < 0;
    fit.separated = perfect;
  }

  fit.model.intercept = beta[0];
  for (Eigen::Index j = 1; j < p; ++j) fit.model.weights[features[static_cast<std::size_t>(j - 1)]] = beta[j];
  fit.model.converged = converged && !fit.separated;
  return fit;
}

FeatureSet slope_free_features() {
  FeatureSet s = FeatureSet::all();
  s.erase(Feature::kSlope);
  return s;
}

GroupingModel fit_model(const ModelSpec& spec, std::span<const LabeledExample> train,
                        GroupingModel::Metadata metadata) {
  if (train.empty()) throw Error(ErrorCode::kInvalidArgument, "no training examples");
  metadata["kind"] = std::string(to_string(spec.kind));
  switch (spec.kind) {
    case ModelKind::kTree:
      return GroupingModel(train_decision_tree(train, {spec.max_depth, spec.policy}), spec.policy,
                           std::move(metadata));
    case ModelKind::kLogistic: {
      LogisticFit fit = train_logistic(train, {.vif_threshold = spec.vif_threshold, .policy = spec.policy});
      std::string dropped;
      for (Feature f : fit.vif.dropped) dropped += (dropped.empty() ? "" : ";") + std::string(feature_name(f));
      metadata = with_entry(std::move(metadata), "vif_dropped", dropped);
      return GroupingModel(std::move(fit.model), spec.policy, std::move(metadata));
    }
    case ModelKind::kCascade: {
      const FeatureSet cluster = intersect(spec.policy, cluster_feature_set());
      const FeatureSet colinear = intersect(spec.policy, colinear_feature_set());
      DecisionTree first = train_decision_tree(train, {spec.max_depth, cluster});
      std::vector<LabeledExample> misses;
      for (const auto& ex : train) {
        if ((first.predict(ex.features) >= 0.5) != ex.label) misses.push_back(ex);
      }
      CascadeModel cascade;
      cascade.cluster_stage = std::make_shared<const GroupingModel>(std::move(first), cluster);
      cascade.colinear_stage = tree_stage(misses, colinear, spec.max_depth, base_rate(train));
      return GroupingModel(std::move(cascade), spec.policy, std::move(metadata));
    }
    case ModelKind::kSizeRouted: {
      std::vector<LabeledExample> edge;
      std::vector<LabeledExample> intermediate;
      for (const auto& ex : train) {
        (is_edge_size(ex.group_size(), ex.chart_size) ? edge : intermediate).push_back(ex);
      }
      const double rate = base_rate(train);
      SizeRoutedModel routed;
      routed.edge = tree_stage(edge, spec.policy, spec.max_depth, rate);
      routed.intermediate = tree_stage(intermediate, spec.policy, spec.max_depth, rate);
      return GroupingModel(std::move(routed), spec.policy, std::move(metadata));
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown model kind");
}

}  // namespace groupsense
