#include "groupsense/json_io.hpp"

#include <fstream>
#include <istream>
#include <set>

#include "groupsense/error.hpp"

namespace groupsense {

namespace {

[[noreturn]] void malformed(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kMalformedDocument, msg, path);
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) malformed(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) malformed(path + "/" + key, std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) malformed(path, "expected a number");
  return v.get<double>();
}

std::string string(const Json& v, const std::string& path) {
  if (!v.is_string()) malformed(path, "expected a string");
  return v.get<std::string>();
}

long long integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) malformed(path, "expected an integer");
  return v.get<long long>();
}

bool boolean(const Json& v, const std::string& path) {
  if (!v.is_boolean()) malformed(path, "expected a boolean");
  return v.get<bool>();
}

Feature feature(const Json& v, const std::string& path) {
  const std::string name = string(v, path);
  auto f = feature_from_name(name);
  if (!f) throw Error(ErrorCode::kUnknownFeature, "unknown feature '" + name + "'", path);
  return *f;
}

Json feature_set_to_json(const FeatureSet& set) {
  Json out = Json::array();
  for (Feature f : set.list()) out.push_back(feature_name(f));
  return out;
}

FeatureSet feature_set_from_json(const Json& v, const std::string& path) {
  if (!v.is_array()) malformed(path, "expected an array of feature names");
  FeatureSet out;
  for (std::size_t i = 0; i < v.size(); ++i) out.insert(feature(v[i], path + "/" + std::to_string(i)));
  return out;
}

Json tree_to_json(const DecisionTree& tree) {
  Json nodes = Json::array();
  for (const auto& n : tree.nodes()) {
    Json node = {{"leaf", n.is_leaf}, {"probability", n.probability}, {"samples", n.samples}};
    if (!n.is_leaf) {
      node["feature"] = feature_name(n.feature);
      node["threshold"] = n.threshold;
      node["left"] = n.left;
      node["right"] = n.right;
    }
    nodes.push_back(std::move(node));
  }
  return {{"max_depth", tree.max_depth()}, {"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(const Json& doc, const std::string& path) {
  const int max_depth = doc.is_object() && doc.contains("max_depth")
                            ? static_cast<int>(integer(doc["max_depth"], path + "/max_depth"))
                            : kDefaultMaxDepth;
  const Json& nodes = require(doc, "nodes", path);
  if (!nodes.is_array()) malformed(path + "/nodes", "expected an array");
  std::vector<TreeNode> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string npath = path + "/nodes/" + std::to_string(i);
    const Json& n = nodes[i];
    TreeNode node;
    node.is_leaf = boolean(require(n, "leaf", npath), npath + "/leaf");
    node.probability = number(require(n, "probability", npath), npath + "/probability");
    if (n.contains("samples")) node.samples = static_cast<std::size_t>(integer(n["samples"], npath + "/samples"));
    if (!node.is_leaf) {
      node.feature = feature(require(n, "feature", npath), npath + "/feature");
      node.threshold = number(require(n, "threshold", npath), npath + "/threshold");
      node.left = static_cast<int>(integer(require(n, "left", npath), npath + "/left"));
      node.right = static_cast<int>(integer(require(n, "right", npath), npath + "/right"));
    }
    out.push_back(node);
  }
  try {
    return DecisionTree(std::move(out), max_depth);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), path + e.path().substr(std::string_view("/tree").size()));
  }
}

Json logistic_to_json(const LogisticModel& m) {
  Json weights = Json::object();
  for (const auto& [f, w] : m.weights) weights[std::string(feature_name(f))] = w;
  return {{"intercept", m.intercept}, {"weights", std::move(weights)}, {"converged", m.converged}};
}

LogisticModel logistic_from_json(const Json& doc, const std::string& path) {
  LogisticModel m;
  m.intercept = number(require(doc, "intercept", path), path + "/intercept");
  const Json& weights = require(doc, "weights", path);
  if (!weights.is_object()) malformed(path + "/weights", "expected an object");
  for (const auto& [name, w] : weights.items()) {
    const std::string wpath = path + "/weights/" + name;
    m.weights[feature(Json(name), wpath)] = number(w, wpath);
  }
  if (doc.contains("converged")) m.converged = boolean(doc["converged"], path + "/converged");
  return m;
}

[[noreturn]] void rethrow_with_path(const Error& e, const std::string& prefix) {
  throw Error(e.code(), e.what(), prefix + e.path());
}

}  // namespace

Json read_json(std::istream& in) {
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("invalid JSON: ") + e.what());
  }
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("invalid JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kNotFound, "cannot open " + path);
  return read_json(f);
}

Json chart_to_json(const Chart& chart) {
  Json points = Json::array();
  for (const auto& p : chart.points) points.push_back({{"label", p.label}, {"value", p.value}});
  Json out = {
      {"points", std::move(points)},
      {"plot",
       {{"width_px", chart.plot.width_px},
        {"height_px", chart.plot.height_px},
        {"pad_fraction", chart.plot.pad_fraction},
        {"value_min", chart.plot.value_min},
        {"value_max", chart.plot.value_max}}},
  };
  if (chart.hierarchy) {
    Json cats = Json::array();
    for (const auto& c : *chart.hierarchy) cats.push_back({{"name", c.name}, {"members", c.members}});
    out["hierarchy"] = std::move(cats);
  }
  return out;
}

Chart chart_from_json(const Json& doc, const std::string& path) {
  if (!doc.is_object()) malformed(path, "chart must be an object");
  Chart chart;
  const Json& points = require(doc, "points", path);
  if (!points.is_array()) malformed(path + "/points", "expected an array");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string ppath = path + "/points/" + std::to_string(i);
    chart.points.push_back({string(require(points[i], "label", ppath), ppath + "/label"),
                            number(require(points[i], "value", ppath), ppath + "/value")});
  }
  if (auto it = doc.find("hierarchy"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) malformed(path + "/hierarchy", "expected an array");
    std::vector<Category> cats;
    for (std::size_t c = 0; c < it->size(); ++c) {
      const std::string cpath = path + "/hierarchy/" + std::to_string(c);
      const Json& cat = (*it)[c];
      Category out;
      if (cat.contains("name")) out.name = string(cat["name"], cpath + "/name");
      const Json& members = require(cat, "members", cpath);
      if (!members.is_array()) malformed(cpath + "/members", "expected an array");
      for (std::size_t m = 0; m < members.size(); ++m)
        out.members.push_back(string(members[m], cpath + "/members/" + std::to_string(m)));
      cats.push_back(std::move(out));
    }
    chart.hierarchy = std::move(cats);
  }
  if (auto it = doc.find("plot"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) malformed(path + "/plot", "expected an object");
    auto field = [&](const char* key, double& target) {
      if (auto f = it->find(key); f != it->end()) target = number(*f, path + "/plot/" + key);
    };
    field("width_px", chart.plot.width_px);
    field("height_px", chart.plot.height_px);
    field("pad_fraction", chart.plot.pad_fraction);
    field("value_min", chart.plot.value_min);
    field("value_max", chart.plot.value_max);
  }
  try {
    validate(chart);
  } catch (const Error& e) {
    rethrow_with_path(e, path);
  }
  return chart;
}

Json group_to_json(const Group& group) { return group.members(); }

Group group_from_json(const Json& doc, const std::string& path) {
  if (!doc.is_array()) malformed(path, "group must be an array of labels");
  std::vector<std::string> members;
  for (std::size_t i = 0; i < doc.size(); ++i) members.push_back(string(doc[i], path + "/" + std::to_string(i)));
  const std::size_t listed = members.size();
  Group g(std::move(members));
  if (g.size() != listed) throw Error(ErrorCode::kInvariantViolation, "group repeats a label", path);
  return g;
}

Json groups_to_json(const std::vector<Group>& groups) {
  Json out = Json::array();
  for (const auto& g : groups) out.push_back(group_to_json(g));
  return out;
}

std::vector<Group> groups_from_json(const Json& doc, const std::string& path) {
  if (doc.is_null()) return {};
  if (!doc.is_array()) malformed(path, "expected an array of groups");
  std::vector<Group> out;
  for (std::size_t i = 0; i < doc.size(); ++i) out.push_back(group_from_json(doc[i], path + "/" + std::to_string(i)));
  return out;
}

Json features_to_json(const FeatureVector& features) {
  Json out = Json::object();
  for (Feature f : kAllFeatures) out[std::string(feature_name(f))] = features[f];
  return out;
}

FeatureVector features_from_json(const Json& doc, const std::string& path) {
  if (!doc.is_object()) malformed(path, "expected an object");
  FeatureVector fv;
  for (const auto& [name, v] : doc.items()) {
    const std::string fpath = path + "/" + name;
    fv[feature(Json(name), fpath)] = number(v, fpath);
  }
  for (Feature f : kAllFeatures) {
    if (!doc.contains(std::string(feature_name(f))))
      malformed(path, "missing feature '" + std::string(feature_name(f)) + "'");
  }
  return fv;
}

Json save_model(const GroupingModel& model) {
  Json out = {
      {"version", kModelFormatVersion},
      {"kind", to_string(model.kind())},
      {"feature_policy", feature_set_to_json(model.feature_policy())},
      {"metadata", model.metadata()},
  };
  switch (model.kind()) {
    case ModelKind::kTree: out["tree"] = tree_to_json(std::get<DecisionTree>(model.body())); break;
    case ModelKind::kLogistic: out["logistic"] = logistic_to_json(std::get<LogisticModel>(model.body())); break;
    case ModelKind::kCascade: {
      const auto& c = std::get<CascadeModel>(model.body());
      out["stages"] = {{"cluster_stage", save_model(*c.cluster_stage)},
                       {"colinear_stage", save_model(*c.colinear_stage)}};
      break;
    }
    case ModelKind::kSizeRouted: {
      const auto& s = std::get<SizeRoutedModel>(model.body());
      out["stages"] = {{"edge", save_model(*s.edge)}, {"intermediate", save_model(*s.intermediate)}};
      break;
    }
  }
  return out;
}

GroupingModel load_model(const Json& doc, const std::string& path) {
  if (!doc.is_object()) malformed(path, "model document must be an object");
  const long long version = integer(require(doc, "version", path), path + "/version");
  if (version != kModelFormatVersion)
    throw Error(ErrorCode::kUnsupportedVersion, "unsupported model version " + std::to_string(version),
                path + "/version");
  const std::string kind = string(require(doc, "kind", path), path + "/kind");
  const FeatureSet policy = feature_set_from_json(require(doc, "feature_policy", path), path + "/feature_policy");

  GroupingModel::Metadata meta;
  if (auto it = doc.find("metadata"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) malformed(path + "/metadata", "expected an object");
    for (const auto& [k, v] : it->items()) meta[k] = string(v, path + "/metadata/" + k);
  }

  auto stage = [&](const Json& stages, const char* name) {
    const std::string spath = path + "/stages/" + name;
    return std::make_shared<const GroupingModel>(load_model(require(stages, name, path + "/stages"), spath));
  };

  try {
    if (kind == "tree") {
      return GroupingModel(tree_from_json(require(doc, "tree", path), path + "/tree"), policy, std::move(meta));
    }
    if (kind == "logistic") {
      return GroupingModel(logistic_from_json(require(doc, "logistic", path), path + "/logistic"), policy,
                           std::move(meta));
    }
    if (kind == "cascade") {
      const Json& stages = require(doc, "stages", path);
      return GroupingModel(CascadeModel{stage(stages, "cluster_stage"), stage(stages, "colinear_stage")}, policy,
                           std::move(meta));
    }
    if (kind == "size_routed") {
      const Json& stages = require(doc, "stages", path);
      return GroupingModel(SizeRoutedModel{stage(stages, "edge"), stage(stages, "intermediate")}, policy,
                           std::move(meta));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kPolicyViolation && !e.path().starts_with(path)) rethrow_with_path(e, path);
    throw;
  }
  malformed(path + "/kind", "unknown model kind '" + kind + "'");
}

Json report_to_json(const DiagnosisReport& report) {
  Json detected = Json::array();
  for (const auto& d : report.detected) {
    detected.push_back({{"group", group_to_json(d.group)},
                        {"size", d.group.size()},
                        {"prob", d.prob},
                        {"violation", d.violation},
                        {"colinear", d.colinear}});
  }
  return {{"chart_id", report.chart_id},
          {"desired", groups_to_json(report.desired)},
          {"detected", std::move(detected)},
          {"missed_desired", groups_to_json(report.missed_desired)},
          {"threshold", report.threshold},
          {"epsilon_line", report.epsilon_line},
          {"model_version", report.model_version}};
}

Json score_to_json(const PermutationScore& score, bool include_report) {
  Json out = {{"order", score.order},
              {"s", score.s},
              {"s_d", score.s_d},
              {"s_v", score.s_v},
              {"desired_met", score.desired_met}};
  if (include_report) out["report"] = report_to_json(score.report);
  return out;
}

Json landscape_to_json(const LandscapeMatrix& matrix) {
  Json cells = Json::array();
  for (const auto& c : matrix.cells) {
    cells.push_back({{"violations", c.violations},
                     {"desired_met", c.desired_met},
                     {"count", c.count},
                     {"exemplars", c.exemplars}});
  }
  return {{"cells", std::move(cells)}, {"total", matrix.total}};
}

Json redesign_to_json(const RedesignResult& result, std::uint64_t total) {
  Json top = Json::array();
  for (const auto& s : result.top) top.push_back(score_to_json(s));
  Json out = {{"results", std::move(top)}, {"examined", result.examined}, {"total", total}};
  if (result.landscape) out["landscape"] = landscape_to_json(*result.landscape);
  return out;
}

Json eval_to_json(const EvalReport& r) {
  Json out = {{"precision", r.precision},
              {"recall", r.recall},
              {"f1", r.f1},
              {"support", r.support},
              {"confusion",
               {{"tp", r.true_positives}, {"fp", r.false_positives}, {"fn", r.false_negatives}, {"tn", r.true_negatives}}},
              {"no_positive_predictions", r.no_positive_predictions}};
  if (r.fold_stats) {
    auto summary = [](const MetricSummary& m) { return Json{{"mean", m.mean}, {"sd", m.sd}}; };
    out["fold_stats"] = {{"folds", r.fold_stats->folds},
                         {"precision", summary(r.fold_stats->precision)},
                         {"recall", summary(r.fold_stats->recall)},
                         {"f1", summary(r.fold_stats->f1)}};
  }
  return out;
}

Json shap_to_json(const ShapExplanation& e) {
  Json per = Json::object();
  for (Feature f : kAllFeatures) per[std::string(feature_name(f))] = e[f];
  return {{"per_feature", std::move(per)}, {"base_value", e.base_value}, {"prediction", e.prediction}};
}

Json correlation_to_json(const CorrelationMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < kNumFeatures; ++j) row.push_back(m[i][j] ? Json(*m[i][j]) : Json(nullptr));
    rows.push_back(std::move(row));
  }
  Json names = Json::array();
  for (Feature f : kAllFeatures) names.push_back(feature_name(f));
  return {{"features", std::move(names)}, {"matrix", std::move(rows)}};
}

Json error_to_json(const Error& error) {
  return {{"error", {{"code", to_string(error.code())}, {"message", error.what()}, {"path", error.path()}}}};
}

}  // namespace groupsense
