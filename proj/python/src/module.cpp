// JSON-in, JSON-out bindings. The Python package converts dicts with the
// json module; C++ errors surface as groupsense.GroupsenseError.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "groupsense/dataset.hpp"
#include "groupsense/default_model.hpp"
#include "groupsense/diagnose.hpp"
#include "groupsense/evaluation.hpp"
#include "groupsense/json_io.hpp"
#include "groupsense/redesign.hpp"
#include "groupsense/shap.hpp"
#include "groupsense/training.hpp"

namespace py = pybind11;
namespace gs = groupsense;

namespace {

gs::GroupingModel model_from(const std::string& doc) {
  return doc.empty() ? gs::default_model() : gs::load_model(gs::parse_json(doc), "/model");
}

gs::Chart chart_from(const std::string& doc) { return gs::chart_from_json(gs::parse_json(doc), "/chart"); }

std::vector<gs::Group> groups_from(const std::string& doc) { return gs::groups_from_json(gs::parse_json(doc)); }

gs::DiagnoseOptions diagnose_options(double threshold, double epsilon_line) {
  gs::DiagnoseOptions o;
  o.threshold = threshold;
  o.epsilon_line = epsilon_line;
  return o;
}

gs::ModelKind kind_from(const std::string& name) {
  for (auto k : {gs::ModelKind::kTree, gs::ModelKind::kLogistic, gs::ModelKind::kCascade, gs::ModelKind::kSizeRouted}) {
    if (gs::to_string(k) == name) return k;
  }
  throw gs::Error(gs::ErrorCode::kInvalidArgument, "unknown model kind '" + name + "'", "/kind");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "groupsense native core";

  static py::exception<gs::Error> error_type(m, "NativeError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const gs::Error& e) {
      PyErr_SetString(error_type.ptr(), gs::error_to_json(e).dump().c_str());
    }
  });

  m.def("random_chart", [](int n, std::uint64_t seed) {
    return gs::chart_to_json(gs::generate_random_chart(n, seed)).dump();
  });

  m.def("features", [](const std::string& chart, const std::string& group) {
    const gs::Chart c = chart_from(chart);
    return gs::features_to_json(gs::feature_vector(c, gs::group_from_json(gs::parse_json(group), "/group"))).dump();
  });

  m.def("default_model", [] { return std::string(gs::default_model_document()); });

  m.def("diagnose", [](const std::string& chart, const std::string& desired, const std::string& model,
                       double threshold, double epsilon_line, const std::string& chart_id) {
    const gs::Chart c = chart_from(chart);
    const auto d = groups_from(desired);
    const auto mdl = model_from(model);
    py::gil_scoped_release release;
    auto report = gs::diagnose(c, d, mdl, diagnose_options(threshold, epsilon_line), chart_id);
    report.model_version = mdl.model_id();
    return gs::report_to_json(report).dump();
  });

  m.def("redesign", [](const std::string& chart, const std::string& desired, const std::string& model, double alpha,
                       std::size_t k, double threshold, double epsilon_line, bool include_landscape,
                       unsigned threads) {
    const gs::Chart c = chart_from(chart);
    const auto d = groups_from(desired);
    const auto mdl = model_from(model);
    gs::RedesignOptions o;
    o.alpha = alpha;
    o.k = k;
    o.diagnose = diagnose_options(threshold, epsilon_line);
    o.include_landscape = include_landscape;
    o.threads = threads;
    py::gil_scoped_release release;
    auto result = gs::redesign(c, d, mdl, o);
    for (auto& s : result.top) s.report.model_version = mdl.model_id();
    return gs::redesign_to_json(result, gs::count_valid_permutations(c)).dump();
  });

  m.def("landscape", [](const std::string& chart, const std::string& desired, const std::string& model,
                        double threshold, double epsilon_line, unsigned threads) {
    const gs::Chart c = chart_from(chart);
    const auto d = groups_from(desired);
    const auto mdl = model_from(model);
    gs::RedesignOptions o;
    o.diagnose = diagnose_options(threshold, epsilon_line);
    o.threads = threads;
    py::gil_scoped_release release;
    return gs::landscape_to_json(gs::landscape(c, d, mdl, o)).dump();
  });

  m.def("train_oracle", [](const std::string& kind, int max_depth, std::size_t charts, std::uint64_t seed,
                           bool slope_free) {
    gs::ModelSpec spec;
    spec.kind = kind_from(kind);
    spec.max_depth = max_depth;
    spec.policy = slope_free ? gs::slope_free_features() : gs::FeatureSet::all();
    py::gil_scoped_release release;
    const auto examples = gs::oracle_dataset(charts, seed);
    const auto split = gs::split_dataset(examples, seed);
    const auto model = gs::fit_model(spec, split.train);
    gs::Json out = {{"model", gs::save_model(model)},
                    {"test", gs::eval_to_json(gs::evaluate(model, split.test))},
                    {"holdout", gs::eval_to_json(gs::evaluate(model, split.holdout))}};
    return out.dump();
  });

  m.def("shap", [](const std::string& chart, const std::string& group, const std::string& model,
                   std::size_t background_charts, std::uint64_t seed) {
    const gs::Chart c = chart_from(chart);
    const gs::Group g = gs::group_from_json(gs::parse_json(group), "/group");
    const auto mdl = model_from(model);
    py::gil_scoped_release release;
    std::vector<gs::FeatureVector> background;
    for (const auto& e : gs::oracle_dataset(background_charts, seed)) background.push_back(e.features);
    return gs::shap_to_json(gs::shap_exact(mdl, gs::feature_vector(c, g), g.size(), c.size(), background)).dump();
  });

  m.def("count_valid_permutations", [](const std::string& chart) {
    return gs::count_valid_permutations(chart_from(chart));
  });
}
