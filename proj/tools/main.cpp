// groupsense command-line interface.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "groupsense/api.hpp"
#include "groupsense/dataset.hpp"
#include "groupsense/default_model.hpp"
#include "groupsense/diagnose.hpp"
#include "groupsense/evaluation.hpp"
#include "groupsense/json_io.hpp"
#include "groupsense/redesign.hpp"
#include "groupsense/server.hpp"
#include "groupsense/shap.hpp"
#include "groupsense/training.hpp"

namespace gs = groupsense;

namespace {

// Where labeled examples come from; exactly one source is used.
struct ExampleArgs {
  std::string examples_csv;
  std::string selections_csv;
  std::string charts_dir;
  std::size_t oracle_charts = 0;
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--examples", examples_csv, "Labeled examples CSV");
    app->add_option("--selections", selections_csv, "Participant selections CSV (needs --charts-dir)");
    app->add_option("--charts-dir", charts_dir, "Directory of <chart_id>.json files");
    app->add_option("--oracle-charts", oracle_charts, "Generate oracle-labeled examples from N random charts");
    app->add_option("--seed", seed, "Seed for generated data and splits");
  }

  std::vector<gs::LabeledExample> load() const {
    if (!examples_csv.empty()) {
      std::ifstream in(examples_csv);
      if (!in) throw std::runtime_error("cannot open " + examples_csv);
      return gs::read_examples_csv(in);
    }
    if (!selections_csv.empty()) {
      if (charts_dir.empty()) throw std::runtime_error("--selections requires --charts-dir");
      std::ifstream in(selections_csv);
      if (!in) throw std::runtime_error("cannot open " + selections_csv);
      const auto selections = gs::read_selections_csv(in);
      const auto charts = gs::load_charts_dir(charts_dir, selections);
      auto out = gs::participant_examples(charts, selections);
      auto neg = gs::synthesize_negatives(charts, selections);
      out.insert(out.end(), neg.begin(), neg.end());
      return out;
    }
    if (oracle_charts > 0) return gs::oracle_dataset(oracle_charts, seed);
    throw std::runtime_error("no examples: pass --examples, --selections with --charts-dir, or --oracle-charts");
  }
};

struct SpecArgs {
  std::string kind = "tree";
  int max_depth = gs::kDefaultMaxDepth;
  std::vector<std::string> features;
  std::vector<std::string> exclude;
  double vif = 5.0;

  void attach(CLI::App* app) {
    app->add_option("--kind", kind, "tree | logistic | cascade | size_routed")->capture_default_str();
    app->add_option("--max-depth", max_depth, "Tree depth limit")->capture_default_str();
    app->add_option("--features", features, "Restrict to these features");
    app->add_option("--exclude", exclude, "Remove these features (e.g. slope)");
    app->add_option("--vif", vif, "VIF pruning threshold for logistic models")->capture_default_str();
  }

  gs::ModelSpec spec() const {
    gs::ModelSpec s;
    if (kind == "tree") {
      s.kind = gs::ModelKind::kTree;
    } else if (kind == "logistic") {
      s.kind = gs::ModelKind::kLogistic;
    } else if (kind == "cascade") {
      s.kind = gs::ModelKind::kCascade;
    } else if (kind == "size_routed" || kind == "size-routed") {
      s.kind = gs::ModelKind::kSizeRouted;
    } else {
      throw std::runtime_error("unknown model kind '" + kind + "'");
    }
    s.max_depth = max_depth;
    s.vif_threshold = vif;
    auto parse = [](const std::string& name) {
      auto f = gs::feature_from_name(name);
      if (!f) throw gs::Error(gs::ErrorCode::kUnknownFeature, "unknown feature '" + name + "'");
      return *f;
    };
    if (!features.empty()) {
      s.policy = gs::FeatureSet{};
      for (const auto& n : features) s.policy.insert(parse(n));
    }
    for (const auto& n : exclude) s.policy.erase(parse(n));
    return s;
  }
};

gs::ModelPtr load_model_arg(const std::string& path) {
  if (path.empty() || path == gs::kDefaultModelId) return std::shared_ptr<const gs::GroupingModel>(&gs::default_model(), [](auto*) {});
  return std::make_shared<const gs::GroupingModel>(gs::load_model(gs::read_json_file(path)));
}

std::vector<gs::Group> load_groups_arg(const std::string& path) {
  if (path.empty()) return {};
  return gs::groups_from_json(gs::read_json_file(path));
}

gs::Group parse_group(const std::string& text) {
  std::vector<std::string> members;
  std::stringstream in(text);
  for (std::string label; std::getline(in, label, ',');) members.push_back(label);
  return gs::Group(std::move(members));
}

void emit(const gs::Json& doc, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << doc.dump(2) << '\n';
}

gs::DiagnoseOptions diagnose_args(CLI::App* app, gs::DiagnoseOptions& o) {
  app->add_option("--threshold", o.threshold, "Detection threshold")->capture_default_str();
  app->add_option("--epsilon-line", o.epsilon_line, "Co-linearity error bound in px")->capture_default_str();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"groupsense: predict, diagnose and redesign perceptual groupings in dot plots"};
  app.require_subcommand(1);
  std::string out_path;

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir;
  unsigned threads = 0;
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--data-dir", data_dir, "Store directory (default: $GROUPSENSE_DATA_DIR or ./groupsense-data)");
  serve->add_option("--threads", threads, "Redesign worker threads (0 = all cores)");

  // train
  auto* train = app.add_subcommand("train", "Fit a grouping model");
  ExampleArgs train_ex;
  SpecArgs train_spec;
  bool train_default = false;
  std::string model_id;
  train_ex.attach(train);
  train_spec.attach(train);
  train->add_flag("--default-recipe", train_default, "Reproduce the shipped default model");
  train->add_option("--model-id", model_id, "metadata.model_id for the output");
  train->add_option("-o,--out", out_path, "Output model JSON (default stdout)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a model, or cross-validate a model spec");
  ExampleArgs eval_ex;
  SpecArgs eval_spec;
  std::string eval_model;
  std::size_t cv = 0;
  bool holdout = false;
  eval_ex.attach(evaluate);
  eval_spec.attach(evaluate);
  evaluate->add_option("--model", eval_model, "Model JSON to score");
  evaluate->add_option("--cv", cv, "Run k-fold stratified cross-validation of the spec instead");
  evaluate->add_flag("--holdout", holdout, "Train the spec on the 70% split and score the 10% holdout");

  // shap
  auto* shap = app.add_subcommand("shap", "Exact SHAP attribution for one group");
  std::string shap_model, shap_chart, shap_group;
  ExampleArgs shap_bg;
  shap->add_option("--model", shap_model, "Model JSON (default: built-in)");
  shap->add_option("--chart", shap_chart, "Chart JSON")->required();
  shap->add_option("--group", shap_group, "Comma-separated labels")->required();
  shap_bg.attach(shap);

  // synth-negatives
  auto* synth = app.add_subcommand("synth-negatives", "Emit synthetic negatives for participant selections");
  std::string synth_sel, synth_dir;
  synth->add_option("--selections", synth_sel, "Selections CSV")->required();
  synth->add_option("--charts-dir", synth_dir, "Chart JSON directory")->required();
  synth->add_option("-o,--out", out_path, "Output examples CSV (default stdout)");

  // corr
  auto* corr = app.add_subcommand("corr", "Pairwise feature correlation matrix");
  ExampleArgs corr_ex;
  corr_ex.attach(corr);

  // oracle-data
  auto* oracle = app.add_subcommand("oracle-data", "Write oracle-labeled examples as CSV");
  std::size_t oracle_charts = 100;
  std::uint64_t oracle_seed = 0;
  oracle->add_option("--charts", oracle_charts, "Random 6-point charts")->capture_default_str();
  oracle->add_option("--seed", oracle_seed, "Seed")->capture_default_str();
  oracle->add_option("-o,--out", out_path, "Output CSV (default stdout)");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "List perceived groups and flag violations");
  std::string diag_chart, diag_desired, diag_model;
  gs::DiagnoseOptions diag_opts;
  diag->add_option("--chart", diag_chart, "Chart JSON")->required();
  diag->add_option("--desired", diag_desired, "Desired groups JSON ([[\"A\",\"B\"],...])");
  diag->add_option("--model", diag_model, "Model JSON (default: built-in)");
  diagnose_args(diag, diag_opts);

  // redesign / landscape
  auto* red = app.add_subcommand("redesign", "Rank x-axis orders by the accentuate/break score");
  auto* land = app.add_subcommand("landscape", "Distribution of orders over (violations, desired met)");
  std::string red_chart, red_desired, red_model;
  gs::RedesignOptions red_opts;
  bool red_landscape = false;
  for (auto* sub : {red, land}) {
    sub->add_option("--chart", red_chart, "Chart JSON")->required();
    sub->add_option("--desired", red_desired, "Desired groups JSON");
    sub->add_option("--model", red_model, "Model JSON (default: built-in)");
    sub->add_option("--threads", red_opts.threads, "Worker threads (0 = all cores)");
    diagnose_args(sub, red_opts.diagnose);
  }
  red->add_option("--alpha", red_opts.alpha, "Weight of desired groups vs violations")->capture_default_str();
  red->add_option("-k", red_opts.k, "Number of orders to return")->capture_default_str();
  red->add_flag("--landscape", red_landscape, "Include the landscape matrix");

  // random-chart
  auto* rnd = app.add_subcommand("random-chart", "Generate a seeded random chart");
  int rnd_n = 6;
  std::uint64_t rnd_seed = 0;
  rnd->add_option("-n", rnd_n, "Points")->capture_default_str();
  rnd->add_option("--seed", rnd_seed, "Seed")->capture_default_str();

  // features
  auto* feat = app.add_subcommand("features", "Geometric features of a group");
  std::string feat_chart, feat_group;
  feat->add_option("--chart", feat_chart, "Chart JSON")->required();
  feat->add_option("--group", feat_group, "Comma-separated labels")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      gs::ApiOptions options;
      if (!data_dir.empty()) {
        options.data_dir = data_dir;
      } else if (const char* env = std::getenv("GROUPSENSE_DATA_DIR"); env && *env) {
        options.data_dir = env;
      }
      options.threads = threads;
      gs::Api api(options);
      gs::serve(api, host, port);
    } else if (train->parsed()) {
      if (train_default) {
        emit(gs::save_model(gs::train_default_model()), out_path);
      } else {
        const auto examples = train_ex.load();
        gs::GroupingModel::Metadata meta;
        if (!model_id.empty()) meta["model_id"] = model_id;
        emit(gs::save_model(gs::fit_model(train_spec.spec(), gs::split_dataset(examples, train_ex.seed).train, meta)),
             out_path);
      }
    } else if (evaluate->parsed()) {
      const auto examples = eval_ex.load();
      if (cv > 0) {
        emit(gs::eval_to_json(gs::cross_validate(eval_spec.spec(), examples, cv, eval_ex.seed)), "");
      } else if (holdout) {
        const auto split = gs::split_dataset(examples, eval_ex.seed);
        const auto model = gs::fit_model(eval_spec.spec(), split.train);
        emit(gs::eval_to_json(gs::evaluate(model, split.holdout)), "");
      } else {
        emit(gs::eval_to_json(gs::evaluate(*load_model_arg(eval_model), examples)), "");
      }
    } else if (shap->parsed()) {
      const gs::Chart chart = gs::chart_from_json(gs::read_json_file(shap_chart));
      const gs::Group group = parse_group(shap_group);
      gs::validate_group(chart, group, "/group");
      std::vector<gs::FeatureVector> background;
      if (shap_bg.examples_csv.empty() && shap_bg.selections_csv.empty() && shap_bg.oracle_charts == 0)
        shap_bg.oracle_charts = 20;
      for (const auto& e : shap_bg.load()) background.push_back(e.features);
      const auto model = load_model_arg(shap_model);
      emit(gs::shap_to_json(
               gs::shap_exact(*model, gs::feature_vector(chart, group), group.size(), chart.size(), background)),
           "");
    } else if (synth->parsed()) {
      std::ifstream in(synth_sel);
      if (!in) throw std::runtime_error("cannot open " + synth_sel);
      const auto selections = gs::read_selections_csv(in);
      const auto negatives = gs::synthesize_negatives(gs::load_charts_dir(synth_dir, selections), selections);
      if (out_path.empty() || out_path == "-") {
        gs::write_examples_csv(std::cout, negatives);
      } else {
        std::ofstream out(out_path);
        gs::write_examples_csv(out, negatives);
      }
    } else if (corr->parsed()) {
      emit(gs::correlation_to_json(gs::correlation_matrix(corr_ex.load())), "");
    } else if (oracle->parsed()) {
      const auto examples = gs::oracle_dataset(oracle_charts, oracle_seed);
      if (out_path.empty() || out_path == "-") {
        gs::write_examples_csv(std::cout, examples);
      } else {
        std::ofstream out(out_path);
        gs::write_examples_csv(out, examples);
      }
    } else if (diag->parsed()) {
      const gs::Chart chart = gs::chart_from_json(gs::read_json_file(diag_chart));
      const auto desired = load_groups_arg(diag_desired);
      emit(gs::report_to_json(gs::diagnose(chart, desired, *load_model_arg(diag_model), diag_opts, diag_chart)), "");
    } else if (red->parsed() || land->parsed()) {
      const gs::Chart chart = gs::chart_from_json(gs::read_json_file(red_chart));
      const auto desired = load_groups_arg(red_desired);
      const auto model = load_model_arg(red_model);
      if (land->parsed()) {
        emit(gs::landscape_to_json(gs::landscape(chart, desired, *model, red_opts)), "");
      } else {
        red_opts.include_landscape = red_landscape;
        const auto result = gs::redesign(chart, desired, *model, red_opts);
        emit(gs::redesign_to_json(result, gs::count_valid_permutations(chart)), "");
      }
    } else if (rnd->parsed()) {
      emit(gs::chart_to_json(gs::generate_random_chart(rnd_n, rnd_seed)), "");
    } else if (feat->parsed()) {
      const gs::Chart chart = gs::chart_from_json(gs::read_json_file(feat_chart));
      emit(gs::features_to_json(gs::feature_vector(chart, parse_group(feat_group))), "");
    }
  } catch (const gs::Error& e) {
    std::cerr << gs::error_to_json(e).dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
