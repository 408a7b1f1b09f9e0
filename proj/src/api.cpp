#include "groupsense/api.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <sstream>

#include "groupsense/default_model.hpp"
#include "groupsense/diagnose.hpp"
#include "groupsense/error.hpp"

namespace groupsense {

namespace {

constexpr std::string_view kCharts = "charts";
constexpr std::string_view kModels = "models";
constexpr std::string_view kSessions = "sessions";

[[noreturn]] void malformed(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kMalformedDocument, msg, path);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(sep, start), text.size());
    out.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

long long query_int(const std::string& text, const std::string& name) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) malformed("/" + name, "expected an integer");
  return v;
}

double query_double(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double v = 0;
  if (!(in >> v) || !in.eof()) malformed("/" + name, "expected a number");
  return v;
}

double opt_number(const Json& body, const char* key, double fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number()) malformed(std::string("/") + key, "expected a number");
  return it->get<double>();
}

std::string opt_string(const Json& body, const char* key, std::string fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_string()) malformed(std::string("/") + key, "expected a string");
  return it->get<std::string>();
}

bool opt_bool(const Json& body, const char* key, bool fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_boolean()) malformed(std::string("/") + key, "expected a boolean");
  return it->get<bool>();
}

Json body_object(const std::string& text) {
  if (text.empty()) return Json::object();
  Json doc = parse_json(text);
  if (!doc.is_object()) malformed("", "request body must be a JSON object");
  return doc;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

DiagnoseOptions diagnose_options(const Json& body) {
  DiagnoseOptions o;
  o.threshold = opt_number(body, "threshold", o.threshold);
  o.epsilon_line = opt_number(body, "epsilon_line", o.epsilon_line);
  return o;
}

// Landscape accepts query parameters as an alternative to a JSON body:
// desired=A,B;C,D and chart=<url-encoded chart JSON>.
Json landscape_query_body(const std::map<std::string, std::string>& query) {
  Json body = Json::object();
  for (const auto& [key, value] : query) {
    if (key == "chart_id" || key == "session_id" || key == "model_id") {
      body[key] = value;
    } else if (key == "threshold" || key == "epsilon_line") {
      body[key] = query_double(value, key);
    } else if (key == "chart") {
      body[key] = parse_json(value);
    } else if (key == "desired") {
      Json groups = Json::array();
      if (!value.empty()) {
        for (const auto& g : split(value, ';')) groups.push_back(split(g, ','));
      }
      body[key] = std::move(groups);
    } else {
      malformed("/" + key, "unknown query parameter '" + key + "'");
    }
  }
  return body;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedDocument:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    case ErrorCode::kBudgetExceeded:
      return 413;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvariantViolation:
    case ErrorCode::kUnknownFeature:
    case ErrorCode::kDepthViolation:
    case ErrorCode::kPolicyViolation:
    case ErrorCode::kUnsupportedVersion:
      return 422;
  }
  return 500;
}

Api::Api(ApiOptions options) : options_(std::move(options)), store_(options_.data_dir) {
  // The shipped model is always present under its well-known id.
  const Json doc = parse_json(default_model_document());
  if (store_.get(kModels, kBuiltinModelId) != doc) store_.put_with_id(kModels, kBuiltinModelId, doc);
}

ApiResponse Api::handle(const ApiRequest& request, const ProgressSink& progress) {
  ApiResponse out;
  try {
    out.body = route(request, out.status, progress).dump();
  } catch (const Error& e) {
    out.status = http_status(e.code());
    out.body = error_to_json(e).dump();
  } catch (const std::exception& e) {
    out.status = 500;
    out.body = Json{{"error", {{"code", "internal"}, {"message", e.what()}, {"path", ""}}}}.dump();
  }
  return out;
}

Json Api::route(const ApiRequest& req, int& status, const ProgressSink& progress) {
  status = 200;
  const std::vector<std::string> parts = split(req.path, '/');
  // parts[0] is empty because paths start with '/'.
  if (parts.size() < 3 || !parts[0].empty() || parts[1] != "api")
    throw Error(ErrorCode::kNotFound, "no route for " + req.path);
  const std::string& resource = parts[2];
  const std::size_t depth = parts.size();
  const std::string& m = req.method;
  auto method_not_allowed = [&]() -> Json {
    status = 405;
    return Json{{"error", {{"code", "method_not_allowed"}, {"message", m + " " + req.path}, {"path", ""}}}};
  };

  if (resource == "health" && depth == 3) return Json{{"status", "ok"}};

  if (resource == "charts") {
    if (depth == 3) {
      if (m == "GET") return list(kCharts);
      if (m == "POST") return create_chart(body_object(req.body), status);
      return method_not_allowed();
    }
    if (depth == 4 && parts[3] == "random") {
      if (m == "POST") return random_chart(req.query, status);
      return method_not_allowed();
    }
    if (depth == 4) {
      if (m == "GET") return get(kCharts, parts[3]);
      if (m == "DELETE") return delete_chart(parts[3]);
      return method_not_allowed();
    }
  }
  if (resource == "models") {
    if (depth == 3) {
      if (m == "GET") return list_models();
      if (m == "POST") return create_model(body_object(req.body), status);
      return method_not_allowed();
    }
    if (depth == 4) {
      if (m == "GET") return get(kModels, parts[3]);
      if (m == "DELETE") return delete_model(parts[3]);
      return method_not_allowed();
    }
  }
  if (resource == "sessions") {
    if (depth == 3) {
      if (m == "GET") return list(kSessions);
      if (m == "POST") return create_session(body_object(req.body), status);
      return method_not_allowed();
    }
    if (depth == 4) {
      if (m == "GET") return get(kSessions, parts[3]);
      return method_not_allowed();
    }
  }
  if (resource == "diagnose" && depth == 3) {
    if (m == "POST") return diagnose(body_object(req.body));
    return method_not_allowed();
  }
  if (resource == "redesign" && depth == 3) {
    if (m == "POST") return redesign(body_object(req.body), progress);
    return method_not_allowed();
  }
  if (resource == "redesign" && depth == 4 && parts[3] == "landscape") {
    if (m != "GET" && m != "POST") return method_not_allowed();
    Json body = body_object(req.body);
    if (!req.query.empty()) {
      const Json from_query = landscape_query_body(req.query);
      for (const auto& [k, v] : from_query.items()) body[k] = v;
    }
    return landscape(body, progress);
  }
  throw Error(ErrorCode::kNotFound, "no route for " + req.path);
}

Json Api::create_chart(const Json& body, int& status) {
  const Json doc = chart_to_json(chart_from_json(body));
  const std::string id = store_.put(kCharts, doc);
  status = 201;
  return {{"id", id}, {"chart", doc}};
}

Json Api::random_chart(const std::map<std::string, std::string>& query, int& status) {
  long long n = 6;
  long long seed = 0;
  for (const auto& [key, value] : query) {
    if (key == "n") {
      n = query_int(value, "n");
    } else if (key == "seed") {
      seed = query_int(value, "seed");
    } else {
      malformed("/" + key, "unknown query parameter '" + key + "'");
    }
  }
  if (n < 3 || n > static_cast<long long>(kMaxCandidatePoints))
    throw Error(ErrorCode::kInvalidArgument, "n must lie in [3, " + std::to_string(kMaxCandidatePoints) + "]", "/n");
  const Json doc = chart_to_json(generate_random_chart(static_cast<int>(n), static_cast<std::uint64_t>(seed)));
  const std::string id = store_.put(kCharts, doc);
  status = 201;
  return {{"id", id}, {"chart", doc}};
}

Json Api::list(std::string_view collection) const {
  Json items = Json::array();
  for (const auto& id : store_.list(collection)) items.push_back({{"id", id}});
  return {{std::string(collection), std::move(items)}};
}

Json Api::get(std::string_view collection, const std::string& id) const {
  auto doc = store_.get(collection, id);
  if (!doc) throw Error(ErrorCode::kNotFound, "unknown " + std::string(collection) + " id '" + id + "'", "/id");
  return *doc;
}

Json Api::delete_chart(const std::string& id) {
  if (!store_.remove(kCharts, id)) throw Error(ErrorCode::kNotFound, "unknown chart id '" + id + "'", "/id");
  return {{"deleted", id}};
}

Json Api::create_model(const Json& body, int& status) {
  const GroupingModel model = load_model(body);
  const Json doc = save_model(model);
  const std::string id = store_.put(kModels, doc);
  status = 201;
  return {{"id", id}, {"kind", to_string(model.kind())}};
}

Json Api::list_models() const {
  Json items = Json::array();
  for (const auto& id : store_.list(kModels)) {
    Json entry = {{"id", id}, {"builtin", id == kBuiltinModelId}};
    if (auto doc = store_.get(kModels, id); doc && doc->contains("kind")) entry["kind"] = (*doc)["kind"];
    items.push_back(std::move(entry));
  }
  return {{"models", std::move(items)}};
}

Json Api::delete_model(const std::string& id) {
  std::lock_guard lock(refs_mu_);
  if (id == kBuiltinModelId) throw Error(ErrorCode::kConflict, "the built-in model cannot be deleted", "/id");
  if (!store_.get(kModels, id)) throw Error(ErrorCode::kNotFound, "unknown model id '" + id + "'", "/id");
  for (const auto& sid : store_.list(kSessions)) {
    auto session = store_.get(kSessions, sid);
    if (session && session->value("model_id", "") == id)
      throw Error(ErrorCode::kConflict, "model '" + id + "' is referenced by session '" + sid + "'", "/id");
  }
  store_.remove(kModels, id);
  std::lock_guard models_lock(models_mu_);
  models_.erase(id);
  return {{"deleted", id}};
}

Json Api::create_session(const Json& body, int& status) {
  std::string chart_id;
  const Chart chart = resolve_chart(body, chart_id);
  const std::vector<Group> desired = groups_from_json(body.value("desired", Json::array()));
  for (std::size_t i = 0; i < desired.size(); ++i) validate_group(chart, desired[i], "/desired/" + std::to_string(i));
  const double alpha = opt_number(body, "alpha", RedesignOptions{}.alpha);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]", "/alpha");
  const double threshold = opt_number(body, "threshold", DiagnoseOptions{}.threshold);
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "threshold must lie in [0, 1]", "/threshold");
  const std::string model_id = opt_string(body, "model_id", kBuiltinModelId);

  std::lock_guard lock(refs_mu_);
  if (!store_.get(kModels, model_id))
    throw Error(ErrorCode::kNotFound, "unknown model id '" + model_id + "'", "/model_id");
  Json content = {{"chart", chart_to_json(chart)},
                  {"desired", groups_to_json(desired)},
                  {"alpha", alpha},
                  {"threshold", threshold},
                  {"model_id", model_id}};
  const std::string id = content_id(content);
  status = 201;
  // Content-addressed: an identical session returns the stored document.
  if (auto existing = store_.get(kSessions, id)) return *existing;
  const std::string now = utc_now();
  content["id"] = id;
  content["created"] = now;
  content["updated"] = now;
  store_.put_with_id(kSessions, id, content);
  return content;
}

Chart Api::resolve_chart(const Json& body, std::string& chart_id) const {
  if (auto it = body.find("chart"); it != body.end() && !it->is_null()) {
    Chart chart = chart_from_json(*it, "/chart");
    chart_id = opt_string(body, "chart_id", content_id(chart_to_json(chart)));
    return chart;
  }
  if (auto it = body.find("chart_id"); it != body.end()) {
    if (!it->is_string()) malformed("/chart_id", "expected a string");
    chart_id = it->get<std::string>();
    auto doc = store_.get(kCharts, chart_id);
    if (!doc) throw Error(ErrorCode::kNotFound, "unknown chart id '" + chart_id + "'", "/chart_id");
    return chart_from_json(*doc, "/chart");
  }
  malformed("/chart", "request needs 'chart' or 'chart_id'");
}

ModelPtr Api::resolve_model(const std::string& id) {
  {
    std::lock_guard lock(models_mu_);
    if (auto it = models_.find(id); it != models_.end()) return it->second;
  }
  auto doc = store_.get(kModels, id);
  if (!doc) throw Error(ErrorCode::kNotFound, "unknown model id '" + id + "'", "/model_id");
  auto model = std::make_shared<const GroupingModel>(load_model(*doc, "/model"));
  std::lock_guard lock(models_mu_);
  return models_.try_emplace(id, std::move(model)).first->second;
}

// Fields from a referenced session fill in whatever the request leaves out.
Json Api::merged_with_session(const Json& body) const {
  auto it = body.find("session_id");
  if (it == body.end() || it->is_null()) return body;
  if (!it->is_string()) malformed("/session_id", "expected a string");
  const std::string sid = it->get<std::string>();
  auto session = store_.get(kSessions, sid);
  if (!session) throw Error(ErrorCode::kNotFound, "unknown session id '" + sid + "'", "/session_id");
  Json merged = body;
  for (const char* key : {"desired", "alpha", "threshold", "model_id"}) {
    if (!merged.contains(key) && session->contains(key)) merged[key] = (*session)[key];
  }
  if (!merged.contains("chart") && !merged.contains("chart_id")) {
    merged["chart"] = (*session)["chart"];
    merged["chart_id"] = sid;
  }
  return merged;
}

Json Api::diagnose(const Json& raw) {
  const Json body = merged_with_session(raw);
  std::string chart_id;
  const Chart chart = resolve_chart(body, chart_id);
  const std::vector<Group> desired = groups_from_json(body.value("desired", Json::array()));
  const std::string model_id = opt_string(body, "model_id", kBuiltinModelId);
  const ModelPtr model = resolve_model(model_id);
  DiagnosisReport report = groupsense::diagnose(chart, desired, *model, diagnose_options(body), chart_id);
  report.model_version = model_id;
  return report_to_json(report);
}

Json Api::redesign(const Json& raw, const ProgressSink& progress) {
  const Json body = merged_with_session(raw);
  std::string chart_id;
  const Chart chart = resolve_chart(body, chart_id);
  const std::vector<Group> desired = groups_from_json(body.value("desired", Json::array()));
  const std::string model_id = opt_string(body, "model_id", kBuiltinModelId);
  const ModelPtr model = resolve_model(model_id);

  RedesignOptions o;
  o.alpha = opt_number(body, "alpha", o.alpha);
  const double k = opt_number(body, "k", static_cast<double>(o.k));
  if (!(k >= 1.0) || k != static_cast<double>(static_cast<std::size_t>(k)))
    throw Error(ErrorCode::kInvalidArgument, "k must be a positive integer", "/k");
  o.k = static_cast<std::size_t>(k);
  o.diagnose = diagnose_options(body);
  o.budget = options_.budget;
  o.threads = options_.threads;
  o.include_landscape = opt_bool(body, "include_landscape", false);
  if (auto it = body.find("allowed_orders"); it != body.end() && !it->is_null()) {
    try {
      o.allowed_orders = it->get<std::vector<LabelOrder>>();
    } catch (const Json::exception&) {
      malformed("/allowed_orders", "expected an array of label arrays");
    }
  }
  o.progress = progress;
  RedesignResult result = groupsense::redesign(chart, desired, *model, o);
  for (auto& s : result.top) {
    s.report.chart_id = chart_id;
    s.report.model_version = model_id;
  }
  const std::uint64_t total = o.allowed_orders ? result.examined : count_valid_permutations(chart);
  return redesign_to_json(result, total);
}

Json Api::landscape(const Json& raw, const ProgressSink& progress) {
  const Json body = merged_with_session(raw);
  std::string chart_id;
  const Chart chart = resolve_chart(body, chart_id);
  const std::vector<Group> desired = groups_from_json(body.value("desired", Json::array()));
  const ModelPtr model = resolve_model(opt_string(body, "model_id", kBuiltinModelId));
  RedesignOptions o;
  o.diagnose = diagnose_options(body);
  o.budget = options_.budget;
  o.threads = options_.threads;
  o.progress = progress;
  return landscape_to_json(groupsense::landscape(chart, desired, *model, o));
}

}  // namespace groupsense
