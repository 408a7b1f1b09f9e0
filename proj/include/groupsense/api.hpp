#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "groupsense/json_io.hpp"
#include "groupsense/model.hpp"
#include "groupsense/redesign.hpp"
#include "groupsense/store.hpp"

namespace groupsense {

struct ApiRequest {
  std::string method;  // GET, POST, DELETE
  std::string path;    // e.g. /api/charts/abc
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // compact JSON
};

/// Receives (examined, total) while a redesign or landscape search runs.
using ProgressSink = std::function<void(std::uint64_t, std::uint64_t)>;

struct ApiOptions {
  std::filesystem::path data_dir = "groupsense-data";
  unsigned threads = 0;
  std::uint64_t budget = kDefaultPermutationBudget;
};

/// HTTP status for an engine error code.
int http_status(ErrorCode code);

/// Transport-free request handling. Every computing endpoint forwards to the
/// matching library call; the API only resolves ids, parses, and serializes.
class Api {
 public:
  explicit Api(ApiOptions options = {});

  ApiResponse handle(const ApiRequest& request, const ProgressSink& progress = {});

  const FileStore& store() const { return store_; }
  static constexpr const char* kBuiltinModelId = "default-v1";

 private:
  Json route(const ApiRequest& request, int& status, const ProgressSink& progress);

  Json create_chart(const Json& body, int& status);
  Json random_chart(const std::map<std::string, std::string>& query, int& status);
  Json list(std::string_view collection) const;
  Json get(std::string_view collection, const std::string& id) const;
  Json delete_chart(const std::string& id);
  Json create_model(const Json& body, int& status);
  Json list_models() const;
  Json delete_model(const std::string& id);
  Json create_session(const Json& body, int& status);
  Json diagnose(const Json& body);
  Json redesign(const Json& body, const ProgressSink& progress);
  Json landscape(const Json& body, const ProgressSink& progress);

  Chart resolve_chart(const Json& body, std::string& chart_id) const;
  ModelPtr resolve_model(const std::string& id);
  Json merged_with_session(const Json& body) const;

  ApiOptions options_;
  FileStore store_;
  std::mutex models_mu_;
  std::map<std::string, ModelPtr, std::less<>> models_;
  // Serializes model deletion against session creation.
  std::mutex refs_mu_;
};

}  // namespace groupsense
