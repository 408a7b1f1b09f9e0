#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groupsense/json_io.hpp"

namespace groupsense {

/// First 16 hex digits of SHA-256 over the document's compact serialization.
std::string content_id(const Json& doc);

/// True for ids made of [A-Za-z0-9_.-] that cannot escape the store root.
bool is_safe_id(std::string_view id);

/// JSON documents under <root>/<collection>/<id>.json. Writes go to a temp
/// file that is renamed into place; each key has a single writer at a time.
class FileStore {
 public:
  explicit FileStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Stores under content_id(doc) and returns the id. Idempotent.
  std::string put(std::string_view collection, const Json& doc);
  void put_with_id(std::string_view collection, std::string_view id, const Json& doc);
  std::optional<Json> get(std::string_view collection, std::string_view id) const;
  /// Ids in lexicographic order.
  std::vector<std::string> list(std::string_view collection) const;
  bool remove(std::string_view collection, std::string_view id);

 private:
  std::filesystem::path path_for(std::string_view collection, std::string_view id) const;
  std::mutex& key_mutex(std::string_view collection, std::string_view id) const;

  std::filesystem::path root_;
  mutable std::mutex table_mu_;
  mutable std::map<std::string, std::unique_ptr<std::mutex>, std::less<>> key_mu_;
};

}  // namespace groupsense
