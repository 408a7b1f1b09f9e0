#include "groupsense/store.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "groupsense/error.hpp"

namespace groupsense {

namespace fs = std::filesystem;

std::string content_id(const Json& doc) {
  const std::string bytes = doc.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < 8 && i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

bool is_safe_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '_' || c == '.';
  });
}

FileStore::FileStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path FileStore::path_for(std::string_view collection, std::string_view id) const {
  if (!is_safe_id(id)) throw Error(ErrorCode::kNotFound, "invalid id '" + std::string(id) + "'");
  return root_ / std::string(collection) / (std::string(id) + ".json");
}

std::mutex& FileStore::key_mutex(std::string_view collection, std::string_view id) const {
  const std::string key = std::string(collection) + "/" + std::string(id);
  std::lock_guard lock(table_mu_);
  auto& slot = key_mu_[key];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::string FileStore::put(std::string_view collection, const Json& doc) {
  std::string id = content_id(doc);
  put_with_id(collection, id, doc);
  return id;
}

void FileStore::put_with_id(std::string_view collection, std::string_view id, const Json& doc) {
  const fs::path target = path_for(collection, id);
  std::lock_guard lock(key_mutex(collection, id));
  fs::create_directories(target.parent_path());
  static std::atomic<unsigned long> counter{0};
  const fs::path tmp = target.parent_path() /
                       ("." + std::string(id) + ".tmp" + std::to_string(counter.fetch_add(1)));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::optional<Json> FileStore::get(std::string_view collection, std::string_view id) const {
  if (!is_safe_id(id)) return std::nullopt;
  const fs::path target = path_for(collection, id);
  std::lock_guard lock(key_mutex(collection, id));
  std::ifstream in(target);
  if (!in) return std::nullopt;
  return read_json(in);
}

std::vector<std::string> FileStore::list(std::string_view collection) const {
  std::vector<std::string> out;
  const fs::path dir = root_ / std::string(collection);
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.front() != '.' && entry.path().extension() == ".json") {
      out.push_back(entry.path().stem().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool FileStore::remove(std::string_view collection, std::string_view id) {
  if (!is_safe_id(id)) return false;
  const fs::path target = path_for(collection, id);
  std::lock_guard lock(key_mutex(collection, id));
  return fs::remove(target);
}

}  // namespace groupsense
