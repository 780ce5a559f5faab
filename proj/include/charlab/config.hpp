#pragma once

// Flat key-value configuration: one `section.key = value` per line, `#`
// starts a comment.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "charlab/arith.hpp"

namespace charlab {

class Config {
 public:
  static Config parse(std::string_view text, const std::string& origin = "<string>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& entries() const { return values_; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  u64 u(const std::string& key) const;
  u64 u(const std::string& key, u64 fallback) const;
  i64 i(const std::string& key, i64 fallback) const;
  double real(const std::string& key, double fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  // Comma-separated integers.
  std::vector<u64> list(const std::string& key) const;
  // "n", "a..b" or "a,b,c"
  std::vector<unsigned> levels(const std::string& key, unsigned fallback) const;

  // Throws ConfigError naming the first key not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace charlab
