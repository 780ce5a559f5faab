#include "charlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "charlab/error.hpp"

namespace charlab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_key(const std::string& k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
  });
}

template <class T>
T number(const std::string& key, const std::string& text) {
  T v{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorKind::ConfigError, key + ": not a number: '" + text + "'");
  return v;
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& origin) {
  Config cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  for (unsigned lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(ErrorKind::ConfigError, where + ": expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (!valid_key(key)) throw Error(ErrorKind::ConfigError, where + ": bad key '" + key + "'");
    if (cfg.has(key)) throw Error(ErrorKind::ConfigError, where + ": duplicate key '" + key + "'");
    cfg.values_.emplace(std::move(key), std::move(value));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::string Config::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::ConfigError, "missing key " + key);
  return it->second;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

u64 Config::u(const std::string& key) const { return number<u64>(key, str(key)); }
u64 Config::u(const std::string& key, u64 fallback) const { return has(key) ? u(key) : fallback; }
i64 Config::i(const std::string& key, i64 fallback) const { return has(key) ? number<i64>(key, str(key)) : fallback; }
double Config::real(const std::string& key, double fallback) const {
  return has(key) ? number<double>(key, str(key)) : fallback;
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto v = str(key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw Error(ErrorKind::ConfigError, key + ": expected true or false, got '" + v + "'");
}

std::vector<u64> Config::list(const std::string& key) const {
  std::vector<u64> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number<u64>(key, trim(item)));
  if (out.empty()) throw Error(ErrorKind::ConfigError, key + ": empty list");
  return out;
}

std::vector<unsigned> Config::levels(const std::string& key, unsigned fallback) const {
  if (!has(key)) return {fallback};
  const auto v = str(key);
  std::vector<unsigned> out;
  if (const auto dots = v.find(".."); dots != std::string::npos) {
    const auto a = number<unsigned>(key, trim(v.substr(0, dots)));
    const auto b = number<unsigned>(key, trim(v.substr(dots + 2)));
    if (a == 0 || b < a) throw Error(ErrorKind::ConfigError, key + ": bad range '" + v + "'");
    for (unsigned n = a; n <= b; ++n) out.push_back(n);
  } else {
    for (u64 n : list(key)) {
      if (n == 0) throw Error(ErrorKind::ConfigError, key + ": levels start at 1");
      out.push_back(static_cast<unsigned>(n));
    }
  }
  return out;
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (!allowed.count(k)) throw Error(ErrorKind::ConfigError, "unknown key " + k);
  }
}

}  // namespace charlab
