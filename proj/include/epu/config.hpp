#pragma once

// Plain-text run configuration: one `key = value` per line, `#` starts a
// comment, and range keys may repeat to append values, e.g.
//
//   levels = 0, 1, 2
//   N = 4..200 step 4
//   N = 300
//   k = 1..3
//
// Parse errors carry the offending line number.

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "epu/errors.hpp"

namespace epu {

/// Malformed configuration text or a missing or invalid key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static Config parse(std::string_view text) {
    Config c;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) {
        if (end == text.size()) break;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("line " + std::to_string(line_no) + ": expected `key = value`");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      c.entries_[key].push_back({value, line_no});
      if (end == text.size()) break;
    }
    return c;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
  }

  /// Every occurrence of a key, in file order.
  const std::vector<Entry>& all(const std::string& key) const {
    static const std::vector<Entry> none;
    auto it = entries_.find(key);
    return it == entries_.end() ? none : it->second;
  }

  /// The single value of a non-repeatable key.
  std::optional<Entry> single(const std::string& key) const {
    const auto& v = all(key);
    if (v.empty()) return std::nullopt;
    if (v.size() > 1)
      throw ConfigError("line " + std::to_string(v[1].line) + ": key `" + key + "` may appear only once");
    return v.front();
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto e = single(key);
    return e ? e->value : fallback;
  }

  double get_double(const std::string& key, double fallback) const {
    auto e = single(key);
    return e ? parse_double(e->value, e->line) : fallback;
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    auto e = single(key);
    return e ? parse_int(e->value, e->line) : fallback;
  }

  /// Comma-separated integers from the single occurrence of `key`.
  std::optional<std::vector<std::int64_t>> get_int_list(const std::string& key) const {
    auto e = single(key);
    if (!e) return std::nullopt;
    std::vector<std::int64_t> out;
    for (const auto& item : split(e->value, ','))
      out.push_back(parse_int(item, e->line));
    return out;
  }

  /// Union of every occurrence of a range key, in file order. Each
  /// occurrence is a comma list whose items are `a`, `a..b` or
  /// `a..b step s`; the result may be empty (for instance `N = 5..4`).
  std::optional<std::vector<std::int64_t>> get_range(const std::string& key) const {
    const auto& v = all(key);
    if (v.empty()) return std::nullopt;
    std::vector<std::int64_t> out;
    for (const auto& e : v)
      for (const auto& item : split(e.value, ',')) append_range(item, e.line, out);
    return out;
  }

  /// Reject keys outside `allowed`, reporting the first offender's line.
  void require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [k, v] : entries_) {
      bool ok = false;
      for (const auto& a : allowed) ok = ok || a == k;
      if (!ok) throw ConfigError("line " + std::to_string(v.front().line) + ": unknown key `" + k + "`");
    }
  }

  static std::int64_t parse_int(std::string_view s, int line) {
    s = trim(s);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
      throw ConfigError("line " + std::to_string(line) + ": `" + std::string(s) + "` is not an integer");
    return v;
  }

  static double parse_double(std::string_view s, int line) {
    s = trim(s);
    const std::string str(s);
    std::istringstream in(str);
    in.imbue(std::locale::classic());
    double v = 0.0;
    in >> v;
    if (str.empty() || in.fail() || !in.eof())
      throw ConfigError("line " + std::to_string(line) + ": `" + str + "` is not a number");
    return v;
  }

 private:
  static std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  }

  static std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
      const auto next = s.find(sep, pos);
      out.emplace_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    return out;
  }

  static void append_range(std::string_view item, int line, std::vector<std::int64_t>& out) {
    item = trim(item);
    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(parse_int(item, line));
      return;
    }
    const std::int64_t lo = parse_int(item.substr(0, dots), line);
    std::string_view rest = trim(item.substr(dots + 2));
    std::int64_t step = 1;
    if (const auto st = rest.find("step"); st != std::string_view::npos) {
      step = parse_int(rest.substr(st + 4), line);
      rest = trim(rest.substr(0, st));
      if (step <= 0) throw ConfigError("line " + std::to_string(line) + ": step must be positive");
    }
    const std::int64_t hi = parse_int(rest, line);
    for (std::int64_t x = lo; x <= hi; x += step) out.push_back(x);
  }

  std::map<std::string, std::vector<Entry>> entries_;
};

/// 64-bit FNV-1a, used to fingerprint configuration text in output headers.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace epu
