#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vharm {

/// Plain-text configuration: `key = value` lines grouped under `[section]`
/// headers, `#` comments. Order and line numbers are preserved for diagnostics.
struct KeyValueEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct KeyValueSection {
  std::string name;  // empty for the leading global block
  std::vector<KeyValueEntry> entries;
  int line = 0;

  const KeyValueEntry* find(const std::string& key) const;
  /// Throws ValidationError when the key is absent.
  const KeyValueEntry& require(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  long long require_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;
  /// Rejects keys outside the allowed set.
  void check_keys(const std::vector<std::string>& allowed) const;
};

struct KeyValueDocument {
  std::vector<KeyValueSection> sections;

  static KeyValueDocument parse(std::istream& in);
  static KeyValueDocument parse_file(const std::string& path);
  static KeyValueDocument parse_string(const std::string& text);

  const KeyValueSection* find(const std::string& name) const;
  void write(std::ostream& out) const;
  std::string to_string() const;
};

double parse_double(const KeyValueEntry& entry);
long long parse_int(const KeyValueEntry& entry);
std::vector<double> parse_list(const KeyValueEntry& entry);

}  // namespace vharm
