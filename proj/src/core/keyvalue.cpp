#include "vharm/keyvalue.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "vharm/errors.hpp"

namespace vharm {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

const KeyValueEntry* KeyValueSection::find(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

const KeyValueEntry& KeyValueSection::require(const std::string& key) const {
  if (const auto* e = find(key)) return *e;
  throw ValidationError(line, key, "missing required field in section [" + name + "]");
}

std::optional<std::string> KeyValueSection::get(const std::string& key) const {
  if (const auto* e = find(key)) return e->value;
  return std::nullopt;
}

double KeyValueSection::get_double(const std::string& key, double fallback) const {
  if (const auto* e = find(key)) return parse_double(*e);
  return fallback;
}

double KeyValueSection::require_double(const std::string& key) const { return parse_double(require(key)); }

long long KeyValueSection::require_int(const std::string& key) const { return parse_int(require(key)); }

long long KeyValueSection::get_int(const std::string& key, long long fallback) const {
  if (const auto* e = find(key)) return parse_int(*e);
  return fallback;
}

std::vector<double> KeyValueSection::get_list(const std::string& key, std::vector<double> fallback) const {
  if (const auto* e = find(key)) return parse_list(*e);
  return fallback;
}

void KeyValueSection::check_keys(const std::vector<std::string>& allowed) const {
  for (const auto& e : entries)
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
      throw ValidationError(e.line, e.key, "unknown field in section [" + name + "]");
}

double parse_double(const KeyValueEntry& e) {
  const std::string& v = e.value;
  if (v == "inf" || v == "+inf") return INFINITY;
  if (v == "-inf") return -INFINITY;
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE) throw ValidationError(e.line, e.key, "expected a number, got '" + v + "'");
  return d;
}

long long parse_int(const KeyValueEntry& e) {
  const std::string& v = e.value;
  char* end = nullptr;
  errno = 0;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE) throw ValidationError(e.line, e.key, "expected an integer, got '" + v + "'");
  return i;
}

std::vector<double> parse_list(const KeyValueEntry& e) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(e.value);
  while (std::getline(in, item, ',')) {
    KeyValueEntry piece{e.key, trim(item), e.line};
    if (piece.value.empty()) throw ValidationError(e.line, e.key, "empty list element");
    out.push_back(parse_double(piece));
  }
  if (out.empty()) throw ValidationError(e.line, e.key, "empty list");
  return out;
}

KeyValueDocument KeyValueDocument::parse(std::istream& in) {
  KeyValueDocument doc;
  doc.sections.push_back(KeyValueSection{"", {}, 1});
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ValidationError(line, text, "unterminated section header");
      const std::string name = trim(text.substr(1, text.size() - 2));
      if (name.empty()) throw ValidationError(line, text, "empty section name");
      doc.sections.push_back(KeyValueSection{name, {}, line});
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ValidationError(line, text, "expected 'key = value'");
    KeyValueEntry entry{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
    if (entry.key.empty()) throw ValidationError(line, text, "empty key");
    auto& section = doc.sections.back();
    if (section.find(entry.key)) throw ValidationError(line, entry.key, "duplicate field");
    section.entries.push_back(std::move(entry));
  }
  return doc;
}

KeyValueDocument KeyValueDocument::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open configuration file '" + path + "'");
  return parse(in);
}

KeyValueDocument KeyValueDocument::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

const KeyValueSection* KeyValueDocument::find(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

void KeyValueDocument::write(std::ostream& out) const {
  bool first = true;
  for (const auto& s : sections) {
    if (s.name.empty() && s.entries.empty()) continue;
    if (!first) out << '\n';
    first = false;
    if (!s.name.empty()) out << '[' << s.name << "]\n";
    for (const auto& e : s.entries) out << e.key << " = " << e.value << '\n';
  }
}

std::string KeyValueDocument::to_string() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace vharm
