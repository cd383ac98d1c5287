#include "dfpred/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "dfpred/errors.hpp"

namespace dfpred {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path.string());
}

KeyValueConfig KeyValueConfig::parse_string(std::string_view text, std::string_view origin) {
  KeyValueConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw DataError(std::string(origin) + ":" + std::to_string(line_no) +
                        ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw DataError(std::string(origin) + ":" + std::to_string(line_no) +
                      ": expected key = value");
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty())
      throw DataError(std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    cfg.values_[key] = value;
  }
  return cfg;
}

void KeyValueConfig::set(std::string key, std::string value) {
  values_[std::move(key)] = std::move(value);
}

void KeyValueConfig::apply_override(std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw UsageError("override must be key=value, got: " + std::string(assignment));
  set(std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))));
}

bool KeyValueConfig::has(std::string_view key) const {
  return values_.find(std::string(key)) != values_.end();
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(std::string_view key, std::string_view fallback) const {
  auto v = get(key);
  return v ? *v : std::string(fallback);
}

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    double out = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("");
    return out;
  } catch (const std::exception&) {
    throw DataError("config key " + std::string(key) + ": not a number: " + *v);
  }
}

std::int64_t KeyValueConfig::get_int(std::string_view key, std::int64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size())
    throw DataError("config key " + std::string(key) + ": not an integer: " + *v);
  return out;
}

std::uint64_t KeyValueConfig::get_uint(std::string_view key, std::uint64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size())
    throw DataError("config key " + std::string(key) + ": not an unsigned integer: " + *v);
  return out;
}

std::vector<std::string> KeyValueConfig::keys(std::string_view prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, _] : values_)
    if (k.starts_with(prefix)) out.push_back(k);
  return out;
}

std::vector<std::string> KeyValueConfig::subsections(std::string_view prefix) const {
  std::set<std::string> names;
  const std::string full = std::string(prefix) + ".";
  for (const auto& [k, _] : values_) {
    if (!k.starts_with(full)) continue;
    const std::size_t dot = k.find('.', full.size());
    if (dot != std::string::npos) names.insert(k.substr(full.size(), dot - full.size()));
  }
  return {names.begin(), names.end()};
}

}  // namespace dfpred
