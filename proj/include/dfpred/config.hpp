#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dfpred {

/// Flat key=value configuration with INI-style [section] prefixes.
/// Section keys flatten to "section.key". '#' starts a comment.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::filesystem::path& path);
  static KeyValueConfig parse_string(std::string_view text, std::string_view origin = "<string>");

  void set(std::string key, std::string value);
  /// Applies "key=value" override strings (e.g. from --set flags).
  void apply_override(std::string_view assignment);

  bool has(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::string get_string(std::string_view key, std::string_view fallback) const;
  double get_double(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  std::uint64_t get_uint(std::string_view key, std::uint64_t fallback) const;

  /// Sorted list of keys, optionally restricted to a "section." prefix.
  std::vector<std::string> keys(std::string_view prefix = {}) const;
  /// Distinct subsection names under "prefix.", in sorted order.
  std::vector<std::string> subsections(std::string_view prefix) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace dfpred
