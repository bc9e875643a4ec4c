#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tunnel {

/// Scalar or bracketed list; lists may nest.
struct ConfigValue {
  bool is_list = false;
  std::string scalar;
  std::vector<ConfigValue> items;
};

/// Flat `section.key = value` configuration.
///
///   # comment to end of line
///   barrier.kind = rectangular
///   run.times = [100, 200, 400]
///   barrier.segments = [[0, 1, 2], [1, 2, 0.5]]
///
/// Keys need at least one dot and may repeat only once. Scalars may be
/// double-quoted. Accessors throw ConfigurationError naming the key; parse
/// throws ParseError with the line number.
class Config {
public:
  static Config parse(std::string_view text, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  const ConfigValue& value(const std::string& key) const;

  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::vector<double>> tuples(const std::string& key) const;

  std::vector<std::string> keys() const;
  /// Keys never read through an accessor.
  std::vector<std::string> unused() const;

private:
  struct Entry {
    ConfigValue value;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
  std::string source_;
};

} // namespace tunnel
