#include "tunnel/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tunnel/errors.hpp"

namespace tunnel {
namespace {

class LineParser {
public:
  LineParser(std::string_view text, std::string where) : text_(text), where_(std::move(where)) {}

  ConfigValue value() {
    skip_space();
    if (peek() == '[') return list();
    return scalar();
  }

  void finish() {
    skip_space();
    if (pos_ < text_.size()) fail("unexpected text after value");
  }

private:
  ConfigValue list() {
    ++pos_;
    ConfigValue v;
    v.is_list = true;
    skip_space();
    if (peek() == ']') {
      ++pos_;
      return v;
    }
    while (true) {
      v.items.push_back(value());
      skip_space();
      const char c = peek();
      ++pos_;
      if (c == ']') return v;
      if (c != ',') fail("expected ',' or ']' in list");
    }
  }

  ConfigValue scalar() {
    ConfigValue v;
    if (peek() == '"') {
      const auto close = text_.find('"', pos_ + 1);
      if (close == std::string_view::npos) fail("unterminated string");
      v.scalar = std::string(text_.substr(pos_ + 1, close - pos_ - 1));
      pos_ = close + 1;
      return v;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '[') ++pos_;
    std::string_view raw = text_.substr(start, pos_ - start);
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
    if (raw.empty()) fail("empty value");
    v.scalar = std::string(raw);
    return v;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(where_ + ": " + what); }

  std::string_view text_;
  std::string where_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view key) {
  if (key.empty() || key.front() == '.' || key.back() == '.' || key.find("..") != std::string_view::npos) {
    return false;
  }
  if (key.find('.') == std::string_view::npos) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  }
  return true;
}

// Strips a trailing comment outside double quotes.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

double to_number(const std::string& key, const ConfigValue& v) {
  if (v.is_list) throw ConfigurationError(key + ": expected a number, found a list");
  double out = 0.0;
  const char* first = v.scalar.data();
  const char* last = first + v.scalar.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigurationError(key + ": '" + v.scalar + "' is not a number");
  return out;
}

} // namespace

Config Config::parse(std::string_view text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    ++line_no;
    const std::string_view line = trim(strip_comment(text.substr(start, end - start)));
    start = end + 1;
    if (line.empty()) continue;

    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(where + ": expected 'section.key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ParseError(where + ": invalid key '" + key + "' (expected section.key)");
    if (cfg.entries_.count(key)) throw ParseError(where + ": duplicate key '" + key + "'");

    LineParser parser(line.substr(eq + 1), where);
    ConfigValue v = parser.value();
    parser.finish();
    cfg.entries_.emplace(key, Entry{std::move(v), line_no});
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

const ConfigValue& Config::value(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigurationError(key + ": required key is missing");
  used_.insert(key);
  return it->second.value;
}

std::string Config::string(const std::string& key) const {
  const ConfigValue& v = value(key);
  if (v.is_list) throw ConfigurationError(key + ": expected a scalar, found a list");
  return v.scalar;
}

std::string Config::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

double Config::number(const std::string& key) const { return to_number(key, value(key)); }

double Config::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

std::size_t Config::count(const std::string& key, std::size_t fallback) const {
  if (!has(key)) return fallback;
  const double v = number(key);
  if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ConfigurationError(key + ": expected a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = string(key);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigurationError(key + ": expected true or false");
}

std::vector<double> Config::numbers(const std::string& key) const {
  const ConfigValue& v = value(key);
  std::vector<double> out;
  if (!v.is_list) {
    out.push_back(to_number(key, v));
    return out;
  }
  for (std::size_t i = 0; i < v.items.size(); ++i) {
    out.push_back(to_number(key + "[" + std::to_string(i) + "]", v.items[i]));
  }
  return out;
}

std::vector<std::vector<double>> Config::tuples(const std::string& key) const {
  const ConfigValue& v = value(key);
  if (!v.is_list) throw ConfigurationError(key + ": expected a list of lists");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.items.size(); ++i) {
    const std::string item_key = key + "[" + std::to_string(i) + "]";
    const ConfigValue& item = v.items[i];
    if (!item.is_list) throw ConfigurationError(item_key + ": expected a list");
    std::vector<double> row;
    for (std::size_t j = 0; j < item.items.size(); ++j) {
      row.push_back(to_number(item_key + "[" + std::to_string(j) + "]", item.items[j]));
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, e] : entries_) out.push_back(k);
  return out;
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, e] : entries_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

} // namespace tunnel
