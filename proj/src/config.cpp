#include "learnpath/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "learnpath/error.hpp"

namespace learnpath {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

ExperimentConfig::ExperimentConfig(std::vector<ConfigKey> schema) : schema_(std::move(schema)) {
  for (const auto& k : schema_) values_[k.key] = {k.default_value, "default"};
}

void ExperimentConfig::load_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) {
      throw_error(ErrorCode::kConfigError, where + ": expected key = value, got '" + line + "'");
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }
}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::kConfigError, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path);
}

void ExperimentConfig::set(const std::string& key, const std::string& value, const std::string& source) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    std::string known;
    for (const auto& k : schema_) known += (known.empty() ? "" : ", ") + k.key;
    throw_error(ErrorCode::kConfigError, source + ": unknown key '" + key + "' (known keys: " + known + ")");
  }
  it->second = {value, source};
}

void ExperimentConfig::apply_override(const std::string& assignment, const std::string& source) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw_error(ErrorCode::kConfigError, source + ": expected key=value, got '" + assignment + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), source);
}

const ExperimentConfig::Slot& ExperimentConfig::slot(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw_error(ErrorCode::kConfigError, "internal: key '" + key + "' not in schema");
  return it->second;
}

void ExperimentConfig::bad_value(const std::string& key, const std::string& expected) const {
  const Slot& s = slot(key);
  throw_error(ErrorCode::kConfigError,
              s.origin + ": key '" + key + "' has value '" + s.value + "', expected " + expected);
}

const std::string& ExperimentConfig::raw(const std::string& key) const { return slot(key).value; }

double ExperimentConfig::get_double(const std::string& key) const {
  double x = 0.0;
  if (!parse_double(raw(key), x)) bad_value(key, "a finite number");
  return x;
}

double ExperimentConfig::get_positive(const std::string& key) const {
  const double x = get_double(key);
  if (!(x > 0.0)) bad_value(key, "a positive number");
  return x;
}

long long ExperimentConfig::get_int(const std::string& key) const {
  const std::string& s = raw(key);
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // allow integral scientific notation such as 1e6
    double d = 0.0;
    if (!parse_double(s, d) || d != std::floor(d) || std::abs(d) > 9e15) bad_value(key, "an integer");
    return static_cast<long long>(d);
  }
  return x;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key) const {
  const std::string& s = raw(key);
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, "an unsigned 64-bit integer");
  return x;
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  const std::string& s = raw(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad_value(key, "true or false");
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key))) {
    double x = 0.0;
    if (!parse_double(item, x)) bad_value(key, "a comma-separated list of numbers");
    out.push_back(x);
  }
  return out;
}

std::vector<std::string> ExperimentConfig::get_strings(const std::string& key) const {
  return split_list(raw(key));
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : schema_) out.emplace_back(k.key, slot(k.key).value);
  return out;
}

}  // namespace learnpath
