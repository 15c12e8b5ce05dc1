#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace learnpath {

struct ConfigKey {
  std::string key;
  std::string default_value;
  std::string help;
};

// Flat key=value configuration checked against a fixed schema. Lines may hold
// comments after '#'. Later assignments win, so flag overrides applied after
// the file take precedence.
class ExperimentConfig {
 public:
  explicit ExperimentConfig(std::vector<ConfigKey> schema);

  void load_text(const std::string& text, const std::string& source);
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value, const std::string& source);
  // "key=value"
  void apply_override(const std::string& assignment, const std::string& source);

  const std::string& raw(const std::string& key) const;
  double get_double(const std::string& key) const;
  double get_positive(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  const std::vector<ConfigKey>& schema() const { return schema_; }
  // Key → effective value, in schema order.
  std::vector<std::pair<std::string, std::string>> entries() const;

 private:
  struct Slot {
    std::string value;
    std::string origin;  // "default", "file:line" or "flag"
  };
  [[noreturn]] void bad_value(const std::string& key, const std::string& expected) const;
  const Slot& slot(const std::string& key) const;

  std::vector<ConfigKey> schema_;
  std::map<std::string, Slot> values_;
};

}  // namespace learnpath
