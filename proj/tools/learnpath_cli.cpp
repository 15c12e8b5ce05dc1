// Command-line front end. Talks to the library only through learnpath.h.
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "learnpath/learnpath.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitCriteriaFailed = 3;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { lp_string_free(p); }
};

int exit_code_for(lp_status s) {
  switch (s) {
    case LP_OK:
      return kExitOk;
    case LP_CONFIG_ERROR:
    case LP_IO_ERROR:
    case LP_FORMAT_ERROR:
    case LP_INVALID_INPUT:
      return kExitConfig;
    default:
      return kExitNumerical;
  }
}

int report_failure(const std::string& command, lp_status s) {
  std::cerr << "learnpath " << command << ": " << lp_last_error_message() << "\n";
  return exit_code_for(s);
}

struct Subcommand {
  std::string name;
  CLI::App* app = nullptr;
  std::string config_path;
  std::string out_dir;
  std::map<std::string, std::string> values;  // only keys given on the command line end up here
  std::vector<std::string> order;             // schema order
};

json fetch_json(lp_status (*fn)(char**)) {
  OwnedString s;
  if (fn(&s.p) != LP_OK) throw std::runtime_error(lp_last_error_message());
  return json::parse(s.p);
}

int run(Subcommand& sub) {
  std::vector<std::string> overrides;
  for (const auto& key : sub.order) {
    auto it = sub.values.find(key);
    if (it != sub.values.end()) overrides.push_back(key + "=" + it->second);
  }
  std::vector<const char*> ptrs;
  for (const auto& o : overrides) ptrs.push_back(o.c_str());
  const std::string out = sub.out_dir.empty() ? "out/" + sub.name : sub.out_dir;

  OwnedString summary;
  const lp_status s =
      lp_experiment_run(sub.name.c_str(), sub.config_path.empty() ? nullptr : sub.config_path.c_str(), ptrs.data(),
                        static_cast<int>(ptrs.size()), out.c_str(), &summary.p);
  if (s != LP_OK) return report_failure(sub.name, s);

  const json j = json::parse(summary.p);
  for (const auto& line : j["report"]) std::cout << line.get<std::string>() << "\n";
  std::cout << "wrote";
  for (const auto& f : j["files"]) std::cout << " " << f.get<std::string>();
  std::cout << " manifest.json to " << out << "\n";
  return j["passed"].get<bool>() ? kExitOk : kExitCriteriaFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning-trajectory experiments: CSV data plus a JSON manifest per run."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lp_version()));

  json catalog;
  try {
    catalog = fetch_json(lp_experiment_list);
  } catch (const std::exception& e) {
    std::cerr << "learnpath: " << e.what() << "\n";
    return kExitNumerical;
  }

  std::vector<std::unique_ptr<Subcommand>> subs;
  for (const auto& entry : catalog) {
    auto sub = std::make_unique<Subcommand>();
    sub->name = entry["name"].get<std::string>();
    sub->app = app.add_subcommand(sub->name, entry["reproduces"].get<std::string>());
    sub->app->add_option("--config", sub->config_path, "key=value config file; flags override it")
        ->check(CLI::ExistingFile);
    sub->app->add_option("--out", sub->out_dir, "output directory (default out/<subcommand>)");

    OwnedString defaults;
    if (lp_experiment_defaults(sub->name.c_str(), &defaults.p) != LP_OK) {
      std::cerr << "learnpath: " << lp_last_error_message() << "\n";
      return kExitNumerical;
    }
    for (const auto& k : json::parse(defaults.p)) {
      const std::string key = k["key"].get<std::string>();
      const std::string def = k["default"].get<std::string>();
      sub->order.push_back(key);
      Subcommand* raw = sub.get();
      sub->app
          ->add_option_function<std::string>(
              "--" + key, [raw, key](const std::string& v) { raw->values[key] = v; },
              k["help"].get<std::string>() + " [" + (def.empty() ? "empty" : def) + "]")
          ->type_name("VALUE");
    }
    subs.push_back(std::move(sub));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  for (auto& sub : subs) {
    if (sub->app->parsed()) return run(*sub);
  }
  return kExitConfig;
}
