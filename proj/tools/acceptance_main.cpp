// Acceptance gate: one PASS/FAIL line per criterion; nonzero exit if any fails.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "json.hpp"
#include "learnpath/learnpath.h"

int main(int argc, char** argv) {
  std::uint64_t seed = 1;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else {
      only.push_back(std::atoi(argv[i]));
    }
  }

  char* report = nullptr;
  int all_passed = 0;
  const lp_status s = lp_verify(seed, only.data(), static_cast<int>(only.size()), &report, &all_passed);
  if (s != LP_OK) {
    std::fprintf(stderr, "acceptance: %s: %s\n", lp_status_name(s), lp_last_error_message());
    return 2;
  }
  const auto results = nlohmann::json::parse(report);
  lp_string_free(report);

  int passed = 0;
  for (const auto& r : results) {
    const bool ok = r["passed"].get<bool>();
    passed += ok;
    std::printf("criterion %2d %s  %s: %s [%.2f s]\n", r["criterion"].get<int>(), ok ? "PASS" : "FAIL",
                r["name"].get<std::string>().c_str(), r["detail"].get<std::string>().c_str(),
                r["seconds"].get<double>());
  }
  std::printf("%d/%zu criteria passed\n", passed, results.size());
  return all_passed ? 0 : 1;
}
