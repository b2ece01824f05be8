#include <cstdio>
#include <cstdlib>

#include "CLI11.hpp"
#include "hslg_acceptance/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria, one PASS/FAIL line each"};
  hslg::acceptance::Options opt;
  bool list = false;
  app.add_option("ids", opt.only, "criterion ids to run (default: all)");
  app.add_option("--seed", opt.seed, "global seed");
  app.add_option("--threads", opt.threads, "worker threads, 0 = hardware");
  app.add_flag("--list", list, "list the criteria and exit");
  CLI11_PARSE(app, argc, argv);
  if (const char* s = std::getenv("HSLG_SEED"); s && *s) opt.seed = std::strtoull(s, nullptr, 0);

  if (list) {
    for (const auto& c : hslg::acceptance::criteria()) std::printf("C%-2d %s\n", c.id, c.name.c_str());
    return 0;
  }
  opt.on_result = [](const hslg::acceptance::CriterionResult& r) {
    std::printf("%s C%-2d %-32s %8.1fs  %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
  };
  const auto results = hslg::acceptance::run_acceptance(opt);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
