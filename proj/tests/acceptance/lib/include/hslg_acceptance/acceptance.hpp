#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hslg::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values next to their pinned windows
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 20240611;
  int threads = 0;        // 0 = hardware concurrency
  std::vector<int> only;  // empty = all twelve
  std::function<void(const CriterionResult&)> on_result;
};

struct Criterion {
  int id;
  std::string name;
};
std::vector<Criterion> criteria();

// Runs the selected criteria in id order. A criterion that throws is
// reported as failed with the exception text.
std::vector<CriterionResult> run_acceptance(const Options& opt);

}  // namespace hslg::acceptance
