// The full verification run behind `reproduce-paper`: every closed-form
// constant, identity, inequality and property suite, with one verdict per
// line and a deterministic JSON/markdown report.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "taskinfo/bounds.hpp"

namespace taskinfo::suite {

using json = nlohmann::json;

struct SuiteEntry {
  std::string group;
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  bounds::Verdict verdict = bounds::Verdict::kInconclusive;
  std::string detail;
};

struct SuiteReport {
  std::vector<SuiteEntry> entries;
  bounds::Verdict overall = bounds::Verdict::kHolds;
  double wall_clock_s = 0.0;
  json seed_registry;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;

  /// Deterministic given (seed, samples): wall clock is emitted only when
  /// include_wall_clock is set so byte-level comparisons can exclude it.
  json to_json(bool include_wall_clock = false) const;
  std::string markdown() const;
  /// 0 all holds, 3 any inconclusive, 4 any violated.
  int exit_code() const;
};

SuiteReport run_suite(std::uint64_t seed, std::uint64_t samples, int jobs = 0);

}  // namespace taskinfo::suite
