#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace vortlab {

// One asserted comparison. The check passes when `value relation tolerance` holds,
// relation being "<=" or ">=".
struct Check {
  std::string id;  // "<criterion>.<name>", the key used by tolerance overrides
  double value = 0;
  double tolerance = 0;
  std::string relation = "<=";
  bool pass = false;
};

struct Verdict {
  std::string criterion;  // "AC1" ... "AC9"
  std::string title;
  bool pass = false;
  double seconds = 0;
  std::vector<Check> checks;
  // Reported, not asserted.
  std::vector<std::pair<std::string, double>> reported;
  std::string error;  // set when the suite threw
};

struct VerifyOptions {
  int n = 32;
  std::uint64_t seed = 7;
  // Test mode: replaces the tolerance of the named checks.
  std::map<std::string, double> tolerance_overrides;
  // Optional progress lines (criterion id and title) as each criterion starts.
  bool progress = false;
};

// identities: AC1; lorentz: AC2, AC8; suitability: AC3, AC4; maximal: AC5, AC6;
// blowup: AC6; degiorgi: AC7; all: AC1..AC9 (AC9 aggregates the others and the runtime).
std::vector<std::string> suite_names();
std::vector<Verdict> verify_suite(const std::string& suite, const VerifyOptions& opt = {});

// {"suite": ..., "pass": ..., "verdicts": [...]} with 17 significant digits.
std::string verdicts_json(const std::string& suite, const std::vector<Verdict>& verdicts);

}  // namespace vortlab
