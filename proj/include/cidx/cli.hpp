#pragma once

// JSON job specs, the analysis runner and the cidx command line.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cidx/instances.hpp"
#include "json.hpp"

namespace cidx::cli {

inline constexpr int kReportVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kSpecError = 1, kVerificationFailed = 2 };

/// Canonical analysis order; run() executes requested ones in this order.
const std::vector<std::string>& analysis_names();

struct JobSpec {
  Instance instance;
  std::string kind;                   ///< instance kind, or "inline"
  std::string trace_kind;             ///< default, markov, normalized or weights
  std::vector<std::string> analyses;
  std::optional<FiniteGroupTable> group;
  int tensor_m = 2;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-8;
  std::string hash;                   ///< FNV-1a 64 of the canonical spec text
};

/// Thrown for malformed or unresolvable specs.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fnv1a64(const std::string& text);

JobSpec parse_job(const nlohmann::json& spec);

struct RunResult {
  nlohmann::json report;
  std::vector<std::string> failures;  ///< "analysis.check: value > tol"
  std::vector<std::pair<std::string, double>> timings_ms;
  int exit_code = kOk;
};

/// Deterministic given the job; numerical failures are recorded, not thrown.
RunResult run(const JobSpec& job);

/// Fixed-width text rendering of every checked quantity, plus timings.
std::string pretty(const RunResult& r);

/// The command line; returns the process exit code.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cidx::cli
