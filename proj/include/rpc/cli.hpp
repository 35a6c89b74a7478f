#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rpc/analysis.hpp"
#include "rpc/netlist.hpp"

namespace rpc::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,    // bad flags, parse errors, unbound variables, bad values
  kCompile = 3,  // scale or range errors from the compiler
  kIo = 4,
};

/// Options and provenance echoed into every output artifact.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> options;
  std::uint64_t seed = 1;
  std::string version = kToolVersion;
  std::string timestamp;

  static RunManifest now(std::string subcommand, std::uint64_t seed);
  void add(std::string key, std::string value) { options.emplace_back(std::move(key), std::move(value)); }
  nlohmann::ordered_json to_json() const;
  /// One "# key: value" line per field; the timestamp sits on its own line.
  std::string comment_block() const;
};

std::string utc_timestamp();

struct EvalRequest {
  std::string expression;
  Bindings bindings;
  CompileOptions options;
  SimulationConfig config;
};

struct SweepRequest {
  CircuitSpec spec;
  unsigned steps = 19;
  SimulationConfig config;
  unsigned threads = 0;
};

struct RandomnessRequest {
  CircuitSpec spec;
  double p0 = 0.0;
  double p1 = 0.0;
  SimulationConfig config;
  unsigned max_lag = 8;
};

/// Parse, compile with the bindings as point ranges, simulate, report.
nlohmann::ordered_json cmd_eval(const EvalRequest& req, const RunManifest& manifest);

/// Writes the manifest block, then `p0,p1,estimate,ideal,abs_error` rows.
SweepResult cmd_sweep(const SweepRequest& req, const RunManifest& manifest, std::ostream& out);

nlohmann::ordered_json cmd_randomness(const RandomnessRequest& req, const RunManifest& manifest);

/// Exact stationary rate rounded to 12 significant digits.
nlohmann::ordered_json cmd_oracle(CircuitKind kind, unsigned width, double p0, double p1,
                                  const RunManifest& manifest);

/// "x=0.5" -> {"x", 0.5}; throws DomainError on malformed input.
std::pair<std::string, double> parse_binding(const std::string& text);

/// Full command-line entry point. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rpc::cli
