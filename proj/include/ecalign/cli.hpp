#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ecalign/pipeline.hpp"

namespace ecalign {

enum class OutputFormat { json, tsv };

/// Every externally controllable setting of one invocation.
struct RunConfig {
  AlignOptions align;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::json;
};

/// Overlays the keys of a JSON config object onto `base`. Unknown keys and
/// ill-typed values throw DataError.
RunConfig apply_config_json(std::string_view text, RunConfig base);
std::string to_json(const RunConfig& config);

enum ExitStatus : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitSolver = 3 };

/// Runs one command line (without the program name). Artifacts go to files or
/// `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecalign
