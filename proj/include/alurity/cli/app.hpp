#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace alurity::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationErrors = 1,
    kParseFailure = 2,
    kRuntimeFailure = 3,
    kTransportFailure = 4,
    kUsage = 64,
};

inline constexpr const char* kTrackerUrlVariable = "ALURITY_TRACKER_URL";
inline constexpr const char* kRegistryVariable = "ALURITY_REGISTRY_INDEX";

/// Runs one command line. `args` excludes the program name. Machine-readable
/// results go to `out`, everything meant for people to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace alurity::cli
