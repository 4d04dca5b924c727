#pragma once

#include <string>
#include <vector>

namespace fracmv::cli {

/// Version string recorded in run manifests.
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Runs one subcommand; argv excludes the program name. Returns 0 on success,
/// 1 on usage or configuration errors, 2 on numeric failures.
int run(const std::vector<std::string>& argv);

}  // namespace fracmv::cli
