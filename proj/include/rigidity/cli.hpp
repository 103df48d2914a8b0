#pragma once

// Batch front-end: `rigidity_lab <command> [options]`.
// Exit status: 0 completed, 2 invalid input, 3 numerical failure.

#include <optional>
#include <string>
#include <vector>

namespace rigidity::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

struct RunResult {
    int status = kExitOk;
    std::string report;  ///< the rendered report (also written to --output when given)
    std::string error;   ///< diagnostic for a nonzero status
    bool wrote_file = false;
};

/// `args` excludes the program name. `env_tol` is the value of RIGIDITY_LAB_TOL, if set.
RunResult run(const std::vector<std::string>& args, const std::optional<std::string>& env_tol = std::nullopt);

/// Process entry point: reads RIGIDITY_LAB_TOL, prints the report or the error.
int main(int argc, char** argv);

} // namespace rigidity::cli
