#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rubric::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kIoError = 2 };

/// Parses `start:stop:step`; both endpoints included when `stop` is a whole
/// number of steps from `start`. Returns nullopt on a malformed spec.
std::optional<std::vector<double>> parse_grid(std::string_view spec);

/// Runs `rubric <subcommand> ...`; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience wrapper for tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rubric::cli
