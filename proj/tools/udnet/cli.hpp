#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "report.hpp"

namespace udnet::cli {

enum ExitCode : int { kExitPass = 0, kExitFailure = 1, kExitUsage = 2, kExitTruncation = 3, kExitResource = 4 };

// Entry point shared by the binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct ValidateOptions {
    std::string suite = "all";
    int d = 2;
    std::optional<std::size_t> n;
    std::uint64_t seed = 0;
};
// Fills report rows; returns true when every non-skipped check passed.
bool run_validate(const ValidateOptions& o, Report& report, std::ostream& log);

Report run_sweep(const ojson& spec);

}  // namespace udnet::cli
