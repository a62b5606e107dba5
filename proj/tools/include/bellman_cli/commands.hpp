#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bellman_cli/report.hpp"

namespace bellman::cli {

const std::vector<std::string>& subcommands();

// Default sample count of a subcommand (used when RunConfig::samples is 0).
std::size_t default_samples(const std::string& command);

Report run_eval(const RunConfig& cfg);
Report run_verify_psd(const RunConfig& cfg);
Report run_verify_properties(const RunConfig& cfg);
Report run_dyadic_test(const RunConfig& cfg);
Report run_martingale_sim(const RunConfig& cfg);
Report run_heat_test(const RunConfig& cfg);
Report run_search_coeffs(const RunConfig& cfg);

// Validates the config and runs cfg.command. Throws ConstraintViolation on an
// unknown command.
Report run_command(const RunConfig& cfg);

// Full command line: parse, run, print a summary, write the report.
// Returns 0 if every check passed, 1 on violations or a failed run, 2 on a
// usage or configuration error.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bellman::cli
