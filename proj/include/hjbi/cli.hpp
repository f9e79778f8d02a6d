#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hjbi/config.hpp"

namespace hjbi {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitSolverFailure = 2,
    kExitGateFailure = 3,
};

/// Published reference values printed next to the computed ones.
struct ReferenceValues {
    static constexpr double ergodic_constant = 0.7943;
    static constexpr double min_phi_uncontrolled = 38.665;
    static constexpr double min_phi_controlled = 37.003;
};

/// Runs the configured command, writing CSV files into cfg.output_dir and a
/// human-readable summary to log (nothing when quiet). Returns an ExitCode.
int execute(const RunConfig& cfg, std::ostream& log, bool quiet = false);

/// Formats a double with 17 significant digits.
std::string format_number(double v);

/// Writes one CSV file: provenance comment line, header row, then rows.
void write_csv(const std::string& path, const std::string& provenance, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace hjbi
