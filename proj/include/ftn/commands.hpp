#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ftn/optimizer.hpp"
#include "ftn/report_io.hpp"
#include "ftn/run_config.hpp"

namespace ftn {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitDivergence = 3 };

/// Runs the solver and writes report.json, config.json, state.ftnm,
/// trajectory.csv and spectrum.csv (per output.formats) into output.dir.
SolveReport cmd_solve(const RunConfig& config, std::ostream* log = nullptr);

/// One isolated solve per scan value; rows keep input order. Failed rows
/// carry a status instead of a report. Writes scan.csv (and scan.json).
std::vector<ScanRow> cmd_scan(const RunConfig& config, std::ostream* log = nullptr);

/// Prints E_exact and gamma_c for config.model (N, gamma).
void cmd_exact(const RunConfig& config, std::ostream& out);

/// Dense eigen-solution, optional full-tensor descent and MPS gap, as
/// {E0, E_fulltensor, gap_to_mps}. Writes oracle.json.
nlohmann::json cmd_oracle(const RunConfig& config, std::ostream* log = nullptr);

/// Scan worker count after applying the FTNSOLVE_THREADS cap.
std::size_t scan_workers(const RunConfig& config);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ftn
