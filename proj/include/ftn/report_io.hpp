#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ftn/optimizer.hpp"

namespace ftn {

nlohmann::json report_to_json(const SolveReport& report);
/// Throws FormatError on missing or mistyped fields.
SolveReport report_from_json(const nlohmann::json& j);

/// iter,energy,loss_residual
void write_trajectory_csv(std::ostream& os, const SolveReport& report);
/// k,lambda (k counts from 1)
void write_spectrum_csv(std::ostream& os, const SolveReport& report);

/// One line of a parameter scan. `report` is empty for failed rows.
struct ScanRow {
  double param = 0.0;
  std::optional<SolveReport> report;
  std::string status = "ok";  // ok | diverged | invalid | error
};

inline constexpr const char* kScanCsvHeader = "param,E,E_exact_or_nan,eps,S,residual,chiH,iters,seconds,status";

/// Header plus one row per entry, in the given order.
void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows);

/// %.17g; "nan" for NaN.
std::string format_double(double value);

}  // namespace ftn
