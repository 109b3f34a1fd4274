#include "ftn/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ftn/errors.hpp"

namespace ftn {

namespace {

using Json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> optional_number(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

Json nullable_array(const std::vector<double>& values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
  return arr;
}

std::vector<double> nullable_array(const Json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(v.is_null() ? kNaN : v.get<double>());
  return out;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Json report_to_json(const SolveReport& r) {
  return {{"energy_trajectory", r.energy_trajectory},
          {"residual_trajectory", nullable_array(r.residual_trajectory)},
          {"final_energy", r.final_energy},
          {"exact_energy", optional_number(r.exact_energy)},
          {"error", optional_number(r.error)},
          {"entropy", r.entropy},
          {"spectrum", r.spectrum},
          {"cut", r.cut},
          {"residual", r.residual},
          {"chi_h", r.chi_h},
          {"iterations", r.iterations},
          {"wall_seconds", r.wall_seconds},
          {"converged", r.converged},
          {"final_lr", r.final_lr}};
}

SolveReport report_from_json(const Json& j) {
  try {
    SolveReport r;
    r.energy_trajectory = j.at("energy_trajectory").get<std::vector<double>>();
    r.residual_trajectory = nullable_array(j.at("residual_trajectory"));
    r.final_energy = j.at("final_energy").get<double>();
    r.exact_energy = optional_number(j.at("exact_energy"));
    r.error = optional_number(j.at("error"));
    r.entropy = j.at("entropy").get<double>();
    r.spectrum = j.at("spectrum").get<std::vector<double>>();
    r.cut = j.at("cut").get<std::size_t>();
    r.residual = j.at("residual").get<double>();
    r.chi_h = j.at("chi_h").get<std::size_t>();
    r.iterations = j.at("iterations").get<std::size_t>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    r.converged = j.at("converged").get<bool>();
    r.final_lr = j.at("final_lr").get<double>();
    return r;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("report json: ") + e.what());
  }
}

void write_trajectory_csv(std::ostream& os, const SolveReport& report) {
  os << "iter,energy,loss_residual\n";
  for (std::size_t i = 0; i < report.energy_trajectory.size(); ++i) {
    const double res = i < report.residual_trajectory.size() ? report.residual_trajectory[i] : kNaN;
    os << i << ',' << format_double(report.energy_trajectory[i]) << ',' << format_double(res) << '\n';
  }
}

void write_spectrum_csv(std::ostream& os, const SolveReport& report) {
  os << "k,lambda\n";
  for (std::size_t k = 0; k < report.spectrum.size(); ++k) {
    os << k + 1 << ',' << format_double(report.spectrum[k]) << '\n';
  }
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
  os << kScanCsvHeader << '\n';
  for (const auto& row : rows) {
    os << format_double(row.param) << ',';
    if (row.report) {
      const auto& r = *row.report;
      os << format_double(r.final_energy) << ',' << format_double(r.exact_energy.value_or(kNaN)) << ','
         << format_double(r.error.value_or(kNaN)) << ',' << format_double(r.entropy) << ','
         << format_double(r.residual) << ',' << r.chi_h << ',' << r.iterations << ','
         << format_double(r.wall_seconds);
    } else {
      os << "nan,nan,nan,nan,nan,0,0,nan";
    }
    os << ',' << row.status << '\n';
  }
}

}  // namespace ftn
