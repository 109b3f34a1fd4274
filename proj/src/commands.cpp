#include "ftn/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "ftn/errors.hpp"
#include "ftn/mps_io.hpp"
#include "ftn/oracle.hpp"

namespace ftn {

namespace {

using Json = nlohmann::json;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  return os;
}

void write_json(const std::filesystem::path& path, const Json& j) { open_output(path) << j.dump(2) << '\n'; }

OptimizerConfig run_optimizer(const RunConfig& config) {
  OptimizerConfig opt = config.optimizer;
  if (opt.checkpoint_dir.empty()) opt.checkpoint_dir = config.output.dir / "checkpoint";
  return opt;
}

RunConfig row_config(const RunConfig& base, double value) {
  RunConfig c = base;
  const std::string& p = base.scan.param;
  if (p == "D" || p == "chi") {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw ConfigError("scan value " + format_double(value) + " is not a positive integer");
    }
    (p == "D" ? c.basis.order : c.chi) = static_cast<std::size_t>(value);
  } else if (p == "gamma") {
    c.model.gamma = value;
  } else {
    c.model.gamma3 = value;
  }
  c.optimizer.checkpoint_interval = 0;
  c.validate();
  return c;
}

ScanRow run_row(const RunConfig& base, double value) {
  ScanRow row;
  row.param = value;
  try {
    const RunConfig c = row_config(base, value);
    row.report = solve_ground_state(c.model, c.basis, c.chi, run_optimizer(c)).report;
  } catch (const DivergenceError&) {
    row.status = "diverged";
  } catch (const ConfigError&) {
    row.status = "invalid";
  } catch (const DomainError&) {
    row.status = "invalid";
  } catch (const std::exception&) {
    row.status = "error";
  }
  return row;
}

void print_summary(std::ostream& out, const SolveReport& r) {
  out << "E " << format_double(r.final_energy);
  if (r.error) out << " eps " << format_double(*r.error);
  out << " S " << format_double(r.entropy) << " residual " << format_double(r.residual) << " chiH " << r.chi_h
      << " iters " << r.iterations << (r.converged ? " converged" : " max_iters") << '\n';
}

}  // namespace

SolveReport cmd_solve(const RunConfig& config, std::ostream* log) {
  config.validate();
  auto [psi, report] = solve_ground_state(config.model, config.basis, config.chi, run_optimizer(config), log);
  const auto& dir = config.output.dir;
  std::filesystem::create_directories(dir);
  if (config.output.wants("json")) {
    write_json(dir / "report.json", report_to_json(report));
    write_json(dir / "config.json", config_to_json(config));
  }
  if (config.output.wants("csv")) {
    auto traj = open_output(dir / "trajectory.csv");
    write_trajectory_csv(traj, report);
    auto spec = open_output(dir / "spectrum.csv");
    write_spectrum_csv(spec, report);
  }
  save_mps(dir / "state.ftnm", psi);
  return report;
}

std::size_t scan_workers(const RunConfig& config) {
  std::size_t workers = config.scan.workers;
  if (const char* env = std::getenv("FTNSOLVE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) workers = std::min(workers, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, workers);
}

std::vector<ScanRow> cmd_scan(const RunConfig& config, std::ostream* log) {
  config.validate();
  const auto& values = config.scan.values;
  if (values.empty()) throw ConfigError("scan.values is empty");
  std::vector<ScanRow> rows(values.size());
  const std::size_t workers = std::min(scan_workers(config), values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) rows[i] = run_row(config, values[i]);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (log) {
    for (const auto& row : rows) {
      *log << config.scan.param << '=' << format_double(row.param) << ' ' << row.status;
      if (row.report) {
        *log << ' ';
        print_summary(*log, *row.report);
      } else {
        *log << '\n';
      }
    }
  }
  const auto& dir = config.output.dir;
  std::filesystem::create_directories(dir);
  if (config.output.wants("csv")) {
    auto os = open_output(dir / "scan.csv");
    write_scan_csv(os, rows);
  }
  if (config.output.wants("json")) {
    Json arr = Json::array();
    for (const auto& row : rows) {
      arr.push_back({{"param", row.param},
                     {"status", row.status},
                     {"report", row.report ? report_to_json(*row.report) : Json(nullptr)}});
    }
    write_json(dir / "scan.json", {{"param", config.scan.param}, {"rows", arr}, {"config", config_to_json(config)}});
  }
  return rows;
}

void cmd_exact(const RunConfig& config, std::ostream& out) {
  const std::size_t n = config.model.n_sites;
  out << "N " << n << '\n' << "gamma " << format_double(config.model.gamma) << '\n';
  try {
    out << "E_exact " << format_double(exact_ground_energy(n, config.model.gamma)) << '\n';
  } catch (const NoRealSolutionError&) {
    out << "E_exact no real solution\n";
  }
  out << "gamma_c " << format_double(critical_coupling(n)) << '\n';
}

Json cmd_oracle(const RunConfig& config, std::ostream* log) {
  config.validate();
  const auto problem = dense_hamiltonian(config.model, config.basis, config.oracle.guard);
  const auto ground = dense_ground_state(problem);
  Json out = {{"N", config.model.n_sites}, {"D", config.basis.order}, {"E0", ground.energy}};
  if (config.oracle.full_tensor) {
    OptimizerConfig opt = config.optimizer;
    opt.checkpoint_interval = 0;
    out["E_fulltensor"] = full_tensor_solve(config.model, config.basis, opt, config.oracle.guard).energy;
  }
  if (config.oracle.compare_mps) {
    OptimizerConfig opt = config.optimizer;
    opt.checkpoint_interval = 0;
    const auto mps = solve_ground_state(config.model, config.basis, config.chi, opt, log);
    out["gap_to_mps"] = mps.report.final_energy - ground.energy;
  }
  std::filesystem::create_directories(config.output.dir);
  write_json(config.output.dir / "oracle.json", out);
  return out;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground states of coupled oscillators with functional matrix product states", "ftnsolve"};
  app.allow_extras();
  std::string command, preset, config_file, out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "solve | scan | exact | oracle")
      ->required()
      ->check(CLI::IsMember({"solve", "scan", "exact", "oracle"}));
  app.add_option("--config", config_file, "YAML configuration file");
  app.add_option("--preset", preset, "fig2 | fig3 | fig4 | fig5 | decoupled");
  app.add_option("--seed", seed, "random seed (optimizer.seed)");
  app.add_option("--out", out_dir, "output directory (output.dir)");
  app.footer("Any configuration key can be overridden with --section.key=value, e.g. --model.gamma=-0.5.");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ftnsolve: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    std::vector<std::pair<std::string, std::string>> overrides;
    if (seed) overrides.emplace_back("optimizer.seed", std::to_string(*seed));
    if (!out_dir.empty()) overrides.emplace_back("output.dir", out_dir);
    for (const auto& arg : app.remaining()) {
      const auto eq = arg.find('=');
      if (arg.rfind("--", 0) != 0 || eq == std::string::npos || eq == 2) {
        throw ConfigError("unrecognized argument '" + arg + "' (expected --key=value)");
      }
      overrides.emplace_back(arg.substr(2, eq - 2), arg.substr(eq + 1));
    }
    const RunConfig config = build_config(preset, config_file, overrides);
    std::ostream* log = config.optimizer.log_every > 0 ? &err : nullptr;

    if (command == "solve") {
      print_summary(out, cmd_solve(config, log));
    } else if (command == "scan") {
      const auto rows = cmd_scan(config, &err);
      write_scan_csv(out, rows);
    } else if (command == "exact") {
      cmd_exact(config, out);
    } else {
      out << cmd_oracle(config, log).dump(2) << '\n';
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "ftnsolve: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const GuardError& e) {
    err << "ftnsolve: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DivergenceError& e) {
    err << "ftnsolve: diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    err << "ftnsolve: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace ftn
