#include "ftn/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "ftn/errors.hpp"
#include "ftn/mps_io.hpp"

namespace ftn {

namespace {

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string precise_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Environments of ⟨ψ|ket⟩ with respect to every bra tensor.
std::vector<DenseTensor> overlap_environments(const Mps& bra, const Mps& ket) {
  const std::size_t n_sites = bra.length();
  std::vector<DenseTensor> right(n_sites + 1);
  right[n_sites] = DenseTensor::identity(1);
  for (std::size_t n = n_sites; n-- > 1;) right[n] = right_transfer(right[n + 1], bra.site(n), ket.site(n));
  std::vector<DenseTensor> envs;
  envs.reserve(n_sites);
  DenseTensor left = DenseTensor::identity(1);
  for (std::size_t n = 0; n < n_sites; ++n) {
    envs.push_back(site_environment(left, ket.site(n), right[n + 1]));
    if (n + 1 < n_sites) left = left_transfer(left, bra.site(n), ket.site(n));
  }
  return envs;
}

LossGradient product_loss_gradient(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec) {
  const Mps h_psi = apply_hamiltonian(psi, model, spec);
  LossGradient out;
  out.norm2 = inner(psi, psi);
  if (!std::isfinite(out.norm2)) throw DivergenceError("gradient: state norm is not finite");
  if (!(out.norm2 > 0.0)) throw DomainError("gradient: zero-norm state");
  out.loss = inner(psi, h_psi) / out.norm2;
  // ⟨ψ|H|ψ⟩ is quadratic in each tensor, so its derivative is twice the
  // environment of ⟨ψ|Hψ⟩ (H symmetric); likewise for ⟨ψ|ψ⟩.
  auto env_h = overlap_environments(psi, h_psi);
  const auto env_n = overlap_environments(psi, psi);
  for (std::size_t n = 0; n < psi.length(); ++n) {
    DenseTensor g = std::move(env_h[n]);
    g -= out.loss * env_n[n];
    g *= 2.0 / out.norm2;
    out.gradient.push_back(std::move(g));
  }
  return out;
}

nlohmann::json nan_aware(const std::vector<double>& values) {
  nlohmann::json arr = nlohmann::json::array();
  for (double v : values) {
    if (std::isfinite(v)) {
      arr.push_back(v);
    } else {
      arr.push_back(nullptr);
    }
  }
  return arr;
}

std::vector<double> nan_aware(const nlohmann::json& arr) {
  std::vector<double> out;
  for (const auto& v : arr) out.push_back(v.is_null() ? kNaN : v.get<double>());
  return out;
}

struct Progress {
  AdamState adam;
  PlateauSchedule::State plateau;
  double lr = 0.0;
  std::vector<double> energies;
  std::vector<double> residuals;
  double seconds = 0.0;
};

void write_checkpoint(const std::filesystem::path& dir, const std::vector<DenseTensor>& tensors,
                      const Progress& p) {
  std::filesystem::create_directories(dir);
  save_mps(dir / "state.ftnm", Mps(tensors));
  save_mps(dir / "adam_m.ftnm", Mps(p.adam.m));
  save_mps(dir / "adam_v.ftnm", Mps(p.adam.v));
  const nlohmann::json j = {{"step", p.adam.step},
                            {"lr", p.lr},
                            {"seconds", p.seconds},
                            {"plateau",
                             {{"best", p.plateau.best},
                              {"has_best", p.plateau.has_best},
                              {"since_improvement", p.plateau.since_improvement},
                              {"halvings", p.plateau.halvings}}},
                            {"energy_trajectory", p.energies},
                            {"residual_trajectory", nan_aware(p.residuals)}};
  std::ofstream os(dir / "progress.json");
  if (!os) throw FormatError("cannot write checkpoint in " + dir.string());
  os << j.dump() << '\n';
}

std::vector<DenseTensor> read_checkpoint(const std::filesystem::path& dir, Progress& p) {
  std::ifstream is(dir / "progress.json");
  if (!is) throw FormatError("no checkpoint in " + dir.string());
  try {
    const auto j = nlohmann::json::parse(is);
    p.adam.step = j.at("step").get<std::size_t>();
    p.lr = j.at("lr").get<double>();
    p.seconds = j.at("seconds").get<double>();
    const auto& pl = j.at("plateau");
    p.plateau.best = pl.at("best").get<double>();
    p.plateau.has_best = pl.at("has_best").get<bool>();
    p.plateau.since_improvement = pl.at("since_improvement").get<std::size_t>();
    p.plateau.halvings = pl.at("halvings").get<std::size_t>();
    p.energies = j.at("energy_trajectory").get<std::vector<double>>();
    p.residuals = nan_aware(j.at("residual_trajectory"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  auto tensors = load_mps(dir / "state.ftnm").tensors();
  p.adam.m = load_mps(dir / "adam_m.ftnm").tensors();
  p.adam.v = load_mps(dir / "adam_v.ftnm").tensors();
  return tensors;
}

}  // namespace

bool operator==(const SolveReport& a, const SolveReport& b) {
  const auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  const auto same_all = [&](const std::vector<double>& x, const std::vector<double>& y) {
    return std::equal(x.begin(), x.end(), y.begin(), y.end(), same);
  };
  return same_all(a.energy_trajectory, b.energy_trajectory) &&
         same_all(a.residual_trajectory, b.residual_trajectory) && same(a.final_energy, b.final_energy) &&
         a.exact_energy == b.exact_energy && a.error == b.error && same(a.entropy, b.entropy) &&
         a.spectrum == b.spectrum && a.cut == b.cut && same(a.residual, b.residual) && a.chi_h == b.chi_h &&
         a.iterations == b.iterations && a.wall_seconds == b.wall_seconds && a.converged == b.converged &&
         a.final_lr == b.final_lr;
}

std::string to_string(GradientRoute route) { return route == GradientRoute::kChain ? "chain" : "product"; }

GradientRoute gradient_route_from_string(const std::string& name) {
  if (name == "chain") return GradientRoute::kChain;
  if (name == "product") return GradientRoute::kProduct;
  throw ConfigError("unknown gradient route '" + name + "' (expected chain or product)");
}

void OptimizerConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("optimizer.lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("optimizer.beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("optimizer.beta2 must lie in [0, 1)");
  if (!(eps > 0.0)) throw ConfigError("optimizer.eps must be positive");
  if (max_iters < 1) throw ConfigError("optimizer.max_iters must be at least 1");
  if (!(rel_tol > 0.0)) throw ConfigError("optimizer.rel_tol must be positive");
  if (patience < 1) throw ConfigError("optimizer.patience must be at least 1");
  if (window < 1) throw ConfigError("optimizer.window must be at least 1");
  if (checkpoint_interval > 0 && checkpoint_dir.empty()) {
    throw ConfigError("checkpoints need a directory");
  }
}

double loss(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec) {
  return energy(psi, model, spec);
}

LossGradient loss_and_gradient(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec,
                               GradientRoute route) {
  if (route == GradientRoute::kProduct) return product_loss_gradient(psi, model, spec);
  return chain_loss_gradient(psi, ChainAutomaton(model, spec));
}

std::vector<DenseTensor> gradient(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec,
                                  GradientRoute route) {
  return loss_and_gradient(psi, model, spec, route).gradient;
}

AdamState AdamState::zeros_like(const std::vector<DenseTensor>& tensors) {
  AdamState state;
  for (const auto& t : tensors) {
    state.m.emplace_back(t.shape());
    state.v.emplace_back(t.shape());
  }
  return state;
}

void adam_step(AdamState& state, std::vector<DenseTensor>& tensors, const std::vector<DenseTensor>& grads,
               double lr, double beta1, double beta2, double eps) {
  if (state.m.size() != tensors.size() || state.v.size() != tensors.size() || grads.size() != tensors.size()) {
    throw ShapeError("adam_step: tensor, moment and gradient counts differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(beta1, t);
  const double c2 = 1.0 - std::pow(beta2, t);
  for (std::size_t n = 0; n < tensors.size(); ++n) {
    auto a = tensors[n].data();
    auto m = state.m[n].data();
    auto v = state.v[n].data();
    const auto g = grads[n].data();
    if (m.size() != a.size() || v.size() != a.size() || g.size() != a.size()) {
      throw ShapeError("adam_step: moment shape differs from tensor shape");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      a[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
}

double PlateauSchedule::trailing_average(const std::vector<double>& history, std::size_t window) {
  const std::size_t count = std::min(window, history.size());
  double sum = 0.0;
  for (std::size_t i = history.size() - count; i < history.size(); ++i) sum += history[i];
  return sum / static_cast<double>(count);
}

PlateauSchedule::Action PlateauSchedule::observe(const std::vector<double>& history) {
  if (history.size() < config_.window) return Action::kContinue;
  const double avg = trailing_average(history, config_.window);
  if (!state_.has_best || state_.best - avg > config_.rel_tol * std::abs(state_.best)) {
    state_.best = avg;
    state_.has_best = true;
    state_.since_improvement = 0;
    state_.halvings = 0;
    return Action::kContinue;
  }
  if (++state_.since_improvement < config_.patience) return Action::kContinue;
  state_.since_improvement = 0;
  if (state_.halvings >= config_.max_halvings) return Action::kStop;
  ++state_.halvings;
  return Action::kHalve;
}

std::optional<double> closed_form_energy(const OscillatorChain& model) {
  if (!model.unit_frequencies() || model.gamma3 != 0.0) return std::nullopt;
  try {
    return exact_ground_energy(model.n_sites, model.gamma);
  } catch (const NoRealSolutionError&) {
    return std::nullopt;
  }
}

void finalize_report(SolveReport& report, const Mps& psi, const OscillatorChain& model,
                     const BasisSpec& spec) {
  if (psi.length() >= 2) {
    report.cut = psi.length() / 2;
    const auto spectrum = entanglement_spectrum(psi, report.cut);
    report.spectrum = spectrum.values;
    report.entropy = entanglement_entropy(spectrum);
  } else {
    report.cut = 0;
    report.spectrum = {1.0};
    report.entropy = 0.0;
  }
  const auto eval = evaluate_residual(psi, model, spec);
  report.residual = eval.residual;
  report.chi_h = eval.chi_h;
  report.exact_energy = closed_form_energy(model);
  if (report.exact_energy) {
    report.error = std::abs(report.final_energy - *report.exact_energy);
  } else {
    report.error.reset();
  }
}

SolveResult solve_ground_state(const OscillatorChain& model, const BasisSpec& spec, std::size_t chi,
                               const OptimizerConfig& config, std::ostream* log) {
  model.validate();
  const BasisSpec basis = spec.validated();
  config.validate();
  if (chi < 1) throw ConfigError("chi must be at least 1");
  const auto start = std::chrono::steady_clock::now();

  const ChainAutomaton automaton(model, basis);
  PlateauSchedule schedule(config);
  Progress p;
  std::vector<DenseTensor> tensors;
  if (config.resume_dir.empty()) {
    tensors = random_mps(model.n_sites, basis.order, chi, config.seed).tensors();
    p.adam = AdamState::zeros_like(tensors);
    p.lr = config.lr;
  } else {
    tensors = read_checkpoint(config.resume_dir, p);
    const Mps restored(tensors);
    if (restored.length() != model.n_sites || restored.physical_dim() != basis.order) {
      throw ConfigError("checkpoint does not match the model dimensions");
    }
    schedule.restore(p.plateau);
  }

  bool converged = false;
  while (p.energies.size() < config.max_iters) {
    const Mps psi(tensors);
    const std::size_t iter = p.energies.size();
    LossGradient lg;
    try {
      lg = config.route == GradientRoute::kChain ? chain_loss_gradient(psi, automaton)
                                                 : product_loss_gradient(psi, model, basis);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " at iteration " + std::to_string(iter) + " (learning rate " +
                            short_double(p.lr) + ")");
    }
    if (!std::isfinite(lg.loss)) {
      throw DivergenceError("loss became non-finite at iteration " + std::to_string(iter) +
                            " (learning rate " + short_double(p.lr) + ")");
    }
    p.energies.push_back(lg.loss);
    const bool want_residual = config.residual_every > 0 && iter % config.residual_every == 0;
    p.residuals.push_back(want_residual ? residual_loss(psi, model, basis) : kNaN);
    if (log && config.log_every > 0 && iter % config.log_every == 0) {
      *log << "iter " << iter << " E " << precise_double(lg.loss) << " lr " << short_double(p.lr) << '\n';
    }

    const auto action = schedule.observe(p.energies);
    if (action == PlateauSchedule::Action::kStop) {
      converged = true;
      break;
    }
    if (p.energies.size() == config.max_iters) break;
    if (action == PlateauSchedule::Action::kHalve) p.lr *= 0.5;
    adam_step(p.adam, tensors, lg.gradient, p.lr, config.beta1, config.beta2, config.eps);

    if (config.checkpoint_interval > 0 && p.energies.size() % config.checkpoint_interval == 0) {
      p.plateau = schedule.state();
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      Progress snapshot = p;
      snapshot.seconds += elapsed;
      write_checkpoint(config.checkpoint_dir, tensors, snapshot);
    }
  }

  Mps psi(std::move(tensors));
  SolveReport report;
  report.energy_trajectory = std::move(p.energies);
  report.residual_trajectory = std::move(p.residuals);
  report.final_energy = report.energy_trajectory.back();
  report.iterations = report.energy_trajectory.size();
  report.converged = converged;
  report.final_lr = p.lr;
  finalize_report(report, psi, model, basis);
  report.residual_trajectory.back() = report.residual;
  report.wall_seconds =
      p.seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(psi), std::move(report)};
}

}  // namespace ftn
