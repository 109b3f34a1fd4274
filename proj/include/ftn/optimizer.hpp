#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ftn/basis.hpp"
#include "ftn/chain_environment.hpp"
#include "ftn/hamiltonian.hpp"
#include "ftn/mps.hpp"

namespace ftn {

/// How gradients are evaluated. `chain` contracts the automaton form of H;
/// `product` builds Hψ with apply_hamiltonian and differentiates the two
/// inner products. Both give the same values up to rounding.
enum class GradientRoute { kChain, kProduct };

std::string to_string(GradientRoute route);
GradientRoute gradient_route_from_string(const std::string& name);

struct OptimizerConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t max_iters = 50'000;
  double rel_tol = 1e-8;
  std::size_t patience = 200;
  std::uint64_t seed = 1;
  std::size_t window = 20;       // trailing-average length
  std::size_t max_halvings = 4;  // plateaus tolerated before stopping
  GradientRoute route = GradientRoute::kChain;

  std::size_t checkpoint_interval = 0;  // 0 disables checkpoints
  std::filesystem::path checkpoint_dir;
  std::filesystem::path resume_dir;      // empty starts from random_mps(seed)
  std::size_t residual_every = 0;        // 0: residual only at the end
  std::size_t log_every = 0;             // 0: silent

  /// Throws ConfigError on out-of-range values.
  void validate() const;

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

/// ⟨ψ|H|ψ⟩/⟨ψ|ψ⟩; the optimization objective (same value as energy()).
double loss(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec);

/// ∂loss/∂A(n) for every site from one evaluation pass.
std::vector<DenseTensor> gradient(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec,
                                  GradientRoute route = GradientRoute::kChain);

LossGradient loss_and_gradient(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec,
                               GradientRoute route = GradientRoute::kChain);

struct AdamState {
  std::vector<DenseTensor> m;
  std::vector<DenseTensor> v;
  std::size_t step = 0;

  /// Zero moments shaped like `tensors`.
  static AdamState zeros_like(const std::vector<DenseTensor>& tensors);
};

/// One bias-corrected Adam update of `tensors` in place.
void adam_step(AdamState& state, std::vector<DenseTensor>& tensors, const std::vector<DenseTensor>& grads,
               double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

/// Plateau detection on the trailing average of the loss. Halves the
/// learning rate whenever `patience` iterations pass without the average
/// improving by rel_tol (relative), and stops once `max_halvings` halvings
/// in a row brought no improvement.
class PlateauSchedule {
 public:
  enum class Action { kContinue, kHalve, kStop };

  struct State {
    double best = 0.0;  // best trailing average seen (valid when has_best)
    bool has_best = false;
    std::size_t since_improvement = 0;
    std::size_t halvings = 0;  // consecutive, reset on improvement
    friend bool operator==(const State&, const State&) = default;
  };

  explicit PlateauSchedule(const OptimizerConfig& config) : config_(config) {}

  /// Feed the full loss history after appending the newest value.
  Action observe(const std::vector<double>& history);
  static double trailing_average(const std::vector<double>& history, std::size_t window);

  const State& state() const { return state_; }
  void restore(const State& state) { state_ = state; }

 private:
  OptimizerConfig config_;
  State state_;
};

struct SolveReport {
  std::vector<double> energy_trajectory;
  std::vector<double> residual_trajectory;  // NaN where not evaluated
  double final_energy = 0.0;
  std::optional<double> exact_energy;  // closed form, when it applies
  std::optional<double> error;         // |E - E_exact|
  double entropy = 0.0;                // middle cut
  std::vector<double> spectrum;
  std::size_t cut = 0;
  double residual = 0.0;
  std::size_t chi_h = 0;
  std::size_t iterations = 0;
  double wall_seconds = 0.0;
  bool converged = false;  // plateau criterion fired before max_iters
  double final_lr = 0.0;

  /// Field-wise equality where NaN matches NaN.
  friend bool operator==(const SolveReport& a, const SolveReport& b);
};

struct SolveResult {
  Mps state;
  SolveReport report;
};

/// Adam on all site tensors simultaneously, from random_mps(seed) (or a
/// checkpoint), until the plateau schedule stops or max_iters is reached.
/// Throws DivergenceError when the loss becomes non-finite.
SolveResult solve_ground_state(const OscillatorChain& model, const BasisSpec& spec, std::size_t chi,
                               const OptimizerConfig& config, std::ostream* log = nullptr);

/// Fills entropy, spectrum, residual, chi_h and the exact-energy fields of
/// `report` for state `psi`.
void finalize_report(SolveReport& report, const Mps& psi, const OscillatorChain& model,
                     const BasisSpec& spec);

/// E_exact when the closed form applies (unit frequencies, no three-body
/// term, real solution), otherwise nullopt.
std::optional<double> closed_form_energy(const OscillatorChain& model);

}  // namespace ftn
