#pragma once

#include <cstddef>
#include <vector>

#include "ftn/basis.hpp"
#include "ftn/mps.hpp"

namespace ftn {

/// N coupled oscillators on a line:
///   H = ½ Σ_n (-∂²_n + ω_n² x_n²) + γ Σ x_m x_{m+1} + γ̃ Σ x_m x_{m+1} x_{m+2}.
struct OscillatorChain {
  std::size_t n_sites = 2;
  std::vector<double> omega;  // empty means all 1
  double gamma = 0.0;
  double gamma3 = 0.0;

  static OscillatorChain uniform(std::size_t n_sites, double gamma, double gamma3 = 0.0);

  double frequency(std::size_t n) const { return omega.empty() ? 1.0 : omega.at(n); }
  bool unit_frequencies() const;
  /// Throws DomainError for inconsistent parameters.
  void validate() const;

  friend bool operator==(const OscillatorChain&, const OscillatorChain&) = default;
};

/// Operator matrices used by the chain Hamiltonian in a given basis.
struct ChainOperators {
  OperatorMatrix kinetic;  // -½ D²
  OperatorMatrix x;
  OperatorMatrix x2;  // X², truncated

  explicit ChainOperators(const BasisSpec& spec);
  /// -½ D² + ½ ω² X² for a single oscillator.
  OperatorMatrix onsite(double omega) const;
};

/// Hψ as one MPS, summed from the kinetic, potential, two-body and three-body
/// term states with add_shared in a balanced pairwise tree (no truncation).
/// Terms whose coupling is exactly zero are skipped.
Mps apply_hamiltonian(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec);

/// <ψ|Hψ> / <ψ|ψ>.
double energy(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec);

struct ResidualEvaluation {
  double energy = 0.0;
  double residual = 0.0;   // ‖(H - E)ψ‖² / ‖ψ‖²
  std::size_t chi_h = 0;  // largest bond of the Hψ state
};

ResidualEvaluation evaluate_residual(const Mps& psi, const OscillatorChain& model,
                                     const BasisSpec& spec);
double residual_loss(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec);

/// ½ Σ_n √(1 + 2γ cos(nπ/(N+1))) for unit frequencies and no three-body
/// term. Throws NoRealSolutionError when a radicand is negative.
double exact_ground_energy(std::size_t n_sites, double gamma);

/// ½ sec(π/(N+1)); +infinity for N = 1.
double critical_coupling(std::size_t n_sites);

}  // namespace ftn
