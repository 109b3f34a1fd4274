#pragma once

#include <cstddef>
#include <vector>

#include "ftn/basis.hpp"
#include "ftn/hamiltonian.hpp"
#include "ftn/mps.hpp"

namespace ftn {

/// The chain Hamiltonian written as a small automaton over sites.
///
/// Reading sites left to right, a term is "not started", "one X placed",
/// "two X placed" or "complete". Each site contributes transitions labelled
/// by an operator and a coefficient; every term of H is one path from
/// "not started" at the left edge to "complete" at the right edge. This is
/// the matrix-product-operator form of H, with bond dimension at most 4.
class ChainAutomaton {
 public:
  enum State : std::size_t { kIdle = 0, kOneX = 1, kTwoX = 2, kDone = 3, kStates = 4 };
  enum Op : std::size_t { kIdentity = 0, kX = 1, kOnsite = 2, kOps = 3 };

  struct Transition {
    State from;
    State to;
    Op op;
    double coeff;
  };

  ChainAutomaton(const OscillatorChain& model, const BasisSpec& spec);

  std::size_t length() const { return transitions_.size(); }
  std::size_t physical_dim() const { return x_.dim(); }
  const std::vector<Transition>& transitions(std::size_t site) const { return transitions_.at(site); }
  /// Operator matrix for `op` at `site` (the identity is never materialized).
  const OperatorMatrix& op(std::size_t site, Op op) const;

 private:
  std::vector<std::vector<Transition>> transitions_;
  std::vector<OperatorMatrix> onsite_;
  OperatorMatrix x_;
};

struct LossGradient {
  double loss = 0.0;       // <ψ|H|ψ> / <ψ|ψ>
  double norm2 = 0.0;      // <ψ|ψ>
  std::vector<DenseTensor> gradient;  // ∂loss/∂A(n), one per site
};

/// Rayleigh quotient and all site gradients from one right sweep of
/// environment blocks followed by one left sweep.
LossGradient chain_loss_gradient(const Mps& psi, const ChainAutomaton& h);

/// Rayleigh quotient only (right sweep).
double chain_loss(const Mps& psi, const ChainAutomaton& h);

}  // namespace ftn
