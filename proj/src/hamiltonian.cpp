#include "ftn/hamiltonian.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ftn/errors.hpp"

namespace ftn {

OscillatorChain OscillatorChain::uniform(std::size_t n_sites, double gamma, double gamma3) {
  OscillatorChain chain;
  chain.n_sites = n_sites;
  chain.gamma = gamma;
  chain.gamma3 = gamma3;
  return chain;
}

bool OscillatorChain::unit_frequencies() const {
  for (double w : omega)
    if (w != 1.0) return false;
  return true;
}

void OscillatorChain::validate() const {
  if (n_sites == 0) throw DomainError("model needs at least one oscillator");
  if (!omega.empty() && omega.size() != n_sites) {
    throw DomainError("omega has " + std::to_string(omega.size()) + " entries for N = " +
                      std::to_string(n_sites));
  }
  for (double w : omega)
    if (!std::isfinite(w)) throw DomainError("omega must be finite");
  if (!std::isfinite(gamma) || !std::isfinite(gamma3)) {
    throw DomainError("couplings must be finite");
  }
  if (gamma != 0.0 && n_sites < 2) throw DomainError("two-body coupling needs N >= 2");
  if (gamma3 != 0.0 && n_sites < 3) throw DomainError("three-body coupling needs N >= 3");
}

ChainOperators::ChainOperators(const BasisSpec& spec)
    : kinetic(kinetic_matrix(spec.order)),
      x(x_matrix(spec.order)),
      x2(matrix_power(x, 2)) {}

OperatorMatrix ChainOperators::onsite(double omega) const {
  return kinetic + (0.5 * omega * omega) * x2;
}

namespace {

struct TermState {
  Mps state;
  std::size_t first;
  std::size_t last;
};

TermState sum_terms(std::vector<TermState>& terms, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return std::move(terms[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  TermState left = sum_terms(terms, lo, mid);
  TermState right = sum_terms(terms, mid, hi);
  const std::size_t first = std::min(left.first, right.first);
  const std::size_t last = std::max(left.last, right.last);
  return {add_shared(left.state, right.state, first, last), first, last};
}

}  // namespace

Mps apply_hamiltonian(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec) {
  model.validate();
  const std::size_t n_sites = model.n_sites;
  if (psi.length() != n_sites || psi.physical_dim() != spec.order) {
    throw ShapeError("apply_hamiltonian: state does not match the model dimensions");
  }
  const ChainOperators ops(spec);
  std::vector<TermState> terms;
  terms.reserve(4 * n_sites);
  for (std::size_t m = 0; m < n_sites; ++m) {
    const double w = model.frequency(m);
    Mps kinetic = apply_single(psi, m, ops.kinetic);
    Mps potential = apply_single(psi, m, (0.5 * w * w) * ops.x2);
    terms.push_back({add_shared(kinetic, potential, m, m), m, m});
    if (model.gamma != 0.0 && m + 1 < n_sites) {
      Mps pair = apply_single(psi, m, model.gamma * ops.x);
      terms.push_back({apply_single(pair, m + 1, ops.x), m, m + 1});
    }
    if (model.gamma3 != 0.0 && m + 2 < n_sites) {
      Mps triple = apply_single(psi, m, model.gamma3 * ops.x);
      triple = apply_single(triple, m + 1, ops.x);
      terms.push_back({apply_single(triple, m + 2, ops.x), m, m + 2});
    }
  }
  return sum_terms(terms, 0, terms.size()).state;
}

double energy(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec) {
  const double norm2 = inner(psi, psi);
  if (!std::isfinite(norm2)) throw DivergenceError("energy: state norm is not finite");
  if (!(norm2 > 0.0)) throw DomainError("energy: zero-norm state");
  return inner(psi, apply_hamiltonian(psi, model, spec)) / norm2;
}

ResidualEvaluation evaluate_residual(const Mps& psi, const OscillatorChain& model,
                                     const BasisSpec& spec) {
  const double norm2 = inner(psi, psi);
  if (!std::isfinite(norm2)) throw DivergenceError("residual_loss: state norm is not finite");
  if (!(norm2 > 0.0)) throw DomainError("residual_loss: zero-norm state");
  const Mps h_psi = apply_hamiltonian(psi, model, spec);
  ResidualEvaluation out;
  out.energy = inner(psi, h_psi) / norm2;
  out.chi_h = h_psi.max_bond();
  const Mps defect = add(h_psi, scale(psi, -out.energy));
  out.residual = std::max(0.0, inner(defect, defect)) / norm2;
  return out;
}

double residual_loss(const Mps& psi, const OscillatorChain& model, const BasisSpec& spec) {
  return evaluate_residual(psi, model, spec).residual;
}

double exact_ground_energy(std::size_t n_sites, double gamma) {
  if (n_sites == 0) throw DomainError("exact_ground_energy: N must be positive");
  double e = 0.0;
  const double denom = static_cast<double>(n_sites + 1);
  for (std::size_t n = 1; n <= n_sites; ++n) {
    const double radicand = 1.0 + 2.0 * gamma * std::cos(static_cast<double>(n) * std::numbers::pi / denom);
    if (radicand < 0.0) {
      throw NoRealSolutionError("no real solution: |gamma| exceeds the critical coupling " +
                                std::to_string(critical_coupling(n_sites)));
    }
    e += 0.5 * std::sqrt(radicand);
  }
  return e;
}

double critical_coupling(std::size_t n_sites) {
  if (n_sites == 0) throw DomainError("critical_coupling: N must be positive");
  if (n_sites == 1) return std::numeric_limits<double>::infinity();
  return 0.5 / std::cos(std::numbers::pi / static_cast<double>(n_sites + 1));
}

}  // namespace ftn
