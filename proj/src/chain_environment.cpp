#include "ftn/chain_environment.hpp"

#include <array>
#include <cmath>
#include <optional>

#include "ftn/errors.hpp"

namespace ftn {

namespace {

using Blocks = std::array<std::optional<DenseTensor>, ChainAutomaton::kStates>;
using KetVariants = std::array<std::optional<DenseTensor>, ChainAutomaton::kOps>;

void check_dimensions(const Mps& psi, const ChainAutomaton& h) {
  if (psi.length() != h.length() || psi.physical_dim() != h.physical_dim()) {
    throw ShapeError("state does not match the Hamiltonian dimensions");
  }
}

KetVariants ket_variants(const Mps& psi, const ChainAutomaton& h, std::size_t n) {
  KetVariants kets;
  for (const auto& t : h.transitions(n)) {
    if (t.op == ChainAutomaton::kIdentity || kets[t.op]) continue;
    kets[t.op] = apply_to_site(psi.site(n), h.op(n, t.op));
  }
  return kets;
}

const DenseTensor& ket_for(const Mps& psi, const KetVariants& kets, std::size_t n,
                           ChainAutomaton::Op op) {
  return op == ChainAutomaton::kIdentity ? psi.site(n) : *kets[op];
}

void accumulate(std::optional<DenseTensor>& slot, DenseTensor&& value, double coeff) {
  if (coeff != 1.0) value *= coeff;
  if (slot) {
    *slot += value;
  } else {
    slot = std::move(value);
  }
}

// R[n][state]: contraction of sites n..N-1 given the automaton is in
// `state` on bond n. R[N] holds only kDone.
std::vector<Blocks> right_blocks(const Mps& psi, const ChainAutomaton& h) {
  const std::size_t n_sites = psi.length(), d = psi.physical_dim();
  std::vector<Blocks> right(n_sites + 1);
  right[n_sites][ChainAutomaton::kDone] = DenseTensor::identity(1);
  for (std::size_t n = n_sites; n-- > 0;) {
    const DenseTensor& bra = psi.site(n);
    const std::size_t l = bra.extent(0), r = bra.extent(2);
    const KetVariants kets = ket_variants(psi, h, n);
    // Z[from] = Σ c · ket_op · R[to]^T, shape (l·d) x r.
    std::array<std::optional<DenseTensor>, ChainAutomaton::kStates> z;
    for (const auto& t : h.transitions(n)) {
      const auto& block = right[n + 1][t.to];
      if (!block) continue;
      const DenseTensor& ket = ket_for(psi, kets, n, t.op);
      DenseTensor tmp({l * d, r});
      gemm(false, true, l * d, r, r, 1.0, ket.data(), block->data(), 0.0, tmp.data());
      accumulate(z[t.from], std::move(tmp), t.coeff);
    }
    for (std::size_t s = 0; s < ChainAutomaton::kStates; ++s) {
      if (!z[s]) continue;
      DenseTensor out({l, l});
      gemm(false, true, l, l, d * r, 1.0, bra.data(), z[s]->data(), 0.0, out.data());
      right[n][s] = std::move(out);
    }
  }
  return right;
}

}  // namespace

ChainAutomaton::ChainAutomaton(const OscillatorChain& model, const BasisSpec& spec) {
  model.validate();
  const ChainOperators ops(spec);
  x_ = ops.x;
  const std::size_t n_sites = model.n_sites;
  const bool pairs = model.gamma != 0.0;
  const bool triples = model.gamma3 != 0.0;
  transitions_.resize(n_sites);
  onsite_.reserve(n_sites);
  for (std::size_t m = 0; m < n_sites; ++m) {
    onsite_.push_back(ops.onsite(model.frequency(m)));
    auto& tr = transitions_[m];
    tr.push_back({kIdle, kIdle, kIdentity, 1.0});
    tr.push_back({kDone, kDone, kIdentity, 1.0});
    tr.push_back({kIdle, kDone, kOnsite, 1.0});
    if ((pairs || triples) && m + 1 < n_sites) tr.push_back({kIdle, kOneX, kX, 1.0});
    if (pairs && m >= 1) tr.push_back({kOneX, kDone, kX, model.gamma});
    if (triples && m >= 1 && m + 1 < n_sites) tr.push_back({kOneX, kTwoX, kX, 1.0});
    if (triples && m >= 2) tr.push_back({kTwoX, kDone, kX, model.gamma3});
  }
}

const OperatorMatrix& ChainAutomaton::op(std::size_t site, Op op) const {
  switch (op) {
    case kX:
      return x_;
    case kOnsite:
      return onsite_.at(site);
    default:
      throw DomainError("identity operator is not stored");
  }
}

double chain_loss(const Mps& psi, const ChainAutomaton& h) {
  check_dimensions(psi, h);
  const auto right = right_blocks(psi, h);
  const double norm2 = (*right[0][ChainAutomaton::kDone])(0, 0);
  if (!std::isfinite(norm2)) throw DivergenceError("loss: state norm is not finite");
  if (!(norm2 > 0.0)) throw DomainError("loss: zero-norm state");
  return (*right[0][ChainAutomaton::kIdle])(0, 0) / norm2;
}

LossGradient chain_loss_gradient(const Mps& psi, const ChainAutomaton& h) {
  check_dimensions(psi, h);
  const std::size_t n_sites = psi.length(), d = psi.physical_dim();
  const auto right = right_blocks(psi, h);
  LossGradient out;
  // "Done" on the left edge followed by identities is the plain overlap.
  out.norm2 = (*right[0][ChainAutomaton::kDone])(0, 0);
  if (!std::isfinite(out.norm2)) throw DivergenceError("gradient: state norm is not finite");
  if (!(out.norm2 > 0.0)) throw DomainError("gradient: zero-norm state");
  out.loss = (*right[0][ChainAutomaton::kIdle])(0, 0) / out.norm2;
  out.gradient.reserve(n_sites);

  Blocks left;
  left[ChainAutomaton::kIdle] = DenseTensor::identity(1);
  for (std::size_t n = 0; n < n_sites; ++n) {
    const DenseTensor& bra = psi.site(n);
    const std::size_t l = bra.extent(0), r = bra.extent(2);
    const KetVariants kets = ket_variants(psi, h, n);
    // Y[to] = Σ c · L[from] · ket_op, shape (l·d) x r.
    std::array<std::optional<DenseTensor>, ChainAutomaton::kStates> y;
    for (const auto& t : h.transitions(n)) {
      const auto& block = left[t.from];
      if (!block) continue;
      const DenseTensor& ket = ket_for(psi, kets, n, t.op);
      DenseTensor tmp({l * d, r});
      gemm(false, false, l, d * r, l, 1.0, block->data(), ket.data(), 0.0, tmp.data());
      accumulate(y[t.to], std::move(tmp), t.coeff);
    }

    // Numerator environment: every (to) branch closed with its right block.
    // The identity-only branch closed with the plain right overlap gives the
    // norm environment.
    DenseTensor env_h({l, d, r});
    for (std::size_t s = 0; s < ChainAutomaton::kStates; ++s) {
      if (!y[s] || !right[n + 1][s]) continue;
      gemm(false, true, l * d, r, r, 1.0, y[s]->data(), right[n + 1][s]->data(), 1.0, env_h.data());
    }
    DenseTensor env_n({l, d, r});
    gemm(false, true, l * d, r, r, 1.0, y[ChainAutomaton::kIdle]->data(),
         right[n + 1][ChainAutomaton::kDone]->data(), 0.0, env_n.data());
    env_n *= out.loss;
    env_h -= env_n;
    env_h *= 2.0 / out.norm2;
    out.gradient.push_back(std::move(env_h));

    Blocks next;
    for (std::size_t s = 0; s < ChainAutomaton::kStates; ++s) {
      if (!y[s]) continue;
      DenseTensor blk({r, r});
      gemm(true, false, r, r, l * d, 1.0, bra.data(), y[s]->data(), 0.0, blk.data());
      next[s] = std::move(blk);
    }
    left = std::move(next);
  }
  return out;
}

}  // namespace ftn
