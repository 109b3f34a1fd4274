#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ftn/basis.hpp"
#include "ftn/tensor.hpp"

namespace ftn {

/// Open-boundary matrix product state for an N-index coefficient tensor.
///
/// Site n holds a tensor of shape [left bond, physical, right bond]; the
/// outermost bonds have extent 1. Sites are numbered 0..N-1 and bond b sits
/// between sites b-1 and b, so bond 0 and bond N are the trivial boundaries.
///
///          s_n
///           |
///   α_{n} --A-- α_{n+1}
class Mps {
 public:
  explicit Mps(std::vector<DenseTensor> tensors);

  std::size_t length() const { return tensors_.size(); }
  std::size_t physical_dim() const { return tensors_.front().extent(1); }
  /// Extent of bond b, 0 <= b <= N.
  std::size_t bond_extent(std::size_t bond) const;
  std::vector<std::size_t> bond_extents() const;
  std::size_t max_bond() const;

  const DenseTensor& site(std::size_t n) const { return tensors_.at(n); }
  const std::vector<DenseTensor>& tensors() const& { return tensors_; }
  std::vector<DenseTensor> tensors() && { return std::move(tensors_); }

  /// Copy with site n replaced; the new tensor must keep the bond extents.
  Mps with_site(std::size_t n, DenseTensor tensor) const;

  friend bool operator==(const Mps&, const Mps&) = default;

 private:
  std::vector<DenseTensor> tensors_;
};

/// Random MPS with bond b capped at min(chi, D^b, D^(N-b)); entries are
/// i.i.d. standard normal scaled by 1/sqrt(D*chi). Deterministic per seed.
Mps random_mps(std::size_t n_sites, std::size_t phys_dim, std::size_t chi, std::uint64_t seed);

/// Product state from one physical vector per site.
Mps product_mps(const std::vector<std::vector<double>>& site_vectors);

/// Contracts all virtual bonds into the full coefficient tensor.
DenseTensor to_full_tensor(const Mps& psi, std::size_t max_elements = 10'000'000);

/// Σ_s A_s B_s, evaluated by left-to-right transfer matrices.
double inner(const Mps& a, const Mps& b);
double norm(const Mps& psi);

/// Block-embedding sum; interior bond extents add.
Mps add(const Mps& a, const Mps& b);

/// Sum of two states whose tensors coincide outside sites [first, last].
/// Shared tensors are kept once and only bonds strictly inside the range
/// grow; a single-site range sums the differing tensors in place.
Mps add_shared(const Mps& a, const Mps& b, std::size_t first, std::size_t last);

Mps scale(const Mps& psi, double factor);

/// Ã(a, s, a') = Σ_t O(s, t) A(a, t, a') on one site tensor.
DenseTensor apply_to_site(const DenseTensor& site, const OperatorMatrix& op);

Mps apply_single(const Mps& psi, std::size_t site, const OperatorMatrix& op);

/// Applies a two-variable operator on sites (site, site+1) and splits the
/// merged block back exactly with a thin QR (no truncation).
Mps apply_two_site(const Mps& psi, std::size_t site, const TwoSiteOperatorTensor& op);

struct CenterCanonical {
  /// Sites < cut are left-orthonormal, sites > cut right-orthonormal, and
  /// site `cut` holds center * (right-orthonormal tensor).
  Mps state;
  DenseTensor center;  // matrix on bond `cut`
  std::size_t cut = 0;
};

/// QR sweeps from both ends towards bond `cut` (1 <= cut <= N-1).
/// Throws DomainError for a zero-norm state.
CenterCanonical canonicalize_center(const Mps& psi, std::size_t cut);

struct EntanglementSpectrum {
  std::size_t cut = 0;
  std::vector<double> values;  // Schmidt numbers, descending, Σ λ² = 1
};

EntanglementSpectrum entanglement_spectrum(const Mps& psi, std::size_t cut);

/// S = -2 Σ λ² ln λ with 0 ln 0 = 0.
double entanglement_entropy(const EntanglementSpectrum& spectrum);

/// Keeps the chi_max largest Schmidt values at every bond.
Mps compress(const Mps& psi, std::size_t chi_max);

// Transfer-matrix kernels shared by inner products and gradients. Blocks
// are indexed [bra bond, ket bond].

/// Σ L(a,b) bra(a,s,a') ket(b,s,b') -> [a', b'].
DenseTensor left_transfer(const DenseTensor& left, const DenseTensor& bra, const DenseTensor& ket);
/// Σ bra(a,s,a') ket(b,s,b') R(a',b') -> [a, b].
DenseTensor right_transfer(const DenseTensor& right, const DenseTensor& bra, const DenseTensor& ket);
/// Σ L(a,b) ket(b,s,b') R(a',b') -> [a, s, a'], the bra-site environment.
DenseTensor site_environment(const DenseTensor& left, const DenseTensor& ket, const DenseTensor& right);

}  // namespace ftn
