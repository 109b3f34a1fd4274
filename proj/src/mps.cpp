#include "ftn/mps.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ftn/errors.hpp"

namespace ftn {

namespace {

void require_same_layout(const Mps& a, const Mps& b, const char* what) {
  if (a.length() != b.length() || a.physical_dim() != b.physical_dim()) {
    throw ShapeError(std::string(what) + ": states differ in length or physical dimension");
  }
}

// Copies src [l, d, r] into dst at bond offsets (left_off, right_off).
void embed(DenseTensor& dst, const DenseTensor& src, std::size_t left_off, std::size_t right_off) {
  const std::size_t l = src.extent(0), d = src.extent(1), r = src.extent(2);
  for (std::size_t a = 0; a < l; ++a)
    for (std::size_t s = 0; s < d; ++s)
      for (std::size_t c = 0; c < r; ++c) dst(a + left_off, s, c + right_off) = src(a, s, c);
}

std::size_t saturating_pow(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t v = 1;
  for (std::size_t i = 0; i < exp && v < cap; ++i) v *= base;
  return std::min(v, cap);
}

}  // namespace

Mps::Mps(std::vector<DenseTensor> tensors) : tensors_(std::move(tensors)) {
  if (tensors_.empty()) throw ShapeError("an MPS needs at least one site");
  const std::size_t d = tensors_.front().rank() == 3 ? tensors_.front().extent(1) : 0;
  for (std::size_t n = 0; n < tensors_.size(); ++n) {
    const auto& t = tensors_[n];
    if (t.rank() != 3) throw ShapeError("MPS site " + std::to_string(n) + " is not rank 3");
    if (t.extent(1) != d || d == 0) {
      throw ShapeError("MPS site " + std::to_string(n) + " has a different physical extent");
    }
    if (n > 0 && tensors_[n - 1].extent(2) != t.extent(0)) {
      throw ShapeError("MPS bond " + std::to_string(n) + " extents do not match");
    }
  }
  if (tensors_.front().extent(0) != 1 || tensors_.back().extent(2) != 1) {
    throw ShapeError("MPS boundary bonds must have extent 1");
  }
}

std::size_t Mps::bond_extent(std::size_t bond) const {
  if (bond > tensors_.size()) throw ShapeError("bond index out of range");
  return bond == tensors_.size() ? tensors_.back().extent(2) : tensors_[bond].extent(0);
}

std::vector<std::size_t> Mps::bond_extents() const {
  std::vector<std::size_t> out;
  out.reserve(tensors_.size() + 1);
  for (const auto& t : tensors_) out.push_back(t.extent(0));
  out.push_back(tensors_.back().extent(2));
  return out;
}

std::size_t Mps::max_bond() const {
  const auto bonds = bond_extents();
  return *std::max_element(bonds.begin(), bonds.end());
}

Mps Mps::with_site(std::size_t n, DenseTensor tensor) const {
  if (n >= tensors_.size()) throw DomainError("site index out of range");
  std::vector<DenseTensor> copy = tensors_;
  copy[n] = std::move(tensor);
  return Mps(std::move(copy));
}

Mps random_mps(std::size_t n_sites, std::size_t phys_dim, std::size_t chi, std::uint64_t seed) {
  if (n_sites == 0 || phys_dim == 0 || chi == 0) {
    throw DomainError("random_mps: N, D and chi must be positive");
  }
  std::vector<std::size_t> bonds(n_sites + 1);
  for (std::size_t b = 0; b <= n_sites; ++b) {
    bonds[b] = std::min({chi, saturating_pow(phys_dim, b, chi), saturating_pow(phys_dim, n_sites - b, chi)});
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(phys_dim * chi));
  std::vector<DenseTensor> tensors;
  tensors.reserve(n_sites);
  for (std::size_t n = 0; n < n_sites; ++n) {
    DenseTensor t({bonds[n], phys_dim, bonds[n + 1]});
    for (auto& v : t.data()) v = scale * normal(rng);
    tensors.push_back(std::move(t));
  }
  return Mps(std::move(tensors));
}

Mps product_mps(const std::vector<std::vector<double>>& site_vectors) {
  std::vector<DenseTensor> tensors;
  for (const auto& v : site_vectors) tensors.emplace_back(DenseTensor::Shape{1, v.size(), 1}, v);
  return Mps(std::move(tensors));
}

DenseTensor to_full_tensor(const Mps& psi, std::size_t max_elements) {
  const std::size_t n = psi.length(), d = psi.physical_dim();
  if (saturating_pow(d, n, max_elements + 1) > max_elements) {
    throw GuardError("to_full_tensor: D^N exceeds " + std::to_string(max_elements));
  }
  // acc has shape [D^k, bond]
  DenseTensor acc = psi.site(0).reshaped({d, psi.site(0).extent(2)});
  for (std::size_t k = 1; k < n; ++k) {
    const auto& t = psi.site(k);
    const std::size_t rows = acc.extent(0);
    DenseTensor next({rows * d, t.extent(2)});
    gemm(false, false, rows, d * t.extent(2), t.extent(0), 1.0, acc.data(), t.data(), 0.0,
         next.data());
    acc = std::move(next);
  }
  DenseTensor::Shape shape(n, d);
  return acc.reshaped(shape);
}

DenseTensor left_transfer(const DenseTensor& left, const DenseTensor& bra, const DenseTensor& ket) {
  const std::size_t lb = bra.extent(0), d = bra.extent(1), rb = bra.extent(2);
  const std::size_t lk = ket.extent(0), rk = ket.extent(2);
  if (left.extent(0) != lb || left.extent(1) != lk || ket.extent(1) != d) {
    throw ShapeError("left_transfer: shape mismatch");
  }
  // Contract the block into the ket first, then close the physical and bra bonds.
  std::vector<double> tmp(lb * d * rk);
  gemm(false, false, lb, d * rk, lk, 1.0, left.data(), ket.data(), 0.0, tmp);
  DenseTensor out({rb, rk});
  gemm(true, false, rb, rk, lb * d, 1.0, bra.data(), tmp, 0.0, out.data());
  return out;
}

DenseTensor right_transfer(const DenseTensor& right, const DenseTensor& bra, const DenseTensor& ket) {
  const std::size_t lb = bra.extent(0), d = bra.extent(1), rb = bra.extent(2);
  const std::size_t lk = ket.extent(0), rk = ket.extent(2);
  if (right.extent(0) != rb || right.extent(1) != rk || ket.extent(1) != d) {
    throw ShapeError("right_transfer: shape mismatch");
  }
  std::vector<double> tmp(lk * d * rb);
  gemm(false, true, lk * d, rb, rk, 1.0, ket.data(), right.data(), 0.0, tmp);
  DenseTensor out({lb, lk});
  gemm(false, true, lb, lk, d * rb, 1.0, bra.data(), tmp, 0.0, out.data());
  return out;
}

DenseTensor site_environment(const DenseTensor& left, const DenseTensor& ket, const DenseTensor& right) {
  const std::size_t lk = ket.extent(0), d = ket.extent(1), rk = ket.extent(2);
  const std::size_t lb = left.extent(0), rb = right.extent(0);
  if (left.extent(1) != lk || right.extent(1) != rk) {
    throw ShapeError("site_environment: shape mismatch");
  }
  std::vector<double> tmp(lb * d * rk);
  gemm(false, false, lb, d * rk, lk, 1.0, left.data(), ket.data(), 0.0, tmp);
  DenseTensor out({lb, d, rb});
  gemm(false, true, lb * d, rb, rk, 1.0, tmp, right.data(), 0.0, out.data());
  return out;
}

double inner(const Mps& a, const Mps& b) {
  require_same_layout(a, b, "inner");
  DenseTensor v = DenseTensor::identity(1);
  for (std::size_t n = 0; n < a.length(); ++n) v = left_transfer(v, a.site(n), b.site(n));
  return v(0, 0);
}

double norm(const Mps& psi) { return std::sqrt(std::max(0.0, inner(psi, psi))); }

Mps add(const Mps& a, const Mps& b) {
  require_same_layout(a, b, "add");
  const std::size_t n_sites = a.length(), d = a.physical_dim();
  if (n_sites == 1) return Mps({a.site(0) + b.site(0)});
  std::vector<DenseTensor> out;
  out.reserve(n_sites);
  for (std::size_t n = 0; n < n_sites; ++n) {
    const auto& ta = a.site(n);
    const auto& tb = b.site(n);
    const bool first = n == 0, last = n + 1 == n_sites;
    const std::size_t l = first ? 1 : ta.extent(0) + tb.extent(0);
    const std::size_t r = last ? 1 : ta.extent(2) + tb.extent(2);
    DenseTensor q({l, d, r});
    embed(q, ta, 0, 0);
    embed(q, tb, first ? 0 : ta.extent(0), last ? 0 : ta.extent(2));
    out.push_back(std::move(q));
  }
  return Mps(std::move(out));
}

Mps add_shared(const Mps& a, const Mps& b, std::size_t first, std::size_t last) {
  require_same_layout(a, b, "add_shared");
  const std::size_t n_sites = a.length(), d = a.physical_dim();
  if (first > last || last >= n_sites) throw DomainError("add_shared: invalid site range");
  for (std::size_t n = 0; n < n_sites; ++n) {
    if ((n < first || n > last) && !(a.site(n) == b.site(n))) {
      throw DomainError("add_shared: tensors differ at site " + std::to_string(n) +
                        " outside the declared range");
    }
  }
  std::vector<DenseTensor> out;
  out.reserve(n_sites);
  for (std::size_t n = 0; n < n_sites; ++n) {
    if (n < first || n > last) {
      out.push_back(a.site(n));
      continue;
    }
    const auto& ta = a.site(n);
    const auto& tb = b.site(n);
    if (first == last) {
      out.push_back(ta + tb);
      continue;
    }
    const bool open_left = n > first, open_right = n < last;
    const std::size_t l = open_left ? ta.extent(0) + tb.extent(0) : ta.extent(0);
    const std::size_t r = open_right ? ta.extent(2) + tb.extent(2) : ta.extent(2);
    if ((!open_left && ta.extent(0) != tb.extent(0)) || (!open_right && ta.extent(2) != tb.extent(2))) {
      throw ShapeError("add_shared: boundary bonds of the range do not match");
    }
    DenseTensor q({l, d, r});
    embed(q, ta, 0, 0);
    embed(q, tb, open_left ? ta.extent(0) : 0, open_right ? ta.extent(2) : 0);
    out.push_back(std::move(q));
  }
  return Mps(std::move(out));
}

Mps scale(const Mps& psi, double factor) {
  return psi.with_site(0, factor * DenseTensor(psi.site(0)));
}

DenseTensor apply_to_site(const DenseTensor& site, const OperatorMatrix& op) {
  const std::size_t l = site.extent(0), d = site.extent(1), r = site.extent(2);
  if (op.dim() != d) throw ShapeError("operator dimension does not match the physical extent");
  DenseTensor out({l, d, r});
  for (std::size_t a = 0; a < l; ++a) {
    gemm(false, false, d, r, d, 1.0, op.tensor().data(), site.data().subspan(a * d * r, d * r), 0.0,
         out.data().subspan(a * d * r, d * r));
  }
  return out;
}

Mps apply_single(const Mps& psi, std::size_t site, const OperatorMatrix& op) {
  if (site >= psi.length()) throw DomainError("apply_single: site out of range");
  return psi.with_site(site, apply_to_site(psi.site(site), op));
}

Mps apply_two_site(const Mps& psi, std::size_t site, const TwoSiteOperatorTensor& op) {
  if (site + 1 >= psi.length()) throw DomainError("apply_two_site: site out of range");
  const auto& a = psi.site(site);
  const auto& b = psi.site(site + 1);
  const std::size_t l = a.extent(0), d = a.extent(1), k = a.extent(2), r = b.extent(2);
  if (op.dim() != d) throw ShapeError("apply_two_site: operator dimension mismatch");
  // theta[l, d, d, r]
  DenseTensor theta({l, d, d, r});
  gemm(false, false, l * d, d * r, k, 1.0, a.data(), b.data(), 0.0, theta.data());
  DenseTensor applied({l, d, d, r});
  for (std::size_t x = 0; x < l; ++x) {
    gemm(false, false, d * d, r, d * d, 1.0, op.tensor().data(),
         theta.data().subspan(x * d * d * r, d * d * r), 0.0,
         applied.data().subspan(x * d * d * r, d * d * r));
  }
  auto [q, rr] = qr(applied.reshaped({l * d, d * r}));
  const std::size_t rank = q.extent(1);
  std::vector<DenseTensor> tensors = psi.tensors();
  tensors[site] = q.reshaped({l, d, rank});
  tensors[site + 1] = rr.reshaped({rank, d, r});
  return Mps(std::move(tensors));
}

CenterCanonical canonicalize_center(const Mps& psi, std::size_t cut) {
  const std::size_t n_sites = psi.length(), d = psi.physical_dim();
  if (cut < 1 || cut >= n_sites) throw DomainError("canonicalize_center: cut out of range");
  if (!(norm(psi) > 0.0)) throw DomainError("canonicalize_center: zero-norm state");

  std::vector<DenseTensor> tensors = psi.tensors();
  DenseTensor carry = DenseTensor::identity(1);
  for (std::size_t n = 0; n < cut; ++n) {
    const auto& t = tensors[n];
    const std::size_t k = carry.extent(0), r = t.extent(2);
    DenseTensor m({k * d, r});
    gemm(false, false, k, d * r, t.extent(0), 1.0, carry.data(), t.data(), 0.0, m.data());
    auto [q, rr] = qr(m);
    tensors[n] = q.reshaped({k, d, q.extent(1)});
    carry = std::move(rr);
  }
  DenseTensor left_carry = std::move(carry);

  carry = DenseTensor::identity(1);
  for (std::size_t n = n_sites; n-- > cut;) {
    const auto& t = tensors[n];
    const std::size_t l = t.extent(0), k = carry.extent(1);
    DenseTensor m({l * d, k});
    gemm(false, false, l * d, k, t.extent(2), 1.0, t.data(), carry.data(), 0.0, m.data());
    // LQ via QR of the transpose: M^T = Q R  =>  M = R^T Q^T.
    auto [q, rr] = qr(transpose(m.reshaped({l, d * k})));
    const std::size_t rank = q.extent(1);
    tensors[n] = transpose(q).reshaped({rank, d, k});
    carry = transpose(rr);
  }
  DenseTensor center = matmul(left_carry, carry);
  const auto& site = tensors[cut];
  DenseTensor absorbed({center.extent(0), d, site.extent(2)});
  gemm(false, false, center.extent(0), d * site.extent(2), center.extent(1), 1.0, center.data(),
       site.data(), 0.0, absorbed.data());
  tensors[cut] = std::move(absorbed);
  return {Mps(std::move(tensors)), std::move(center), cut};
}

EntanglementSpectrum entanglement_spectrum(const Mps& psi, std::size_t cut) {
  const auto canon = canonicalize_center(psi, cut);
  const DenseTensor& c = canon.center;
  const double norm = c.frobenius_norm();
  EntanglementSpectrum out;
  out.cut = cut;
  for (double sigma : svd(c).values) out.values.push_back(sigma / norm);
  return out;
}

double entanglement_entropy(const EntanglementSpectrum& spectrum) {
  double s = 0.0;
  for (double lambda : spectrum.values) {
    if (lambda > 0.0) s -= 2.0 * lambda * lambda * std::log(lambda);
  }
  return s;
}

Mps compress(const Mps& psi, std::size_t chi_max) {
  if (chi_max == 0) throw DomainError("compress: chi_max must be positive");
  const std::size_t n_sites = psi.length(), d = psi.physical_dim();
  if (n_sites == 1) return psi;
  std::vector<DenseTensor> tensors = psi.tensors();

  // Right-orthonormalize sites 1..N-1, pushing the remainder into site 0.
  for (std::size_t n = n_sites - 1; n >= 1; --n) {
    const auto& t = tensors[n];
    const std::size_t l = t.extent(0), r = t.extent(2);
    auto [q, rr] = qr(transpose(t.reshaped({l, d * r})));
    const std::size_t rank = q.extent(1);
    tensors[n] = transpose(q).reshaped({rank, d, r});
    const DenseTensor lmat = transpose(rr);  // l x rank
    const auto& prev = tensors[n - 1];
    const std::size_t pl = prev.extent(0);
    DenseTensor merged({pl, d, rank});
    gemm(false, false, pl * d, rank, l, 1.0, prev.data(), lmat.data(), 0.0, merged.data());
    tensors[n - 1] = std::move(merged);
  }

  // Sweep right keeping the dominant singular subspace at each bond.
  for (std::size_t n = 0; n + 1 < n_sites; ++n) {
    const auto& t = tensors[n];
    const std::size_t l = t.extent(0), r = t.extent(2);
    const DenseTensor m = t.reshaped({l * d, r});
    const auto dec = svd(m);
    const std::size_t keep = std::min(chi_max, dec.values.size());
    DenseTensor v({r, keep});
    for (std::size_t c = 0; c < keep; ++c)
      for (std::size_t row = 0; row < r; ++row) v(row, c) = dec.v(row, c);
    auto [q, rr] = qr(matmul(m, v));
    const std::size_t rank = q.extent(1);
    tensors[n] = q.reshaped({l, d, rank});
    const DenseTensor carry = matmul(rr, transpose(v));  // rank x r
    const auto& next = tensors[n + 1];
    DenseTensor merged({rank, d, next.extent(2)});
    gemm(false, false, rank, d * next.extent(2), r, 1.0, carry.data(), next.data(), 0.0,
         merged.data());
    tensors[n + 1] = std::move(merged);
  }
  return Mps(std::move(tensors));
}

}  // namespace ftn
