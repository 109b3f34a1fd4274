#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "ftn/chain_environment.hpp"
#include "ftn/errors.hpp"
#include "ftn/hamiltonian.hpp"
#include "test_support.hpp"

using namespace ftn;
using namespace ftn::testing;

namespace {

Mps ground_product(std::size_t n, std::size_t d) {
  std::vector<double> phi0(d, 0.0);
  phi0[0] = 1.0;
  return product_mps(std::vector<std::vector<double>>(n, phi0));
}

}  // namespace

TEST(OscillatorChain, Validation) {
  EXPECT_THROW(OscillatorChain::uniform(1, 0.3).validate(), DomainError);
  EXPECT_THROW(OscillatorChain::uniform(2, 0.0, 0.1).validate(), DomainError);
  EXPECT_THROW(OscillatorChain::uniform(3, NAN).validate(), DomainError);
  OscillatorChain bad = OscillatorChain::uniform(3, 0.1);
  bad.omega = {1.0, 1.0};
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_NO_THROW(OscillatorChain::uniform(1, 0.0).validate());
  EXPECT_NO_THROW(OscillatorChain::uniform(3, -0.5, 0.2).validate());
}

TEST(ApplyHamiltonian, DecoupledGroundState) {
  const auto model = OscillatorChain::uniform(4, 0.0);
  const BasisSpec spec{6, 0};
  const auto psi = ground_product(4, 6);
  const auto h_psi = apply_hamiltonian(psi, model, spec);
  EXPECT_NEAR(inner(psi, h_psi), 2.0 * inner(psi, psi), 1e-12);
  EXPECT_LT(max_abs_diff(to_full_tensor(h_psi).values(), to_full_tensor(scale(psi, 2.0)).values()), 1e-12);
}

TEST(ApplyHamiltonian, MatchesDenseReference) {
  for (auto [n, d] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 4}, {2, 3}, {3, 4}, {4, 3}}) {
    for (double g3 : {0.0, 0.27}) {
      if (g3 != 0.0 && n < 3) continue;
      OscillatorChain model = OscillatorChain::uniform(n, n > 1 ? -0.45 : 0.0, g3);
      model.omega.assign(n, 1.0);
      model.omega[0] = 1.3;
      const BasisSpec spec{d, 0};
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto psi = random_mps(n, d, 3, seed);
        const auto ref = apply_h_dense(full_by_loops(psi), model, d);
        const auto got = to_full_tensor(apply_hamiltonian(psi, model, spec)).values();
        EXPECT_LT(max_abs_diff(got, ref), 1e-10 * std::max(1.0, max_abs(ref))) << "N=" << n << " D=" << d;
      }
    }
  }
}

TEST(ApplyHamiltonian, Symmetric) {
  const auto model = OscillatorChain::uniform(3, -0.3, 0.15);
  const BasisSpec spec{4, 0};
  const auto phi = random_mps(3, 4, 3, 1);
  const auto psi = random_mps(3, 4, 3, 2);
  const double lhs = inner(phi, apply_hamiltonian(psi, model, spec));
  const double rhs = inner(apply_hamiltonian(phi, model, spec), psi);
  EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(lhs));
}

TEST(ApplyHamiltonian, SymmetricUpToEightSites) {
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto model = OscillatorChain::uniform(n, 0.4, n >= 3 ? -0.2 : 0.0);
    const BasisSpec spec{4, 0};
    const auto phi = random_mps(n, 4, 4, n);
    const auto psi = random_mps(n, 4, 4, n + 100);
    const double lhs = inner(phi, apply_hamiltonian(psi, model, spec));
    const double rhs = inner(apply_hamiltonian(phi, model, spec), psi);
    EXPECT_LT(std::abs(lhs - rhs) / (norm(phi) * norm(psi)), 1e-10) << "N=" << n;
  }
}

TEST(ApplyHamiltonian, BondGrowthStaysBelowTermCount) {
  const std::size_t n = 8, chi = 4;
  const auto model = OscillatorChain::uniform(n, -0.5, 0.1);
  const auto h_psi = apply_hamiltonian(random_mps(n, 4, chi, 3), model, BasisSpec{4, 0});
  EXPECT_LT(h_psi.max_bond(), (4 * n - 3) * chi);
}

TEST(ApplyHamiltonian, ShapeMismatch) {
  EXPECT_THROW(apply_hamiltonian(random_mps(3, 4, 2, 1), OscillatorChain::uniform(4, 0.1), BasisSpec{4, 0}),
               ShapeError);
  EXPECT_THROW(apply_hamiltonian(random_mps(3, 4, 2, 1), OscillatorChain::uniform(3, 0.1), BasisSpec{5, 0}),
               ShapeError);
}

TEST(Energy, DecoupledProductState) {
  const auto model = OscillatorChain::uniform(5, 0.0);
  EXPECT_NEAR(energy(ground_product(5, 8), model, BasisSpec{8, 0}), 2.5, 1e-12);
}

TEST(Energy, ScaleInvariantAndMatchesDense) {
  const auto model = OscillatorChain::uniform(3, -0.4, 0.1);
  const BasisSpec spec{4, 0};
  const auto psi = random_mps(3, 4, 4, 9);
  const double e = energy(psi, model, spec);
  EXPECT_NEAR(energy(scale(psi, 7.3), model, spec), e, 1e-12 * std::abs(e));
  const auto v = full_by_loops(psi);
  const double ref = dot(v, apply_h_dense(v, model, 4)) / dot(v, v);
  EXPECT_NEAR(e, ref, 1e-10 * std::abs(ref));
}

TEST(Energy, ZeroNormThrows) {
  auto tensors = random_mps(2, 3, 2, 1).tensors();
  tensors[0] *= 0.0;
  EXPECT_THROW(energy(Mps(tensors), OscillatorChain::uniform(2, 0.1), BasisSpec{3, 0}), DomainError);
  EXPECT_THROW(residual_loss(Mps(tensors), OscillatorChain::uniform(2, 0.1), BasisSpec{3, 0}), DomainError);
}

TEST(ResidualLoss, ZeroAtEigenstate) {
  EXPECT_NEAR(residual_loss(ground_product(4, 6), OscillatorChain::uniform(4, 0.0), BasisSpec{6, 0}), 0.0, 1e-10);
}

TEST(ResidualLoss, ScaleInvariantAndMatchesDense) {
  const auto model = OscillatorChain::uniform(3, 0.35);
  const BasisSpec spec{4, 0};
  const auto psi = random_mps(3, 4, 3, 17);
  const double r = residual_loss(psi, model, spec);
  EXPECT_NEAR(residual_loss(scale(psi, -3.0), model, spec), r, 1e-10 * r);
  const auto v = full_by_loops(psi);
  const auto hv = apply_h_dense(v, model, 4);
  const double e = dot(v, hv) / dot(v, v);
  double defect = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) defect += std::pow(hv[i] - e * v[i], 2);
  EXPECT_NEAR(r, defect / dot(v, v), 1e-9);
  const auto eval = evaluate_residual(psi, model, spec);
  EXPECT_NEAR(eval.energy, e, 1e-10 * std::abs(e));
  EXPECT_EQ(eval.chi_h, apply_hamiltonian(psi, model, spec).max_bond());
}

TEST(ExactGroundEnergy, Values) {
  for (std::size_t n : {1u, 4u, 16u}) EXPECT_NEAR(exact_ground_energy(n, 0.0), 0.5 * n, 1e-15);
  EXPECT_NEAR(exact_ground_energy(16, 0.0), 8.0, 1e-15);
  EXPECT_NEAR(exact_ground_energy(2, 0.5), 0.5 * (std::sqrt(1.5) + std::sqrt(0.5)), 1e-15);
  EXPECT_NEAR(exact_ground_energy(2, 0.5), 0.9659258, 1e-7);
  EXPECT_THROW(exact_ground_energy(16, 0.55), NoRealSolutionError);
  EXPECT_THROW(exact_ground_energy(16, -0.55), NoRealSolutionError);
  EXPECT_THROW(exact_ground_energy(0, 0.1), DomainError);
}

TEST(ExactGroundEnergy, EvenInGamma) {
  for (std::size_t n : {2u, 5u, 16u})
    for (double g : {0.1, 0.3, 0.45}) EXPECT_NEAR(exact_ground_energy(n, g), exact_ground_energy(n, -g), 1e-13);
}

TEST(ExactGroundEnergy, AgreesWithNormalModes) {
  // Independent route: eigenvalues of the coupling matrix K = I + γ(shift + shiftᵀ)
  // give squared normal-mode frequencies.
  for (std::size_t n : {2u, 3u, 6u}) {
    const double g = -0.35;
    DenseTensor k({n, n});
    for (std::size_t i = 0; i < n; ++i) {
      k(i, i) = 1.0;
      if (i + 1 < n) k(i, i + 1) = k(i + 1, i) = g;
    }
    double e = 0.0;
    for (double w2 : symmetric_eig(k).values) e += 0.5 * std::sqrt(w2);
    EXPECT_NEAR(exact_ground_energy(n, g), e, 1e-12);
  }
}

TEST(CriticalCoupling, Values) {
  EXPECT_NEAR(critical_coupling(16), 0.5 / std::cos(std::numbers::pi / 17), 1e-15);
  EXPECT_NEAR(critical_coupling(16), 0.509, 1e-3);
  EXPECT_TRUE(std::isinf(critical_coupling(1)));
  double prev = critical_coupling(8);
  for (std::size_t n : {16u, 32u, 64u}) {
    const double g = critical_coupling(n);
    EXPECT_LT(g, prev);
    EXPECT_GT(g, 0.5);
    prev = g;
  }
  // The closed form is real just below the critical coupling and not above it.
  EXPECT_NO_THROW(exact_ground_energy(16, critical_coupling(16) * (1 - 1e-9)));
  EXPECT_THROW(exact_ground_energy(16, critical_coupling(16) * (1 + 1e-9)), NoRealSolutionError);
}

TEST(ChainAutomaton, LossMatchesEnergy) {
  for (auto [n, d, chi] : std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>{
           {1, 4, 1}, {2, 3, 2}, {3, 4, 3}, {5, 3, 4}, {8, 4, 4}}) {
    const auto model = OscillatorChain::uniform(n, n > 1 ? -0.4 : 0.0, n > 2 ? 0.2 : 0.0);
    const BasisSpec spec{d, 0};
    const ChainAutomaton h(model, spec);
    const auto psi = random_mps(n, d, chi, 41 + n);
    const double e = energy(psi, model, spec);
    EXPECT_NEAR(chain_loss(psi, h), e, 1e-11 * std::abs(e)) << "N=" << n;
    EXPECT_NEAR(chain_loss_gradient(psi, h).norm2, inner(psi, psi), 1e-11 * inner(psi, psi));
  }
}
