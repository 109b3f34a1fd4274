#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ftn/errors.hpp"
#include "ftn/mps.hpp"
#include "ftn/mps_io.hpp"
#include "test_support.hpp"

using namespace ftn;
using namespace ftn::testing;

namespace {

std::vector<double> full(const Mps& psi) { return to_full_tensor(psi).values(); }

std::vector<double> plus(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += b[i];
  return out;
}

// Two states that share every tensor outside [first, last].
std::pair<Mps, Mps> sharing_pair(std::size_t n, std::size_t d, std::size_t chi, std::size_t first, std::size_t last,
                                 std::uint64_t seed) {
  const Mps a = random_mps(n, d, chi, seed);
  const Mps other = random_mps(n, d, chi, seed + 1000);
  auto tensors = a.tensors();
  for (std::size_t k = first; k <= last; ++k) tensors[k] = other.site(k);
  return {a, Mps(tensors)};
}

}  // namespace

TEST(Mps, Validation) {
  EXPECT_THROW(Mps(std::vector<DenseTensor>{}), ShapeError);
  EXPECT_THROW(Mps({DenseTensor({1, 2, 2}), DenseTensor({3, 2, 1})}), ShapeError);
  EXPECT_THROW(Mps({DenseTensor({1, 2, 2}), DenseTensor({2, 3, 1})}), ShapeError);
  EXPECT_THROW(Mps({DenseTensor({2, 2, 1})}), ShapeError);
  EXPECT_THROW(Mps({DenseTensor({1, 2})}), ShapeError);
  EXPECT_NO_THROW(Mps({DenseTensor({1, 2, 3}), DenseTensor({3, 2, 1})}));
}

TEST(RandomMps, Extents) {
  const auto one = random_mps(1, 5, 4, 1);
  ASSERT_EQ(one.length(), 1u);
  EXPECT_EQ(one.site(0).shape(), (DenseTensor::Shape{1, 5, 1}));
  EXPECT_EQ(random_mps(4, 2, 16, 1).bond_extents(), (std::vector<std::size_t>{1, 2, 4, 2, 1}));
  EXPECT_EQ(random_mps(6, 3, 5, 1).bond_extents(), (std::vector<std::size_t>{1, 3, 5, 5, 5, 3, 1}));
}

TEST(RandomMps, DeterministicPerSeed) {
  EXPECT_TRUE(random_mps(5, 3, 4, 42) == random_mps(5, 3, 4, 42));
  EXPECT_FALSE(random_mps(5, 3, 4, 42) == random_mps(5, 3, 4, 43));
}

TEST(RandomMps, EntryScale) {
  const auto psi = random_mps(3, 8, 16, 3);
  double sum2 = 0.0;
  std::size_t count = 0;
  for (const auto& t : psi.tensors())
    for (double v : t.values()) {
      sum2 += v * v;
      ++count;
    }
  // Variance 1/(D χ) = 1/128.
  EXPECT_NEAR(sum2 / static_cast<double>(count) * 128.0, 1.0, 0.15);
}

TEST(ToFullTensor, MatchesLoops) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto psi = random_mps(3, 2, 2, seed);
    EXPECT_LT(max_abs_diff(full(psi), full_by_loops(psi)), 1e-14);
  }
  const auto psi = random_mps(4, 3, 3, 9);
  EXPECT_LT(max_abs_diff(full(psi), full_by_loops(psi)), 1e-13);
  EXPECT_EQ(to_full_tensor(psi).shape(), (DenseTensor::Shape{3, 3, 3, 3}));
}

TEST(ToFullTensor, Guard) { EXPECT_THROW(to_full_tensor(random_mps(30, 2, 2, 1)), GuardError); }

TEST(Inner, MatchesFullDot) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_mps(4, 3, 3, seed);
    const auto b = random_mps(4, 3, 3, seed + 50);
    const double ref = dot(full_by_loops(a), full_by_loops(b));
    EXPECT_NEAR(inner(a, b), ref, 1e-10 * std::abs(ref) + 1e-14);
    EXPECT_NEAR(norm(a), std::sqrt(dot(full_by_loops(a), full_by_loops(a))), 1e-10 * norm(a));
  }
  EXPECT_THROW(inner(random_mps(3, 2, 2, 1), random_mps(4, 2, 2, 1)), ShapeError);
  EXPECT_THROW(inner(random_mps(3, 2, 2, 1), random_mps(3, 3, 2, 1)), ShapeError);
}

TEST(Add, FullTensorsAddAndBondsSum) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = random_mps(3, 3, 2, seed);
    const auto b = random_mps(3, 3, 3, seed + 7);
    const auto sum = add(a, b);
    EXPECT_LT(max_abs_diff(full(sum), plus(full(a), full(b))), 1e-10);
    for (std::size_t bond = 1; bond < 3; ++bond) {
      EXPECT_EQ(sum.bond_extent(bond), a.bond_extent(bond) + b.bond_extent(bond));
    }
    EXPECT_EQ(sum.bond_extent(0), 1u);
    EXPECT_EQ(sum.bond_extent(3), 1u);
  }
  const auto s1 = add(random_mps(1, 4, 1, 1), random_mps(1, 4, 1, 2));
  EXPECT_LT(max_abs_diff(full(s1), plus(full(random_mps(1, 4, 1, 1)), full(random_mps(1, 4, 1, 2)))), 1e-14);
}

TEST(AddShared, SingleSiteKeepsBonds) {
  for (std::size_t m = 0; m < 4; ++m) {
    const auto [a, b] = sharing_pair(4, 3, 3, m, m, 10 + m);
    const auto s = add_shared(a, b, m, m);
    EXPECT_EQ(s.bond_extents(), a.bond_extents());
    EXPECT_LT(max_abs_diff(full(s), full(add(a, b))), 1e-12);
  }
}

TEST(AddShared, OnlyInteriorBondsGrow) {
  const std::size_t n = 6;
  for (std::size_t first = 0; first < n; ++first)
    for (std::size_t last = first; last < n; ++last) {
      const auto [a, b] = sharing_pair(n, 2, 3, first, last, 100 + first * n + last);
      const auto s = add_shared(a, b, first, last);
      EXPECT_LT(max_abs_diff(full(s), full(add(a, b))), 1e-12);
      for (std::size_t bond = 0; bond <= n; ++bond) {
        const bool interior = bond > first && bond <= last;
        const std::size_t expected = interior ? a.bond_extent(bond) + b.bond_extent(bond) : a.bond_extent(bond);
        EXPECT_EQ(s.bond_extent(bond), expected) << first << ".." << last << " bond " << bond;
      }
    }
}

TEST(AddShared, RejectsDifferencesOutsideRange) {
  const auto [a, b] = sharing_pair(4, 2, 2, 1, 2, 5);
  EXPECT_THROW(add_shared(a, b, 2, 2), DomainError);
  EXPECT_THROW(add_shared(a, b, 2, 1), DomainError);
  EXPECT_THROW(add_shared(a, b, 1, 4), DomainError);
}

TEST(Scale, Linearity) {
  const auto a = random_mps(4, 3, 3, 1);
  const auto b = random_mps(4, 3, 3, 2);
  for (double c : {-2.5, 0.3, 7.0}) {
    EXPECT_NEAR(inner(scale(a, c), b), c * inner(a, b), 1e-12 * std::abs(c * inner(a, b)) + 1e-14);
  }
}

TEST(ApplySingle, Composition) {
  std::mt19937_64 rng(3);
  const auto psi = random_mps(4, 3, 3, 4);
  const auto o1 = random_operator(3, rng);
  const auto o2 = random_operator(3, rng);
  for (std::size_t m = 0; m < 4; ++m) {
    const auto twice = apply_single(apply_single(psi, m, o1), m, o2);
    const auto once = apply_single(psi, m, o2 * o1);
    EXPECT_LT(max_abs_diff(full(twice), full(once)), 1e-12);
  }
  EXPECT_THROW(apply_single(psi, 4, o1), DomainError);
  EXPECT_THROW(apply_single(psi, 0, random_operator(2, rng)), ShapeError);
}

TEST(ApplySingle, MatchesModeProduct) {
  std::mt19937_64 rng(5);
  const auto psi = random_mps(3, 4, 4, 6);
  for (std::size_t m = 0; m < 3; ++m) {
    const auto op = random_operator(4, rng);
    EXPECT_LT(max_abs_diff(full(apply_single(psi, m, op)), apply_mode(full_by_loops(psi), 3, 4, m, op)), 1e-12);
  }
}

TEST(ApplyTwoSite, SeparableOperator) {
  const auto psi = random_mps(4, 3, 3, 8);
  const auto x = x_matrix(3);
  for (std::size_t m = 0; m + 1 < 4; ++m) {
    const auto two = apply_two_site(psi, m, TwoSiteOperatorTensor::outer(x, x));
    const auto seq = apply_single(apply_single(psi, m, x), m + 1, x);
    EXPECT_LT(max_abs_diff(full(two), full(seq)), 1e-12);
  }
}

TEST(ApplyTwoSite, RandomOperatorMatchesDense) {
  std::mt19937_64 rng(9);
  const std::size_t n = 3, d = 3;
  const auto psi = random_mps(n, d, 3, 10);
  for (std::size_t m = 0; m + 1 < n; ++m) {
    const TwoSiteOperatorTensor op(random_tensor({d, d, d, d}, rng));
    const auto v = full_by_loops(psi);
    std::vector<double> ref(v.size(), 0.0);
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
      auto s = digits(flat, n, d);
      const std::size_t i1 = s[m], i2 = s[m + 1];
      for (std::size_t o1 = 0; o1 < d; ++o1)
        for (std::size_t o2 = 0; o2 < d; ++o2) {
          s[m] = o1;
          s[m + 1] = o2;
          std::size_t target = 0;
          for (std::size_t k = 0; k < n; ++k) target = target * d + s[k];
          ref[target] += op(o1, o2, i1, i2) * v[flat];
        }
    }
    EXPECT_LT(max_abs_diff(full(apply_two_site(psi, m, op)), ref), 1e-10);
  }
  EXPECT_THROW(apply_two_site(psi, 2, TwoSiteOperatorTensor::identity(d)), DomainError);
}

TEST(CanonicalizeCenter, NormAndFunctionPreserved) {
  const auto psi = random_mps(5, 3, 4, 12);
  for (std::size_t cut = 1; cut < 5; ++cut) {
    const auto cc = canonicalize_center(psi, cut);
    EXPECT_EQ(cc.cut, cut);
    EXPECT_NEAR(cc.center.frobenius_norm(), norm(psi), 1e-10 * norm(psi));
    EXPECT_NEAR(inner(cc.state, psi) / inner(psi, psi), 1.0, 1e-10);
    for (std::size_t n = 0; n < cut; ++n) {
      const auto& a = cc.state.site(n);
      const std::size_t rows = a.extent(0) * a.extent(1), cols = a.extent(2);
      const auto m = a.reshaped({rows, cols});
      EXPECT_LT(max_abs_diff(matmul(transpose(m), m), DenseTensor::identity(cols)), 1e-12);
    }
    for (std::size_t n = cut + 1; n < 5; ++n) {
      const auto& a = cc.state.site(n);
      const std::size_t rows = a.extent(0), cols = a.extent(1) * a.extent(2);
      const auto m = a.reshaped({rows, cols});
      EXPECT_LT(max_abs_diff(matmul(m, transpose(m)), DenseTensor::identity(rows)), 1e-12);
    }
  }
}

TEST(CanonicalizeCenter, Errors) {
  auto tensors = random_mps(3, 2, 2, 1).tensors();
  for (auto& t : tensors) t *= 0.0;
  EXPECT_THROW(canonicalize_center(Mps(tensors), 1), DomainError);
  EXPECT_THROW(canonicalize_center(random_mps(3, 2, 2, 1), 0), DomainError);
  EXPECT_THROW(canonicalize_center(random_mps(3, 2, 2, 1), 3), DomainError);
}

TEST(EntanglementSpectrum, MatchesDenseSchmidtValues) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto psi = random_mps(4, 3, 4, seed + 20);
    for (std::size_t cut = 1; cut < 4; ++cut) {
      const auto spec = entanglement_spectrum(psi, cut);
      const auto ref = schmidt_values_dense(full_by_loops(psi), 4, 3, cut);
      double sum2 = 0.0;
      for (std::size_t k = 0; k < spec.values.size(); ++k) {
        EXPECT_NEAR(spec.values[k], ref[k], 1e-9);
        if (k > 0) {
          EXPECT_LE(spec.values[k], spec.values[k - 1]);
        }
        sum2 += spec.values[k] * spec.values[k];
      }
      EXPECT_NEAR(sum2, 1.0, 1e-10);
      for (std::size_t k = spec.values.size(); k < ref.size(); ++k) EXPECT_LT(ref[k], 1e-7);
    }
  }
}

TEST(EntanglementSpectrum, GaugeInvariant) {
  const auto psi = random_mps(6, 2, 4, 31);
  for (std::size_t other = 1; other < 6; ++other) {
    const auto moved = canonicalize_center(psi, other).state;
    for (std::size_t cut = 1; cut < 6; ++cut) {
      const auto a = entanglement_spectrum(psi, cut).values;
      const auto b = entanglement_spectrum(moved, cut).values;
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-9);
    }
  }
}

TEST(EntanglementEntropy, Values) {
  EXPECT_EQ(entanglement_entropy({1, {1.0}}), 0.0);
  for (std::size_t chi : {2u, 5u, 16u}) {
    EntanglementSpectrum flat{1, std::vector<double>(chi, 1.0 / std::sqrt(static_cast<double>(chi)))};
    EXPECT_NEAR(entanglement_entropy(flat), std::log(static_cast<double>(chi)), 1e-12);
  }
  EXPECT_NEAR(entanglement_entropy({1, {std::sqrt(0.9), std::sqrt(0.1)}}), 0.325083, 1e-6);
  EXPECT_EQ(entanglement_entropy({1, {1.0, 0.0}}), 0.0);
}

TEST(EntanglementEntropy, ProductStateHasZeroEntropy) {
  const auto psi = product_mps({{1, 0.5}, {0.2, 1}, {1, 1}, {0.3, -1}});
  for (std::size_t cut = 1; cut < 4; ++cut) {
    const auto spec = entanglement_spectrum(psi, cut);
    EXPECT_NEAR(spec.values[0], 1.0, 1e-12);
    for (std::size_t k = 1; k < spec.values.size(); ++k) EXPECT_LT(spec.values[k], 1e-12);
    EXPECT_NEAR(entanglement_entropy(spec), 0.0, 1e-10);
  }
}

TEST(Compress, ExactWhenBondsSuffice) {
  const auto psi = random_mps(5, 2, 3, 44);
  const auto c = compress(psi, 8);
  EXPECT_LT(max_abs_diff(full(c), full(psi)), 1e-10);
  const auto doubled = add(psi, psi);
  const auto back = compress(doubled, 3);
  EXPECT_LE(back.max_bond(), 3u);
  EXPECT_LT(max_abs_diff(full(back), full(scale(psi, 2.0))), 1e-9);
}

TEST(Compress, TruncatesToChiMax) {
  const auto psi = random_mps(6, 3, 6, 45);
  const auto c = compress(psi, 2);
  EXPECT_LE(c.max_bond(), 2u);
  const double overlap = inner(c, psi) / (norm(c) * norm(psi));
  EXPECT_GT(overlap, 0.0);
  EXPECT_LE(overlap, 1.0 + 1e-12);
}

TEST(MpsIo, BinaryRoundTripIsExact) {
  const auto psi = random_mps(5, 3, 4, 77);
  std::stringstream ss;
  write_mps(ss, psi);
  const std::string bytes = ss.str();
  EXPECT_EQ(bytes.substr(0, 4), "FTNM");
  std::size_t expected = 4 + 4 + 8 + 8 + 8 * 6;
  for (const auto& t : psi.tensors()) expected += 8 * t.size();
  EXPECT_EQ(bytes.size(), expected);
  EXPECT_TRUE(read_mps(ss) == psi);
}

TEST(MpsIo, JsonRoundTripIsExact) {
  const auto psi = random_mps(4, 2, 3, 78);
  const auto j = mps_to_json(psi);
  EXPECT_EQ(j.at("bonds").get<std::vector<std::size_t>>(), psi.bond_extents());
  EXPECT_TRUE(mps_from_json(nlohmann::json::parse(j.dump())) == psi);
}

TEST(MpsIo, RejectsCorruptInput) {
  std::stringstream bad_magic("XXXX");
  EXPECT_THROW(read_mps(bad_magic), FormatError);
  std::stringstream ss;
  write_mps(ss, random_mps(3, 2, 2, 1));
  std::stringstream truncated(ss.str().substr(0, ss.str().size() - 5));
  EXPECT_THROW(read_mps(truncated), FormatError);
  auto j = mps_to_json(random_mps(3, 2, 2, 1));
  j["bonds"][1] = 5;
  EXPECT_THROW(mps_from_json(j), FormatError);
}

TEST(BruteForce, RandomSmallCases) {
  std::mt19937_64 rng(2024);
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::size_t d = 1; d <= 4; ++d)
      for (std::size_t chi = 1; chi <= 4; ++chi)
        for (int trial = 0; trial < 3; ++trial) {
          const std::uint64_t seed = rng();
          const auto a = random_mps(n, d, chi, seed);
          const auto b = random_mps(n, d, chi, seed + 1);
          const auto fa = full_by_loops(a), fb = full_by_loops(b);
          EXPECT_LT(max_abs_diff(full(a), fa), 1e-10);
          EXPECT_NEAR(inner(a, b), dot(fa, fb), 1e-10);
          EXPECT_LT(max_abs_diff(full(add(a, b)), plus(fa, fb)), 1e-10);
          const std::size_t m = rng() % n;
          const auto op = random_operator(d, rng);
          EXPECT_LT(max_abs_diff(full(apply_single(a, m, op)), apply_mode(fa, n, d, m, op)), 1e-10);
        }
}
