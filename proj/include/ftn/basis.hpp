#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ftn/tensor.hpp"

namespace ftn {

/// Expansion order and quadrature size for the single-oscillator basis.
struct BasisSpec {
  std::size_t order = 8;             // number of basis functions per variable
  std::size_t quadrature_nodes = 0;  // 0 selects 2 * order + 8

  /// Returns a copy with the quadrature size filled in; throws DomainError
  /// when order < 2 or the node count is too small for exact integration.
  BasisSpec validated() const;
  std::size_t nodes() const { return quadrature_nodes ? quadrature_nodes : 2 * order + 8; }

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

/// Square matrix of a one-variable operator in the basis, O(s', s).
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(std::size_t dim);
  explicit OperatorMatrix(DenseTensor m);

  static OperatorMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t row, std::size_t col) const { return m_(row, col); }
  double& operator()(std::size_t row, std::size_t col) { return m_(row, col); }
  const DenseTensor& tensor() const { return m_; }

  OperatorMatrix transposed() const;
  OperatorMatrix& operator+=(const OperatorMatrix& other);
  OperatorMatrix& operator*=(double factor);

  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
  friend OperatorMatrix operator*(double f, OperatorMatrix a) { return a *= f; }
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend bool operator==(const OperatorMatrix&, const OperatorMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  DenseTensor m_{DenseTensor::Shape{0, 0}};
};

/// Fourth-order tensor O(n1', n2', n1, n2) of a two-variable operator.
class TwoSiteOperatorTensor {
 public:
  TwoSiteOperatorTensor() = default;
  explicit TwoSiteOperatorTensor(std::size_t dim);
  explicit TwoSiteOperatorTensor(DenseTensor t);

  static TwoSiteOperatorTensor identity(std::size_t dim);
  /// (a ⊗ b)(n1', n2', n1, n2) = a(n1', n1) b(n2', n2).
  static TwoSiteOperatorTensor outer(const OperatorMatrix& a, const OperatorMatrix& b);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t o1, std::size_t o2, std::size_t i1, std::size_t i2) const {
    return t_[((o1 * dim_ + o2) * dim_ + i1) * dim_ + i2];
  }
  double& operator()(std::size_t o1, std::size_t o2, std::size_t i1, std::size_t i2) {
    return t_[((o1 * dim_ + o2) * dim_ + i1) * dim_ + i2];
  }
  const DenseTensor& tensor() const { return t_; }

 private:
  std::size_t dim_ = 0;
  DenseTensor t_{DenseTensor::Shape{0, 0, 0, 0}};
};

/// Hermite function of order s (normalized harmonic-oscillator eigenfunction),
/// evaluated by the normalized three-term recurrence.
double sob_eval(std::size_t s, double x);

/// All Hermite functions φ_0..φ_{count-1} at x.
std::vector<double> sob_eval_all(std::size_t count, double x);

/// dφ_s/dx from the polynomial derivative identity φ_s' = √(2s) φ_{s-1} - x φ_s.
double sob_derivative(std::size_t s, double x);

struct GaussHermiteRule {
  std::vector<double> nodes;    // ascending, symmetric about 0
  std::vector<double> weights;  // for ∫ e^{-x²} f(x) dx
  /// weights[i] * exp(nodes[i]^2), computed without overflow; integrates
  /// plain ∫ f(x) dx for f = e^{-x²} × polynomial.
  std::vector<double> scaled_weights;
};

/// K-point Gauss-Hermite rule (Golub-Welsch, Newton-polished nodes).
GaussHermiteRule gauss_hermite(std::size_t k);

/// Kernel returning Ô[φ_s](x).
using OneSiteKernel = std::function<double(std::size_t s, double x)>;
/// Kernel returning Ô[φ_{n1}(x1) φ_{n2}(x2)].
using TwoSiteKernel = std::function<double(std::size_t n1, std::size_t n2, double x1, double x2)>;

/// O(s', s) = ∫ φ_{s'}(x) Ô[φ_s](x) dx by Gauss-Hermite quadrature.
OperatorMatrix operator_matrix_quadrature(const OneSiteKernel& kernel, const BasisSpec& spec);

TwoSiteOperatorTensor two_site_matrix_quadrature(const TwoSiteKernel& kernel,
                                                 const BasisSpec& spec);

/// d/dx from the ladder relations: D(s-1, s) = √(s/2), D(s+1, s) = -√((s+1)/2).
OperatorMatrix d_matrix(std::size_t order);

/// x from the ladder relations: X(s-1, s) = X(s, s-1) = √(s/2).
OperatorMatrix x_matrix(std::size_t order);

/// k-th power of a truncated matrix (k >= 1).
OperatorMatrix matrix_power(const OperatorMatrix& m, std::size_t k);

/// -½ D², with D truncated before squaring.
OperatorMatrix kinetic_matrix(std::size_t order);

/// Writes the matrix row-major as CSV, scientific notation with 17 significant digits.
void write_csv(std::ostream& os, const OperatorMatrix& m);

}  // namespace ftn
