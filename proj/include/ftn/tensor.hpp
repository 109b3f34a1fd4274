#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ftn {

/// Dense row-major tensor of doubles.
///
/// A rank-0 tensor (empty shape) holds exactly one element, so scalars
/// produced by full contractions are ordinary tensors.
class DenseTensor {
 public:
  using Shape = std::vector<std::size_t>;

  DenseTensor();
  explicit DenseTensor(Shape shape);
  DenseTensor(Shape shape, std::vector<double> data);

  static DenseTensor scalar(double value);
  static DenseTensor identity(std::size_t n);
  static DenseTensor vector(std::vector<double> values);
  /// Builds a matrix from nested rows; all rows must have equal length.
  static DenseTensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double operator[](std::size_t flat) const { return data_[flat]; }
  double& operator[](std::size_t flat) { return data_[flat]; }

  double at(std::span<const std::size_t> index) const;
  double& at(std::span<const std::size_t> index);
  double operator()(std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t i) { return data_[i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  /// Same data, new shape with equal element count.
  DenseTensor reshaped(Shape new_shape) const;

  DenseTensor& operator+=(const DenseTensor& other);
  DenseTensor& operator-=(const DenseTensor& other);
  DenseTensor& operator*=(double factor);

  double max_abs() const;
  double frobenius_norm() const;
  bool all_finite() const;

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator-(DenseTensor a, const DenseTensor& b);
DenseTensor operator*(double factor, DenseTensor a);

std::size_t shape_product(std::span<const std::size_t> shape);

/// Largest absolute elementwise difference; shapes must agree.
double max_abs_diff(const DenseTensor& a, const DenseTensor& b);

/// Sums over the paired axes of `a` and `b`. The result carries the free
/// axes of `a` followed by the free axes of `b`, each in original order.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const std::size_t> axes_a,
                     std::span<const std::size_t> axes_b);
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::initializer_list<std::size_t> axes_a,
                     std::initializer_list<std::size_t> axes_b);

/// Transposes axes by `perm` (result axis i is input axis perm[i]) and
/// reinterprets the row-major result with `new_shape`.
DenseTensor permute_reshape(const DenseTensor& a, std::span<const std::size_t> perm,
                            DenseTensor::Shape new_shape);
DenseTensor permute(const DenseTensor& a, std::span<const std::size_t> perm);
DenseTensor permute(const DenseTensor& a, std::initializer_list<std::size_t> perm);

DenseTensor matmul(const DenseTensor& a, const DenseTensor& b);
DenseTensor transpose(const DenseTensor& m);

struct QrResult {
  DenseTensor q;  // p x min(p,q), orthonormal columns
  DenseTensor r;  // min(p,q) x q, upper triangular, non-negative diagonal
};

/// Thin Householder QR of a rank-2 tensor.
QrResult qr(const DenseTensor& m);

struct EigResult {
  std::vector<double> values;  // ascending
  DenseTensor vectors;         // column k is the eigenvector of values[k]
};

/// Cyclic Jacobi eigensolver for real symmetric matrices. Throws
/// SymmetryError when max|m - m^T| exceeds `symmetry_tol` (scaled by
/// max(1, max|m|)).
EigResult symmetric_eig(const DenseTensor& m, double symmetry_tol = 1e-10);

struct SvdResult {
  DenseTensor u;               // p x k, k = min(p, q)
  std::vector<double> values;  // descending, non-negative
  DenseTensor v;               // q x k, orthonormal columns
};

/// Thin SVD by one-sided Jacobi rotations; small singular values keep
/// full absolute accuracy. Columns of u belonging to zero singular values
/// are zero.
SvdResult svd(const DenseTensor& m);

/// Row-major C = alpha * op(A) * op(B) + beta * C, op(A) is m x k, op(B) is k x n.
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k,
          double alpha, std::span<const double> a, std::span<const double> b,
          double beta, std::span<double> c);

}  // namespace ftn
