#include "ftn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ftn/errors.hpp"

namespace ftn {

namespace {

std::string shape_string(std::span<const std::size_t> shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::vector<std::size_t> row_major_strides(std::span<const std::size_t> shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) strides[i - 1] = strides[i] * shape[i];
  return strides;
}

bool is_permutation_of(std::span<const std::size_t> perm, std::size_t rank) {
  if (perm.size() != rank) return false;
  std::vector<bool> seen(rank, false);
  for (auto p : perm) {
    if (p >= rank || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

}  // namespace

std::size_t shape_product(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

DenseTensor::DenseTensor() : data_(1, 0.0) {}

DenseTensor::DenseTensor(Shape shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string(shape_));
  }
}

DenseTensor DenseTensor::scalar(double value) { return DenseTensor({}, {value}); }

DenseTensor DenseTensor::identity(std::size_t n) {
  DenseTensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

DenseTensor DenseTensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return DenseTensor({n}, std::move(values));
}

DenseTensor DenseTensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t nrows = rows.size();
  const std::size_t ncols = nrows ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(nrows * ncols);
  for (const auto& row : rows) {
    if (row.size() != ncols) throw ShapeError("ragged matrix rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseTensor({nrows, ncols}, std::move(data));
}

double DenseTensor::at(std::span<const std::size_t> index) const {
  return const_cast<DenseTensor&>(*this).at(index);
}

double& DenseTensor::at(std::span<const std::size_t> index) {
  if (index.size() != shape_.size()) throw ShapeError("index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= shape_[i]) throw ShapeError("index out of range");
    flat = flat * shape_[i] + index[i];
  }
  return data_[flat];
}

DenseTensor DenseTensor::reshaped(Shape new_shape) const {
  if (shape_product(new_shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " +
                     shape_string(new_shape));
  }
  return DenseTensor(std::move(new_shape), data_);
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
  if (shape_ != other.shape_) {
    throw ShapeError("cannot add " + shape_string(other.shape_) + " to " +
                     shape_string(shape_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
  if (shape_ != other.shape_) {
    throw ShapeError("cannot subtract " + shape_string(other.shape_) + " from " +
                     shape_string(shape_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

DenseTensor& DenseTensor::operator*=(double factor) {
  for (auto& v : data_) v *= factor;
  return *this;
}

double DenseTensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double DenseTensor::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool DenseTensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
DenseTensor operator*(double factor, DenseTensor a) { return a *= factor; }

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("max_abs_diff: shapes " + shape_string(a.shape()) + " and " +
                     shape_string(b.shape()) + " differ");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k,
          double alpha, std::span<const double> a, std::span<const double> b, double beta,
          std::span<double> c) {
  if (beta == 0.0) {
    std::fill(c.begin(), c.begin() + m * n, 0.0);
  } else if (beta != 1.0) {
    for (std::size_t i = 0; i < m * n; ++i) c[i] *= beta;
  }
  if (m == 0 || n == 0 || k == 0) return;
  const double* A = a.data();
  const double* B = b.data();
  double* C = c.data();
  if (!trans_a && !trans_b) {
    for (std::size_t i = 0; i < m; ++i) {
      double* ci = C + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const double aip = alpha * A[i * k + p];
        if (aip == 0.0) continue;
        const double* bp = B + p * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
      }
    }
  } else if (trans_a && !trans_b) {
    for (std::size_t p = 0; p < k; ++p) {
      const double* ap = A + p * m;
      const double* bp = B + p * n;
      for (std::size_t i = 0; i < m; ++i) {
        const double api = alpha * ap[i];
        if (api == 0.0) continue;
        double* ci = C + i * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
      }
    }
  } else if (!trans_a && trans_b) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* ai = A + i * k;
      for (std::size_t j = 0; j < n; ++j) {
        const double* bj = B + j * k;
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
        C[i * n + j] += alpha * s;
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += A[p * m + i] * B[j * k + p];
        C[i * n + j] += alpha * s;
      }
    }
  }
}

DenseTensor permute_reshape(const DenseTensor& a, std::span<const std::size_t> perm,
                            DenseTensor::Shape new_shape) {
  if (!is_permutation_of(perm, a.rank())) {
    throw ShapeError("invalid permutation for tensor of shape " + shape_string(a.shape()));
  }
  if (shape_product(new_shape) != a.size()) {
    throw ShapeError("permute_reshape: size mismatch, " + shape_string(a.shape()) + " -> " +
                     shape_string(new_shape));
  }
  const std::size_t rank = a.rank();
  bool identity = true;
  for (std::size_t i = 0; i < rank; ++i) identity = identity && perm[i] == i;
  if (identity) return DenseTensor(std::move(new_shape), a.values());

  const auto in_strides = row_major_strides(a.shape());
  std::vector<std::size_t> out_extent(rank), src_stride(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    out_extent[i] = a.extent(perm[i]);
    src_stride[i] = in_strides[perm[i]];
  }
  std::vector<double> out(a.size());
  std::vector<std::size_t> counter(rank, 0);
  std::size_t src = 0;
  const auto in = a.data();
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out[flat] = in[src];
    for (std::size_t ax = rank; ax-- > 0;) {
      if (++counter[ax] < out_extent[ax]) {
        src += src_stride[ax];
        break;
      }
      src -= src_stride[ax] * (out_extent[ax] - 1);
      counter[ax] = 0;
    }
  }
  return DenseTensor(std::move(new_shape), std::move(out));
}

DenseTensor permute(const DenseTensor& a, std::span<const std::size_t> perm) {
  DenseTensor::Shape shape;
  for (auto p : perm) shape.push_back(p < a.rank() ? a.extent(p) : 0);
  return permute_reshape(a, perm, std::move(shape));
}

DenseTensor permute(const DenseTensor& a, std::initializer_list<std::size_t> perm) {
  return permute(a, std::span<const std::size_t>(perm.begin(), perm.size()));
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const std::size_t> axes_a,
                     std::span<const std::size_t> axes_b) {
  if (axes_a.size() != axes_b.size()) throw ShapeError("contract: axis lists differ in length");
  std::vector<bool> used_a(a.rank(), false), used_b(b.rank(), false);
  std::size_t k = 1;
  for (std::size_t i = 0; i < axes_a.size(); ++i) {
    const auto ia = axes_a[i], ib = axes_b[i];
    if (ia >= a.rank() || ib >= b.rank() || used_a[ia] || used_b[ib]) {
      throw ShapeError("contract: invalid axis pairing");
    }
    if (a.extent(ia) != b.extent(ib)) {
      throw ShapeError("contract: paired extents differ (" + std::to_string(a.extent(ia)) +
                       " vs " + std::to_string(b.extent(ib)) + ")");
    }
    used_a[ia] = used_b[ib] = true;
    k *= a.extent(ia);
  }
  std::vector<std::size_t> perm_a, perm_b;
  DenseTensor::Shape out_shape;
  std::size_t m = 1, n = 1;
  for (std::size_t i = 0; i < a.rank(); ++i) {
    if (!used_a[i]) {
      perm_a.push_back(i);
      out_shape.push_back(a.extent(i));
      m *= a.extent(i);
    }
  }
  perm_a.insert(perm_a.end(), axes_a.begin(), axes_a.end());
  perm_b.assign(axes_b.begin(), axes_b.end());
  for (std::size_t i = 0; i < b.rank(); ++i) {
    if (!used_b[i]) {
      perm_b.push_back(i);
      out_shape.push_back(b.extent(i));
      n *= b.extent(i);
    }
  }
  const DenseTensor pa = permute_reshape(a, perm_a, {m, k});
  const DenseTensor pb = permute_reshape(b, perm_b, {k, n});
  DenseTensor out(out_shape);
  gemm(false, false, m, n, k, 1.0, pa.data(), pb.data(), 0.0, out.data());
  return out;
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::initializer_list<std::size_t> axes_a,
                     std::initializer_list<std::size_t> axes_b) {
  return contract(a, b, std::span<const std::size_t>(axes_a.begin(), axes_a.size()),
                  std::span<const std::size_t>(axes_b.begin(), axes_b.size()));
}

DenseTensor matmul(const DenseTensor& a, const DenseTensor& b) {
  if (a.rank() != 2 || b.rank() != 2) throw ShapeError("matmul expects rank-2 tensors");
  return contract(a, b, {1}, {0});
}

DenseTensor transpose(const DenseTensor& m) {
  if (m.rank() != 2) throw ShapeError("transpose expects a rank-2 tensor");
  return permute(m, {1, 0});
}

QrResult qr(const DenseTensor& m) {
  if (m.rank() != 2) throw ShapeError("qr expects a rank-2 tensor");
  const std::size_t p = m.extent(0), q = m.extent(1);
  const std::size_t kmin = std::min(p, q);
  DenseTensor r = m;
  // Householder vectors stored column by column, v_j has support on rows j..p-1.
  std::vector<std::vector<double>> reflectors;
  std::vector<double> betas;
  reflectors.reserve(kmin);
  for (std::size_t j = 0; j < kmin; ++j) {
    double norm2 = 0.0;
    for (std::size_t i = j; i < p; ++i) norm2 += r(i, j) * r(i, j);
    const double norm = std::sqrt(norm2);
    std::vector<double> v(p - j, 0.0);
    double beta = 0.0;
    if (norm > 0.0) {
      const double alpha = r(j, j) >= 0.0 ? -norm : norm;
      for (std::size_t i = j; i < p; ++i) v[i - j] = r(i, j);
      v[0] -= alpha;
      double vnorm2 = 0.0;
      for (double x : v) vnorm2 += x * x;
      if (vnorm2 > 0.0) beta = 2.0 / vnorm2;
    }
    if (beta != 0.0) {
      for (std::size_t c = j; c < q; ++c) {
        double s = 0.0;
        for (std::size_t i = j; i < p; ++i) s += v[i - j] * r(i, c);
        s *= beta;
        for (std::size_t i = j; i < p; ++i) r(i, c) -= s * v[i - j];
      }
    }
    reflectors.push_back(std::move(v));
    betas.push_back(beta);
  }

  DenseTensor qm({p, kmin});
  for (std::size_t i = 0; i < kmin; ++i) qm(i, i) = 1.0;
  for (std::size_t j = kmin; j-- > 0;) {
    const auto& v = reflectors[j];
    const double beta = betas[j];
    if (beta == 0.0) continue;
    for (std::size_t c = 0; c < kmin; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < p; ++i) s += v[i - j] * qm(i, c);
      s *= beta;
      for (std::size_t i = j; i < p; ++i) qm(i, c) -= s * v[i - j];
    }
  }

  DenseTensor rm({kmin, q});
  for (std::size_t i = 0; i < kmin; ++i) {
    const double sign = r(i, i) < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = i; c < q; ++c) rm(i, c) = sign * r(i, c);
    if (sign < 0.0) {
      for (std::size_t row = 0; row < p; ++row) qm(row, i) = -qm(row, i);
    }
  }
  return {std::move(qm), std::move(rm)};
}

SvdResult svd(const DenseTensor& m) {
  if (m.rank() != 2) throw ShapeError("svd expects a matrix");
  if (m.extent(0) < m.extent(1)) {
    SvdResult t = svd(transpose(m));
    return {std::move(t.v), std::move(t.values), std::move(t.u)};
  }
  const std::size_t p = m.extent(0), q = m.extent(1);
  // Work on columns: a = m^T (q x p) so column j of m is the contiguous row j.
  DenseTensor a = transpose(m);
  DenseTensor v = DenseTensor::identity(q);
  const double tol = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < q; ++i) {
      for (std::size_t j = i + 1; j < q; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < p; ++k) {
          alpha += a(i, k) * a(i, k);
          beta += a(j, k) * a(j, k);
          gamma += a(i, k) * a(j, k);
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (std::size_t k = 0; k < p; ++k) {
          const double x = a(i, k), y = a(j, k);
          a(i, k) = c * x - s * y;
          a(j, k) = s * x + c * y;
        }
        for (std::size_t k = 0; k < q; ++k) {
          const double x = v(k, i), y = v(k, j);
          v(k, i) = c * x - s * y;
          v(k, j) = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sigma(q);
  for (std::size_t j = 0; j < q; ++j) {
    double s2 = 0.0;
    for (std::size_t k = 0; k < p; ++k) s2 += a(j, k) * a(j, k);
    sigma[j] = std::sqrt(s2);
  }
  std::vector<std::size_t> order(q);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });
  SvdResult out{DenseTensor({p, q}), std::vector<double>(q), DenseTensor({q, q})};
  for (std::size_t c = 0; c < q; ++c) {
    const std::size_t j = order[c];
    out.values[c] = sigma[j];
    for (std::size_t k = 0; k < q; ++k) out.v(k, c) = v(k, j);
    if (sigma[j] > 0.0)
      for (std::size_t k = 0; k < p; ++k) out.u(k, c) = a(j, k) / sigma[j];
  }
  return out;
}

EigResult symmetric_eig(const DenseTensor& m, double symmetry_tol) {
  if (m.rank() != 2 || m.extent(0) != m.extent(1)) {
    throw ShapeError("symmetric_eig expects a square matrix");
  }
  const std::size_t n = m.extent(0);
  const double scale = std::max(1.0, m.max_abs());
  DenseTensor a = m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > symmetry_tol * scale) {
        throw SymmetryError("symmetric_eig: matrix is not symmetric at (" + std::to_string(i) +
                            "," + std::to_string(j) + ")");
      }
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = a(j, i) = avg;
    }
  }
  DenseTensor v = DenseTensor::identity(n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off == 0.0) break;
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) diag += d[i] * d[i];
    if (off <= 1e-32 * diag || std::sqrt(off) < 1e-300) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(d[p]) + g == std::abs(d[p]) &&
            std::abs(d[q]) + g == std::abs(d[q])) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double h = d[q] - d[p];
        double t;
        if (std::abs(h) + g == std::abs(h)) {
          t = apq / h;
        } else {
          const double theta = 0.5 * h / apq;
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        d[p] -= t * apq;
        d[q] += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p), arq = a(r, q);
          const double nrp = arp - s * (arq + tau * arp);
          const double nrq = arq + s * (arp - tau * arq);
          a(r, p) = a(p, r) = nrp;
          a(r, q) = a(q, r) = nrq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  EigResult out;
  out.values.resize(n);
  out.vectors = DenseTensor({n, n});
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

}  // namespace ftn
