#include "ftn/basis.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "ftn/errors.hpp"

namespace ftn {

BasisSpec BasisSpec::validated() const {
  if (order < 2) throw DomainError("basis order must be at least 2");
  BasisSpec out = *this;
  out.quadrature_nodes = nodes();
  if (out.quadrature_nodes < 2 * order + 8) {
    throw DomainError("quadrature node count " + std::to_string(out.quadrature_nodes) +
                      " is below 2*order+8 = " + std::to_string(2 * order + 8));
  }
  return out;
}

OperatorMatrix::OperatorMatrix(std::size_t dim) : dim_(dim), m_({dim, dim}) {}

OperatorMatrix::OperatorMatrix(DenseTensor m) : dim_(m.rank() == 2 ? m.extent(0) : 0), m_(std::move(m)) {
  if (m_.rank() != 2 || m_.extent(0) != m_.extent(1)) {
    throw ShapeError("operator matrix must be square");
  }
}

OperatorMatrix OperatorMatrix::identity(std::size_t dim) {
  return OperatorMatrix(DenseTensor::identity(dim));
}

OperatorMatrix OperatorMatrix::transposed() const { return OperatorMatrix(transpose(m_)); }

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& other) {
  m_ += other.m_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(double factor) {
  m_ *= factor;
  return *this;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  return OperatorMatrix(matmul(a.m_, b.m_));
}

TwoSiteOperatorTensor::TwoSiteOperatorTensor(std::size_t dim)
    : dim_(dim), t_({dim, dim, dim, dim}) {}

TwoSiteOperatorTensor::TwoSiteOperatorTensor(DenseTensor t)
    : dim_(t.rank() == 4 ? t.extent(0) : 0), t_(std::move(t)) {
  if (t_.rank() != 4 || t_.extent(1) != dim_ || t_.extent(2) != dim_ || t_.extent(3) != dim_) {
    throw ShapeError("two-site operator tensor must have shape [D,D,D,D]");
  }
}

TwoSiteOperatorTensor TwoSiteOperatorTensor::identity(std::size_t dim) {
  TwoSiteOperatorTensor t(dim);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) t(a, b, a, b) = 1.0;
  return t;
}

TwoSiteOperatorTensor TwoSiteOperatorTensor::outer(const OperatorMatrix& a,
                                                   const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw ShapeError("outer: operator dimensions differ");
  const std::size_t d = a.dim();
  TwoSiteOperatorTensor t(d);
  for (std::size_t o1 = 0; o1 < d; ++o1)
    for (std::size_t o2 = 0; o2 < d; ++o2)
      for (std::size_t i1 = 0; i1 < d; ++i1)
        for (std::size_t i2 = 0; i2 < d; ++i2) t(o1, o2, i1, i2) = a(o1, i1) * b(o2, i2);
  return t;
}

std::vector<double> sob_eval_all(std::size_t count, double x) {
  std::vector<double> phi(count);
  if (count == 0) return phi;
  phi[0] = std::exp(-0.5 * x * x) / std::sqrt(std::sqrt(std::numbers::pi));
  if (count > 1) phi[1] = std::numbers::sqrt2 * x * phi[0];
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const double kk = static_cast<double>(k);
    phi[k + 1] = std::sqrt(2.0 / (kk + 1.0)) * x * phi[k] - std::sqrt(kk / (kk + 1.0)) * phi[k - 1];
  }
  return phi;
}

double sob_eval(std::size_t s, double x) { return sob_eval_all(s + 1, x)[s]; }

double sob_derivative(std::size_t s, double x) {
  const auto phi = sob_eval_all(s + 1, x);
  const double lower = s > 0 ? std::sqrt(2.0 * static_cast<double>(s)) * phi[s - 1] : 0.0;
  return lower - x * phi[s];
}

GaussHermiteRule gauss_hermite(std::size_t k) {
  if (k == 0) throw DomainError("gauss_hermite needs at least one node");
  // Golub-Welsch: the symmetric tridiagonal Jacobi matrix of the Hermite
  // recurrence has the nodes as eigenvalues.
  DenseTensor jacobi({k, k});
  for (std::size_t i = 1; i < k; ++i) {
    jacobi(i - 1, i) = jacobi(i, i - 1) = std::sqrt(0.5 * static_cast<double>(i));
  }
  std::vector<double> nodes = symmetric_eig(jacobi).values;

  for (double& x : nodes) {
    for (int it = 0; it < 8; ++it) {
      const auto phi = sob_eval_all(k + 1, x);
      const double deriv = std::sqrt(2.0 * static_cast<double>(k)) * phi[k - 1] - x * phi[k];
      if (deriv == 0.0) break;
      const double step = phi[k] / deriv;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
  }
  for (std::size_t i = 0; i < k / 2; ++i) {
    const double half = 0.5 * (nodes[k - 1 - i] - nodes[i]);
    nodes[i] = -half;
    nodes[k - 1 - i] = half;
  }
  if (k % 2 == 1) nodes[k / 2] = 0.0;

  GaussHermiteRule rule;
  rule.nodes = nodes;
  rule.weights.resize(k);
  rule.scaled_weights.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    // Christoffel numbers from the orthonormal functions: w e^{x²} = 1 / Σ φ_j(x)².
    const auto phi = sob_eval_all(k, nodes[i]);
    double sum = 0.0;
    for (double p : phi) sum += p * p;
    rule.scaled_weights[i] = 1.0 / sum;
    rule.weights[i] = rule.scaled_weights[i] * std::exp(-nodes[i] * nodes[i]);
  }
  for (std::size_t i = 0; i < k / 2; ++i) {
    for (auto* w : {&rule.weights, &rule.scaled_weights}) {
      const double avg = 0.5 * ((*w)[i] + (*w)[k - 1 - i]);
      (*w)[i] = (*w)[k - 1 - i] = avg;
    }
  }
  return rule;
}

OperatorMatrix operator_matrix_quadrature(const OneSiteKernel& kernel, const BasisSpec& spec) {
  const BasisSpec basis = spec.validated();
  const std::size_t d = basis.order;
  const auto rule = gauss_hermite(basis.quadrature_nodes);
  OperatorMatrix out(d);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    const auto phi = sob_eval_all(d, x);
    for (std::size_t s = 0; s < d; ++s) {
      const double value = kernel(s, x);
      if (!std::isfinite(value)) {
        throw DomainError("operator kernel is not finite at x = " + std::to_string(x));
      }
      const double wv = rule.scaled_weights[i] * value;
      for (std::size_t sp = 0; sp < d; ++sp) out(sp, s) += wv * phi[sp];
    }
  }
  return out;
}

TwoSiteOperatorTensor two_site_matrix_quadrature(const TwoSiteKernel& kernel,
                                                 const BasisSpec& spec) {
  const BasisSpec basis = spec.validated();
  const std::size_t d = basis.order;
  const auto rule = gauss_hermite(basis.quadrature_nodes);
  const std::size_t k = rule.nodes.size();
  std::vector<std::vector<double>> phi(k);
  for (std::size_t i = 0; i < k; ++i) phi[i] = sob_eval_all(d, rule.nodes[i]);

  TwoSiteOperatorTensor out(d);
  std::vector<double> values(d * d);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double x1 = rule.nodes[i], x2 = rule.nodes[j];
      const double w = rule.scaled_weights[i] * rule.scaled_weights[j];
      for (std::size_t n1 = 0; n1 < d; ++n1) {
        for (std::size_t n2 = 0; n2 < d; ++n2) {
          const double v = kernel(n1, n2, x1, x2);
          if (!std::isfinite(v)) throw DomainError("two-site kernel is not finite");
          values[n1 * d + n2] = w * v;
        }
      }
      for (std::size_t o1 = 0; o1 < d; ++o1) {
        for (std::size_t o2 = 0; o2 < d; ++o2) {
          const double bra = phi[i][o1] * phi[j][o2];
          for (std::size_t n1 = 0; n1 < d; ++n1)
            for (std::size_t n2 = 0; n2 < d; ++n2)
              out(o1, o2, n1, n2) += bra * values[n1 * d + n2];
        }
      }
    }
  }
  return out;
}

OperatorMatrix d_matrix(std::size_t order) {
  if (order < 2) throw DomainError("d_matrix: order must be at least 2");
  OperatorMatrix d(order);
  for (std::size_t s = 1; s < order; ++s) {
    const double v = std::sqrt(0.5 * static_cast<double>(s));
    d(s - 1, s) = v;
    d(s, s - 1) = -v;
  }
  return d;
}

OperatorMatrix x_matrix(std::size_t order) {
  if (order < 2) throw DomainError("x_matrix: order must be at least 2");
  OperatorMatrix x(order);
  for (std::size_t s = 1; s < order; ++s) {
    const double v = std::sqrt(0.5 * static_cast<double>(s));
    x(s - 1, s) = v;
    x(s, s - 1) = v;
  }
  return x;
}

OperatorMatrix matrix_power(const OperatorMatrix& m, std::size_t k) {
  if (k == 0) throw DomainError("matrix_power: exponent must be positive");
  OperatorMatrix out = m;
  for (std::size_t i = 1; i < k; ++i) out = out * m;
  return out;
}

OperatorMatrix kinetic_matrix(std::size_t order) {
  return -0.5 * matrix_power(d_matrix(order), 2);
}

void write_csv(std::ostream& os, const OperatorMatrix& m) {
  char buf[40];
  for (std::size_t r = 0; r < m.dim(); ++r) {
    for (std::size_t c = 0; c < m.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.16e", m(r, c));
      os << (c ? "," : "") << buf;
    }
    os << '\n';
  }
}

}  // namespace ftn
