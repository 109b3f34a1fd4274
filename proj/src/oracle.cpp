#include "ftn/oracle.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ftn/errors.hpp"

namespace ftn {

namespace {

DenseTensor kron(const DenseTensor& a, const DenseTensor& b) {
  const std::size_t ar = a.extent(0), ac = a.extent(1), br = b.extent(0), bc = b.extent(1);
  DenseTensor out({ar * br, ac * bc});
  for (std::size_t i = 0; i < ar; ++i)
    for (std::size_t j = 0; j < ac; ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (std::size_t k = 0; k < br; ++k)
        for (std::size_t l = 0; l < bc; ++l) out(i * br + k, j * bc + l) = aij * b(k, l);
    }
  return out;
}

// I_{D^first} ⊗ ops... ⊗ I_{D^(N-first-len)}
DenseTensor embed(const std::vector<DenseTensor>& ops, std::size_t first, std::size_t n_sites, std::size_t d) {
  DenseTensor out = DenseTensor::identity(1);
  for (std::size_t m = 0; m < n_sites; ++m) {
    const bool active = m >= first && m < first + ops.size();
    out = kron(out, active ? ops[m - first] : DenseTensor::identity(d));
  }
  return out;
}

std::size_t checked_power(std::size_t d, std::size_t n, std::size_t guard) {
  std::size_t size = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (size > guard / d) {
      throw GuardError("dense size " + std::to_string(d) + "^" + std::to_string(n) + " exceeds guard " +
                       std::to_string(guard));
    }
    size *= d;
  }
  return size;
}

std::vector<double> mat_vec(const DenseTensor& a, const std::vector<double>& x) {
  std::vector<double> y(a.extent(0), 0.0);
  gemm(false, false, a.extent(0), 1, a.extent(1), 1.0, a.data(), x, 0.0, y);
  return y;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Adam on the Rayleigh quotient x·Ax / x·x.
VectorSolve minimize_rayleigh(const DenseTensor& a, const OptimizerConfig& config) {
  config.validate();
  const std::size_t n = a.extent(0);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<DenseTensor> x(1, DenseTensor({n}));
  for (double& v : x[0].data()) v = normal(rng) / std::sqrt(static_cast<double>(n));

  AdamState adam = AdamState::zeros_like(x);
  PlateauSchedule schedule(config);
  std::vector<double> history;
  double lr = config.lr;
  VectorSolve out;
  std::vector<DenseTensor> grad(1, DenseTensor({n}));
  while (history.size() < config.max_iters) {
    const std::vector<double>& v = x[0].values();
    const auto av = mat_vec(a, v);
    const double norm2 = dot(v, v);
    const double value = dot(v, av) / norm2;
    if (!std::isfinite(value)) {
      throw DivergenceError("dense loss became non-finite at iteration " + std::to_string(history.size()));
    }
    history.push_back(value);
    const auto action = schedule.observe(history);
    if (action == PlateauSchedule::Action::kStop) {
      out.converged = true;
      break;
    }
    if (history.size() == config.max_iters) break;
    if (action == PlateauSchedule::Action::kHalve) lr *= 0.5;
    for (std::size_t i = 0; i < n; ++i) grad[0][i] = 2.0 * (av[i] - value * v[i]) / norm2;
    adam_step(adam, x, grad, lr, config.beta1, config.beta2, config.eps);
  }
  out.value = history.back();
  out.iterations = history.size();
  out.vector = x[0].values();
  const double nrm = std::sqrt(dot(out.vector, out.vector));
  for (double& v : out.vector) v /= nrm;
  return out;
}

}  // namespace

DenseProblem dense_hamiltonian(const OscillatorChain& model, const BasisSpec& spec, std::size_t guard) {
  model.validate();
  const BasisSpec basis = spec.validated();
  const std::size_t n_sites = model.n_sites, d = basis.order;
  const std::size_t size = checked_power(d, n_sites, guard);
  const ChainOperators ops(basis);
  DenseProblem problem{DenseTensor({size, size}), n_sites, d};
  for (std::size_t m = 0; m < n_sites; ++m) {
    problem.h += embed({ops.onsite(model.frequency(m)).tensor()}, m, n_sites, d);
    if (model.gamma != 0.0 && m + 1 < n_sites) {
      problem.h += model.gamma * embed({ops.x.tensor(), ops.x.tensor()}, m, n_sites, d);
    }
    if (model.gamma3 != 0.0 && m + 2 < n_sites) {
      problem.h += model.gamma3 * embed({ops.x.tensor(), ops.x.tensor(), ops.x.tensor()}, m, n_sites, d);
    }
  }
  return problem;
}

DenseGroundState dense_ground_state(const DenseProblem& problem) {
  const auto eig = symmetric_eig(problem.h);
  const std::size_t n = problem.size();
  DenseGroundState out;
  out.energy = eig.values.front();
  out.vector.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.vector[i] = eig.vectors(i, 0);
  return out;
}

FullTensorResult full_tensor_solve(const OscillatorChain& model, const BasisSpec& spec,
                                   const OptimizerConfig& config, std::size_t guard) {
  const DenseProblem problem = dense_hamiltonian(model, spec, guard);
  const VectorSolve solve = minimize_rayleigh(problem.h, config);
  FullTensorResult out;
  out.energy = solve.value;
  out.iterations = solve.iterations;
  out.converged = solve.converged;
  out.coefficients = DenseTensor(DenseTensor::Shape(problem.n_sites, problem.dim), solve.vector);
  return out;
}

VectorSolve single_variable_solve(const std::vector<OperatorMatrix>& terms, const BasisSpec& spec,
                                  const OptimizerConfig& config, SingleVariableMode mode) {
  if (terms.empty()) throw DomainError("single_variable_solve: empty term list");
  const std::size_t d = spec.order;
  OperatorMatrix sum(d);
  for (const auto& t : terms) {
    if (t.dim() != d) throw ShapeError("single_variable_solve: term is not " + std::to_string(d) + "x" +
                                       std::to_string(d));
    sum += t;
  }
  if (mode == SingleVariableMode::kRayleigh) return minimize_rayleigh(sum.tensor(), config);
  // |OC|² / |C|² is the Rayleigh quotient of OᵀO.
  return minimize_rayleigh(matmul(transpose(sum.tensor()), sum.tensor()), config);
}

}  // namespace ftn
