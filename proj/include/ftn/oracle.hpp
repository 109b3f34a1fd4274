#pragma once

#include <cstddef>
#include <vector>

#include "ftn/basis.hpp"
#include "ftn/hamiltonian.hpp"
#include "ftn/optimizer.hpp"
#include "ftn/tensor.hpp"

namespace ftn {

inline constexpr std::size_t kDefaultDenseGuard = 4096;

/// Dense D^N x D^N Hamiltonian assembled from Kronecker products.
struct DenseProblem {
  DenseTensor h;
  std::size_t n_sites = 0;
  std::size_t dim = 0;  // D

  std::size_t size() const { return h.extent(0); }
};

/// Throws GuardError when D^N exceeds `guard`.
DenseProblem dense_hamiltonian(const OscillatorChain& model, const BasisSpec& spec,
                               std::size_t guard = kDefaultDenseGuard);

struct DenseGroundState {
  double energy = 0.0;
  std::vector<double> vector;  // unit norm, row-major multi-index order
};

DenseGroundState dense_ground_state(const DenseProblem& problem);

/// Minimizer of the Rayleigh quotient of a symmetric matrix found by Adam
/// on the raw coefficient vector.
struct VectorSolve {
  double value = 0.0;
  std::vector<double> vector;  // normalized
  std::size_t iterations = 0;
  bool converged = false;
};

struct FullTensorResult {
  double energy = 0.0;
  DenseTensor coefficients;  // rank N, extents D
  std::size_t iterations = 0;
  bool converged = false;
};

/// Gradient descent on the full coefficient tensor. Same guard as
/// dense_hamiltonian; throws DivergenceError on a non-finite loss.
FullTensorResult full_tensor_solve(const OscillatorChain& model, const BasisSpec& spec,
                                   const OptimizerConfig& config, std::size_t guard = kDefaultDenseGuard);

enum class SingleVariableMode {
  kRayleigh,  // min C·HC / C·C with H = Σ terms
  kResidual,  // min |Σ_p O_p C|² / |C|²
};

/// One-variable problems posed directly as a list of operator matrices.
/// Throws DomainError for an empty list and ShapeError for matrices that
/// are not D x D.
VectorSolve single_variable_solve(const std::vector<OperatorMatrix>& terms, const BasisSpec& spec,
                                  const OptimizerConfig& config, SingleVariableMode mode);

}  // namespace ftn
