#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "tdr/tensor.hpp"

namespace tdr {

/// Eigenvalues in ascending order with matching eigenvector columns.
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

inline constexpr int kMaxJacobiSweeps = 100;

/// Cyclic complex Jacobi. Input must be Hermitian within 1e-8 relative.
/// Each eigenvector is scaled so its largest-magnitude entry is real and
/// positive (first such entry on exact ties), so conjugate inputs give
/// conjugate outputs.
EigenDecomposition hermitian_eig(const Eigen::MatrixXcd& a);

/// Solves a v = lambda b v for Hermitian a and Hermitian positive definite b
/// by Cholesky reduction; eigenvectors are b-orthonormal.
EigenDecomposition generalized_hermitian_eig(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct TSVDFactors {
  Tensor3 u;  // m x m x p, f-orthogonal
  Tensor3 s;  // m x n x p, f-diagonal
  Tensor3 v;  // n x n x p, f-orthogonal
  /// Singular values of each Fourier slice, nonincreasing.
  std::vector<Eigen::VectorXd> singular_values;
};

/// a = u * s * transpose(v) via per-slice SVDs in the Fourier domain.
TSVDFactors tsvd(const Tensor3& a);

struct Eigentube {
  std::size_t index = 0;
  std::vector<cdouble> values;  // one per Fourier slice
};

/// Eigentubes of an f-symmetric tensor. Within each Fourier slice eigenvalues
/// are ordered by nonincreasing magnitude; tube j collects the j-th of every
/// slice.
std::vector<Eigentube> eigentubes(const Tensor3& a, double tol = kDefaultTol);

enum class Extremum { Largest, Smallest };

struct TraceOptResult {
  Tensor3 v;  // m x d x p
  double objective = 0.0;
  /// Selected eigenvalues of every Fourier slice (p rows of d), in selection
  /// order (largest first for Largest, smallest first for Smallest).
  std::vector<std::vector<double>> per_slice_eigs;
};

/// Optimizes Trace_f(V^T * A * V) subject to V^T * V = I.
TraceOptResult trace_opt(const Tensor3& a, std::size_t d, Extremum which,
                         double tol = kDefaultTol);
inline TraceOptResult trace_opt_max(const Tensor3& a, std::size_t d, double tol = kDefaultTol) {
  return trace_opt(a, d, Extremum::Largest, tol);
}
inline TraceOptResult trace_opt_min(const Tensor3& a, std::size_t d, double tol = kDefaultTol) {
  return trace_opt(a, d, Extremum::Smallest, tol);
}

/// Optimizes Trace_f(V^T * A * V) subject to V^T * B * V = I.
TraceOptResult trace_opt_gen(const Tensor3& a, const Tensor3& b, std::size_t d, Extremum which,
                             double tol = kDefaultTol);
inline TraceOptResult trace_opt_gen_max(const Tensor3& a, const Tensor3& b, std::size_t d,
                                        double tol = kDefaultTol) {
  return trace_opt_gen(a, b, d, Extremum::Largest, tol);
}
inline TraceOptResult trace_opt_gen_min(const Tensor3& a, const Tensor3& b, std::size_t d,
                                        double tol = kDefaultTol) {
  return trace_opt_gen(a, b, d, Extremum::Smallest, tol);
}

/// Builds the full spectrum from slices 0..independent_slices(p)-1. Slice 0
/// (and slice p/2 for even p) must be real within tol; their imaginary
/// residue is dropped.
CTensor3 conjugate_completion(const std::vector<Eigen::MatrixXcd>& half, std::size_t p,
                              double tol = kDefaultTol);

/// Real f-diagonal tensor whose Fourier slice k is diag(diagonals[k]). The
/// diagonals must be conjugate symmetric across slices (real tubes mirrored).
Tensor3 f_diagonal(const std::vector<std::vector<double>>& diagonals);

}  // namespace tdr
