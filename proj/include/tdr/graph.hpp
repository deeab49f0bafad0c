#pragma once

// Neighborhood graphs and weight matrices. Columns of the input matrix are
// samples; a graph holds one n x n weight matrix (one Fourier slice, or the
// sample domain).

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "tdr/tensor.hpp"

namespace tdr {

enum class WeightKind { GaussianNormalized, LleReconstruction, GaussianAffinity };

using NeighborLists = std::vector<std::vector<std::size_t>>;

struct WeightGraph {
  std::size_t n = 0;
  std::size_t k = 0;
  WeightKind kind = WeightKind::GaussianNormalized;
  /// Row l holds the coefficients of sample l on its neighbors. For the
  /// reconstruction kinds x_l ~ sum_q w(l, q) x_q.
  Eigen::MatrixXcd w;
  NeighborLists neighbors;
};

/// Squared modulus distances between columns.
Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXcd& columns);

/// k nearest others of each sample; distance ties go to the lower index.
NeighborLists knn_graph(const Eigen::MatrixXd& dist, std::size_t k);

/// exp(-d^2 / (2 sigma^2)) on kNN edges. normalize: rows sum to one.
/// Otherwise the affinity is symmetrized with max(w, w^T) and its diagonal
/// is zero.
WeightGraph gaussian_weights(const Eigen::MatrixXcd& columns, std::size_t k, double sigma,
                             bool normalize);

inline constexpr double kDefaultLleReg = 1e-3;

/// Sum-to-one least-squares reconstruction weights; reg scales the trace of
/// each local Gram.
WeightGraph lle_weights(const Eigen::MatrixXcd& columns, std::size_t k,
                        double reg = kDefaultLleReg);

enum class DegreeMode { RowSum, UnitDiagonal };

struct LaplacianPair {
  Eigen::MatrixXcd d;
  Eigen::MatrixXcd l;
};

/// Needs a GaussianAffinity graph. RowSum: d = diag(w 1). UnitDiagonal:
/// d holds the affinity self-weights exp(0) = 1, so d = I and l = I - w.
LaplacianPair laplacian(const WeightGraph& w, DegreeMode mode = DegreeMode::RowSum);

/// Weight tensor Fourier slice for graph g: the conjugate of g.w, so that
/// residuals X (I - W^T) come out of the t-product formulas.
Eigen::MatrixXcd tensor_weight_slice(const WeightGraph& g);

/// (I - Wt^H)(I - Wt) for the tensor slice Wt of g.
Eigen::MatrixXcd reconstruction_operator(const WeightGraph& g);

/// Lateral slices flattened to (m*p) x n columns, frontal-slice-major.
Eigen::MatrixXd sample_matrix(const Tensor3& x);

/// sqrt(median pairwise squared Frobenius distance / 2).
double median_bandwidth(const Tensor3& samples);

}  // namespace tdr
