#include "tdr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tdr/error.hpp"

namespace tdr {

Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXcd& columns) {
  const Eigen::Index n = columns.cols();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index q = 0; q < n; ++q)
    for (Eigen::Index l = q + 1; l < n; ++l) {
      const double v = (columns.col(l) - columns.col(q)).squaredNorm();
      d(l, q) = v;
      d(q, l) = v;
    }
  return d;
}

NeighborLists knn_graph(const Eigen::MatrixXd& dist, std::size_t k) {
  if (dist.rows() != dist.cols()) fail(ErrorCode::NotSquare, "distance matrix must be square");
  const auto n = static_cast<std::size_t>(dist.rows());
  if (k < 1 || k + 1 > n)
    fail(ErrorCode::KOutOfRange, "k = " + std::to_string(k) + " with n = " + std::to_string(n));

  NeighborLists out(n);
  std::vector<std::size_t> others;
  for (std::size_t l = 0; l < n; ++l) {
    others.clear();
    for (std::size_t q = 0; q < n; ++q)
      if (q != l) others.push_back(q);
    const auto row = static_cast<Eigen::Index>(l);
    std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k), others.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double da = dist(row, static_cast<Eigen::Index>(a));
                        const double db = dist(row, static_cast<Eigen::Index>(b));
                        return da < db || (da == db && a < b);
                      });
    out[l].assign(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

WeightGraph gaussian_weights(const Eigen::MatrixXcd& columns, std::size_t k, double sigma,
                             bool normalize) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorCode::SigmaNonPositive, "sigma = " + std::to_string(sigma));
  const auto dist = pairwise_sqdist(columns);
  WeightGraph g;
  g.n = static_cast<std::size_t>(columns.cols());
  g.k = k;
  g.kind = normalize ? WeightKind::GaussianNormalized : WeightKind::GaussianAffinity;
  g.neighbors = knn_graph(dist, k);

  const auto n = static_cast<Eigen::Index>(g.n);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  const double scale = 2.0 * sigma * sigma;
  for (std::size_t l = 0; l < g.n; ++l)
    for (std::size_t q : g.neighbors[l]) {
      const auto li = static_cast<Eigen::Index>(l);
      const auto qi = static_cast<Eigen::Index>(q);
      w(li, qi) = std::exp(-dist(li, qi) / scale);
    }

  if (normalize) {
    for (Eigen::Index l = 0; l < n; ++l) {
      const double s = w.row(l).sum();
      // Far-apart neighborhoods can underflow; fall back to uniform weights.
      if (s > 0.0) {
        w.row(l) /= s;
      } else {
        for (std::size_t q : g.neighbors[static_cast<std::size_t>(l)])
          w(l, static_cast<Eigen::Index>(q)) = 1.0 / static_cast<double>(k);
      }
    }
  } else {
    w = w.cwiseMax(w.transpose()).eval();
    w.diagonal().setZero();
  }
  g.w = w.cast<cdouble>();
  return g;
}

WeightGraph lle_weights(const Eigen::MatrixXcd& columns, std::size_t k, double reg) {
  if (!(reg >= 0.0)) fail(ErrorCode::InvalidConfig, "regularization must be nonnegative");
  const auto dist = pairwise_sqdist(columns);
  WeightGraph g;
  g.n = static_cast<std::size_t>(columns.cols());
  g.k = k;
  g.kind = WeightKind::LleReconstruction;
  g.neighbors = knn_graph(dist, k);
  const auto n = static_cast<Eigen::Index>(g.n);
  const auto kk = static_cast<Eigen::Index>(k);
  g.w = Eigen::MatrixXcd::Zero(n, n);

  for (std::size_t l = 0; l < g.n; ++l) {
    Eigen::MatrixXcd diff(columns.rows(), kk);
    for (Eigen::Index j = 0; j < kk; ++j)
      diff.col(j) = columns.col(static_cast<Eigen::Index>(l)) -
                    columns.col(static_cast<Eigen::Index>(g.neighbors[l][static_cast<std::size_t>(j)]));
    Eigen::MatrixXcd c = diff.adjoint() * diff;
    const double tr = c.trace().real();
    c.diagonal().array() += reg * tr;

    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(kk);
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(c);
    Eigen::VectorXcd w;
    if (lu.isInvertible()) w = lu.solve(ones);
    const cdouble s = lu.isInvertible() ? w.sum() : cdouble(0.0);
    if (!lu.isInvertible() || std::abs(s) < 1e-300 || !w.allFinite()) {
      if (tr == 0.0 && kk == 1) {
        w = ones;
      } else {
        fail(ErrorCode::SingularLocalGram,
             "local Gram of sample " + std::to_string(l) + " is singular");
      }
    } else {
      w /= s;
    }
    for (Eigen::Index j = 0; j < kk; ++j)
      g.w(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(g.neighbors[l][static_cast<std::size_t>(j)])) = w(j);
  }
  return g;
}

LaplacianPair laplacian(const WeightGraph& w, DegreeMode mode) {
  if (w.kind != WeightKind::GaussianAffinity)
    fail(ErrorCode::WrongWeightKind, "Laplacian needs a Gaussian affinity graph");
  const auto n = static_cast<Eigen::Index>(w.n);
  LaplacianPair out;
  out.d = Eigen::MatrixXcd::Zero(n, n);
  if (mode == DegreeMode::RowSum) {
    out.d.diagonal() = w.w.rowwise().sum();
  } else {
    out.d.diagonal().setOnes();
  }
  out.l = out.d - w.w;
  return out;
}

Eigen::MatrixXcd tensor_weight_slice(const WeightGraph& g) { return g.w.conjugate(); }

Eigen::MatrixXcd reconstruction_operator(const WeightGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.n);
  const Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(n, n) - tensor_weight_slice(g);
  return r.adjoint() * r;
}

Eigen::MatrixXd sample_matrix(const Tensor3& x) {
  const auto [m, n, p] = x.dims();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m * p), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < p; ++k)
    out.middleRows(static_cast<Eigen::Index>(k * m), static_cast<Eigen::Index>(m)) = x.frontal(k);
  return out;
}

double median_bandwidth(const Tensor3& samples) {
  const std::size_t n = samples.cols();
  if (n < 2) fail(ErrorCode::DimensionMismatch, "bandwidth needs at least two samples");
  const auto d = pairwise_sqdist(sample_matrix(samples).cast<cdouble>());
  std::vector<double> v;
  v.reserve(n * (n - 1) / 2);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t l = q + 1; l < n; ++l)
      v.push_back(d(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(q)));
  std::sort(v.begin(), v.end());
  const std::size_t c = v.size();
  const double med = c % 2 == 1 ? v[c / 2] : 0.5 * (v[c / 2 - 1] + v[c / 2]);
  if (!(med > 0.0)) fail(ErrorCode::AllSamplesIdentical, "median pairwise distance is zero");
  return std::sqrt(med / 2.0);
}

}  // namespace tdr
