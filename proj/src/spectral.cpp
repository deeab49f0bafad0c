#include "tdr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "tdr/error.hpp"
#include "tdr/parallel.hpp"

namespace tdr {

namespace {

double off_diagonal_norm(const Eigen::MatrixXcd& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

void fix_phases(Eigen::MatrixXcd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double v = std::abs(vectors(r, c));
      if (v > mag) {
        mag = v;
        best = r;
      }
    }
    if (mag > 0.0) vectors.col(c) *= std::conj(vectors(best, c)) / mag;
  }
}

// Ascending order; equal values keep the solver's index order.
EigenDecomposition sorted(const Eigen::VectorXd& values, const Eigen::MatrixXcd& vectors) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
  EigenDecomposition out{Eigen::VectorXd(values.size()),
                         Eigen::MatrixXcd(vectors.rows(), vectors.cols())};
  for (std::size_t c = 0; c < order.size(); ++c) {
    out.values(static_cast<Eigen::Index>(c)) = values(order[c]);
    out.vectors.col(static_cast<Eigen::Index>(c)) = vectors.col(order[c]);
  }
  return out;
}

void require_square(const Eigen::MatrixXcd& a, const char* what) {
  if (a.rows() != a.cols())
    fail(ErrorCode::NotSquare, std::string(what) + " is " + std::to_string(a.rows()) + "x" +
                                   std::to_string(a.cols()));
}

// Indices of the d eigenpairs to keep, in selection order.
std::vector<Eigen::Index> select(Eigen::Index size, std::size_t d, Extremum which) {
  std::vector<Eigen::Index> idx(d);
  for (std::size_t j = 0; j < d; ++j)
    idx[j] = which == Extremum::Smallest ? static_cast<Eigen::Index>(j)
                                         : size - 1 - static_cast<Eigen::Index>(j);
  return idx;
}

}  // namespace

// ---------------------------------------------------------------------------
// Per-slice eigensolvers

EigenDecomposition hermitian_eig(const Eigen::MatrixXcd& input) {
  require_square(input, "eigenproblem matrix");
  const Eigen::Index n = input.rows();
  const double scale = input.norm();
  if ((input - input.adjoint()).norm() > 1e-8 * scale)
    fail(ErrorCode::NotHermitian, "matrix is not Hermitian");

  Eigen::MatrixXcd a = (input + input.adjoint()) * 0.5;
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
  const double threshold = 1e-12 * scale;

  auto sweep_once = [&] {
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cdouble apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;

        // Rotate the phase of a(p,q) away, then apply a real Jacobi rotation.
        const cdouble unphase = std::conj(apq) / mag;
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const cdouble g00 = c;
        const cdouble g01 = s;
        const cdouble g10 = -s * unphase;
        const cdouble g11 = c * unphase;

        const double app = a(p, p).real() - t * mag;
        const double aqq = a(q, q).real() + t * mag;

        const Eigen::VectorXcd cp = a.col(p);
        const Eigen::VectorXcd cq = a.col(q);
        a.col(p) = cp * g00 + cq * g10;
        a.col(q) = cp * g01 + cq * g11;
        const Eigen::RowVectorXcd rp = a.row(p);
        const Eigen::RowVectorXcd rq = a.row(q);
        a.row(p) = std::conj(g00) * rp + std::conj(g10) * rq;
        a.row(q) = std::conj(g01) * rp + std::conj(g11) * rq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app;
        a(q, q) = aqq;

        const Eigen::VectorXcd vp = v.col(p);
        const Eigen::VectorXcd vq = v.col(q);
        v.col(p) = vp * g00 + vq * g10;
        v.col(q) = vp * g01 + vq * g11;
      }
    }
  };

  bool converged = false;
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) {
      converged = true;
      break;
    }
    sweep_once();
  }
  // One more sweep once the threshold is met: convergence is quadratic, and
  // eigenvectors of close eigenvalues need the off-diagonal well below it.
  if (converged && off_diagonal_norm(a) > 0.0) sweep_once();
  if (!converged && off_diagonal_norm(a) > threshold)
    fail(ErrorCode::NoConvergence, "Jacobi did not converge in " +
                                       std::to_string(kMaxJacobiSweeps) + " sweeps (n = " +
                                       std::to_string(n) + ")");

  auto out = sorted(a.diagonal().real(), v);
  fix_phases(out.vectors);
  return out;
}

EigenDecomposition generalized_hermitian_eig(const Eigen::MatrixXcd& a,
                                             const Eigen::MatrixXcd& b) {
  require_square(a, "generalized eigenproblem matrix");
  require_square(b, "generalized eigenproblem metric");
  if (a.rows() != b.rows()) fail(ErrorCode::DimensionMismatch, "matrix pair sizes differ");

  const auto metric = hermitian_eig(b);
  const double bnorm = b.norm();
  if (metric.values.size() > 0 && metric.values(0) <= 1e-12 * bnorm)
    fail(ErrorCode::BNotPositiveDefinite,
         "smallest eigenvalue " + std::to_string(metric.values(0)) + " of the metric matrix");
  if ((a - a.adjoint()).norm() > 1e-8 * a.norm())
    fail(ErrorCode::NotHermitian, "matrix is not Hermitian");

  const Eigen::MatrixXcd bh = (b + b.adjoint()) * 0.5;
  const Eigen::LLT<Eigen::MatrixXcd> llt(bh);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::BNotPositiveDefinite, "Cholesky factorization failed");

  // C = L^{-1} A L^{-H}
  const Eigen::MatrixXcd left = llt.matrixL().solve(a);
  Eigen::MatrixXcd reduced = llt.matrixL().solve(left.adjoint()).adjoint();
  reduced = (reduced + reduced.adjoint()) * 0.5;

  auto out = hermitian_eig(reduced);
  out.vectors = llt.matrixU().solve(out.vectors);
  fix_phases(out.vectors);
  return out;
}

// ---------------------------------------------------------------------------
// t-SVD and eigentubes

TSVDFactors tsvd(const Tensor3& a) {
  const auto [m, n, p] = a.dims();
  const auto ah = fft3(a);
  const std::size_t half = independent_slices(p);
  const auto r = static_cast<Eigen::Index>(std::min(m, n));

  std::vector<Eigen::MatrixXcd> us(half), ss(half), vs(half);
  std::vector<Eigen::VectorXd> sigma(p);
  parallel_for(half, [&](std::size_t k) {
    const bool real_slice = k == 0 || 2 * k == p;
    Eigen::VectorXd sv;
    if (real_slice) {
      const Eigen::MatrixXd slice = ah.slice(k).real();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(slice, Eigen::ComputeFullU | Eigen::ComputeFullV);
      us[k] = svd.matrixU().cast<cdouble>();
      vs[k] = svd.matrixV().cast<cdouble>();
      sv = svd.singularValues();
    } else {
      const Eigen::MatrixXcd slice = ah.slice(k);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(slice, Eigen::ComputeFullU | Eigen::ComputeFullV);
      us[k] = svd.matrixU();
      vs[k] = svd.matrixV();
      sv = svd.singularValues();
    }
    ss[k] = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < r; ++i) ss[k](i, i) = sv(i);
    sigma[k] = sv;
  });
  for (std::size_t k = half; k < p; ++k) sigma[k] = sigma[p - k];

  return TSVDFactors{ifft3(conjugate_completion(us, p)), ifft3(conjugate_completion(ss, p)),
                     ifft3(conjugate_completion(vs, p)), std::move(sigma)};
}

std::vector<Eigentube> eigentubes(const Tensor3& a, double tol) {
  if (a.rows() != a.cols()) fail(ErrorCode::NotSquare, "eigentubes need square frontal slices");
  const auto [m, n, p] = a.dims();
  (void)n;
  const auto ah = fft3(a);
  const std::size_t half = independent_slices(p);

  std::vector<Eigen::VectorXd> ordered(p);
  parallel_for(half, [&](std::size_t k) {
    const Eigen::MatrixXcd s = ah.slice(k);
    if ((s - s.adjoint()).norm() > tol * s.norm())
      fail(ErrorCode::NotFDiagonalizable,
           "Fourier slice " + std::to_string(k + 1) + " is not Hermitian");
    const auto eig = hermitian_eig(s);
    std::vector<Eigen::Index> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    // Ascending input: reverse first so equal magnitudes list the larger value first.
    std::reverse(idx.begin(), idx.end());
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index x, Eigen::Index y) {
      return std::abs(eig.values(x)) > std::abs(eig.values(y));
    });
    ordered[k].resize(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) ordered[k](static_cast<Eigen::Index>(j)) = eig.values(idx[j]);
  });
  for (std::size_t k = half; k < p; ++k) ordered[k] = ordered[p - k];

  std::vector<Eigentube> tubes(m);
  for (std::size_t j = 0; j < m; ++j) {
    tubes[j].index = j;
    tubes[j].values.resize(p);
    for (std::size_t k = 0; k < p; ++k)
      tubes[j].values[k] = ordered[k](static_cast<Eigen::Index>(j));
  }
  return tubes;
}

// ---------------------------------------------------------------------------
// Trace optimization

TraceOptResult trace_opt(const Tensor3& a, std::size_t d, Extremum which, double tol) {
  if (a.rows() != a.cols()) fail(ErrorCode::NotSquare, "trace optimization needs a square tensor");
  const auto [m, n, p] = a.dims();
  (void)n;
  if (d < 1 || d > m)
    fail(ErrorCode::DOutOfRange, "d = " + std::to_string(d) + " with m = " + std::to_string(m));

  const auto ah = fft3(a);
  const std::size_t half = independent_slices(p);
  std::vector<Eigen::MatrixXcd> vh(half);
  std::vector<std::vector<double>> eigs(p);

  parallel_for(half, [&](std::size_t k) {
    const Eigen::MatrixXcd s = ah.slice(k);
    const double scale = s.norm();
    if ((s - s.adjoint()).norm() > tol * scale)
      fail(ErrorCode::NotFSymmetric, "Fourier slice " + std::to_string(k + 1) + " is not Hermitian");
    const auto eig = hermitian_eig(s);
    if (eig.values(0) < -tol * std::max(1.0, scale))
      fail(ErrorCode::NotFPositiveSemidefinite,
           "Fourier slice " + std::to_string(k + 1) + " has eigenvalue " +
               std::to_string(eig.values(0)));
    const auto idx = select(eig.values.size(), d, which);
    vh[k].resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    eigs[k].resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      vh[k].col(static_cast<Eigen::Index>(j)) = eig.vectors.col(idx[j]);
      eigs[k][j] = eig.values(idx[j]);
    }
  });
  for (std::size_t k = half; k < p; ++k) eigs[k] = eigs[p - k];

  double total = 0.0;
  for (const auto& e : eigs)
    for (double v : e) total += v;

  return TraceOptResult{ifft3(conjugate_completion(vh, p)), total / static_cast<double>(p),
                        std::move(eigs)};
}

TraceOptResult trace_opt_gen(const Tensor3& a, const Tensor3& b, std::size_t d, Extremum which,
                             double tol) {
  if (a.rows() != a.cols() || b.rows() != b.cols())
    fail(ErrorCode::NotSquare, "trace optimization needs square tensors");
  if (a.dims() != b.dims()) fail(ErrorCode::DimensionMismatch, "tensor pair dimensions differ");
  const auto [m, n, p] = a.dims();
  (void)n;
  if (d < 1 || d > m)
    fail(ErrorCode::DOutOfRange, "d = " + std::to_string(d) + " with m = " + std::to_string(m));

  const auto ah = fft3(a);
  const auto bh = fft3(b);
  const std::size_t half = independent_slices(p);
  std::vector<Eigen::MatrixXcd> vh(half);
  std::vector<std::vector<double>> eigs(p);

  parallel_for(half, [&](std::size_t k) {
    const Eigen::MatrixXcd sa = ah.slice(k);
    const Eigen::MatrixXcd sb = bh.slice(k);
    if ((sa - sa.adjoint()).norm() > tol * sa.norm() || (sb - sb.adjoint()).norm() > tol * sb.norm())
      fail(ErrorCode::NotFSymmetric, "Fourier slice " + std::to_string(k + 1) + " is not Hermitian");
    const auto eig = generalized_hermitian_eig(sa, sb);
    const auto idx = select(eig.values.size(), d, which);
    vh[k].resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    eigs[k].resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      vh[k].col(static_cast<Eigen::Index>(j)) = eig.vectors.col(idx[j]);
      eigs[k][j] = eig.values(idx[j]);
    }
  });
  for (std::size_t k = half; k < p; ++k) eigs[k] = eigs[p - k];

  double total = 0.0;
  for (const auto& e : eigs)
    for (double v : e) total += v;

  return TraceOptResult{ifft3(conjugate_completion(vh, p)), total / static_cast<double>(p),
                        std::move(eigs)};
}

// ---------------------------------------------------------------------------

CTensor3 conjugate_completion(const std::vector<Eigen::MatrixXcd>& half, std::size_t p,
                              double tol) {
  if (p == 0 || half.size() != independent_slices(p))
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(independent_slices(p)) +
                                           " Fourier slices for depth " + std::to_string(p));
  const Eigen::Index m = half.front().rows();
  const Eigen::Index n = half.front().cols();
  CTensor3 out(static_cast<std::size_t>(m), static_cast<std::size_t>(n), p, true);

  auto require_real = [&](std::size_t k) {
    const double im = half[k].imag().cwiseAbs().maxCoeff();
    const double re = half[k].real().cwiseAbs().maxCoeff();
    if (im > tol * std::max(1.0, re))
      fail(ErrorCode::FirstSliceNotReal, "Fourier slice " + std::to_string(k + 1) +
                                             " must be real (imaginary residue " +
                                             std::to_string(im) + ")");
  };
  require_real(0);
  if (p % 2 == 0 && p > 1) require_real(p / 2);

  for (std::size_t k = 0; k < half.size(); ++k) {
    if (half[k].rows() != m || half[k].cols() != n)
      fail(ErrorCode::DimensionMismatch, "Fourier slices differ in shape");
    const bool self_conjugate = k == 0 || 2 * k == p;
    if (self_conjugate)
      out.slice(k) = half[k].real().cast<cdouble>();
    else
      out.slice(k) = half[k];
  }
  mirror_conjugate(out);
  return out;
}

Tensor3 f_diagonal(const std::vector<std::vector<double>>& diagonals) {
  if (diagonals.empty()) fail(ErrorCode::DimensionMismatch, "no diagonals");
  const std::size_t p = diagonals.size();
  const std::size_t d = diagonals.front().size();
  CTensor3 dh(d, d, p, true);
  for (std::size_t k = 0; k < p; ++k) {
    if (diagonals[k].size() != d) fail(ErrorCode::DimensionMismatch, "diagonal lengths differ");
    for (std::size_t j = 0; j < d; ++j) dh(j, j, k) = diagonals[k][j];
  }
  return ifft3(dh);
}

}  // namespace tdr
