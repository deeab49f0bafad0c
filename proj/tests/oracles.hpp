#pragma once

// Reference computations that avoid the library's FFT and eigensolver paths.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tdr/tensor.hpp"

namespace oracle {

using cd = std::complex<double>;
using tdr::Tensor3;

inline const double kPi = std::acos(-1.0);

inline Tensor3 random_tensor(std::size_t m, std::size_t n, std::size_t p, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(m * n * p);
  for (double& x : v) x = g(rng);
  return Tensor3(m, n, p, std::move(v));
}

/// Forward DFT slices by direct summation.
inline std::vector<Eigen::MatrixXcd> dft_slices(const Tensor3& a) {
  const auto [m, n, p] = a.dims();
  std::vector<Eigen::MatrixXcd> out(p, Eigen::MatrixXcd::Zero(m, n));
  for (std::size_t f = 0; f < p; ++f)
    for (std::size_t k = 0; k < p; ++k) {
      const cd w = std::polar(1.0, -2.0 * kPi * double(f * k % p) / double(p));
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) out[f](i, j) += w * a(i, j, k);
    }
  return out;
}

/// Inverse DFT by direct summation; returns real part and max |imag|.
inline Tensor3 idft_slices(const std::vector<Eigen::MatrixXcd>& s, double* imag = nullptr) {
  const std::size_t p = s.size();
  const auto m = std::size_t(s[0].rows()), n = std::size_t(s[0].cols());
  Tensor3 out(m, n, p);
  double worst = 0.0;
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i) {
        cd acc = 0.0;
        for (std::size_t f = 0; f < p; ++f)
          acc += std::polar(1.0, 2.0 * kPi * double(f * k % p) / double(p)) * s[f](i, j);
        acc /= double(p);
        out(i, j, k) = acc.real();
        worst = std::max(worst, std::abs(acc.imag()));
      }
  if (imag) *imag = worst;
  return out;
}

/// Block circulant matrix built from its definition.
inline Eigen::MatrixXd bcirc(const Tensor3& a) {
  const auto [m, n, p] = a.dims();
  Eigen::MatrixXd out(m * p, n * p);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c) {
      const std::size_t k = (r + p - c) % p;
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) out(r * m + i, c * n + j) = a(i, j, k);
    }
  return out;
}

/// t-product through the block circulant matrix.
inline Tensor3 tprod(const Tensor3& a, const Tensor3& b) {
  const auto [m, l, p] = a.dims();
  const std::size_t n = b.cols();
  Eigen::MatrixXd bv(l * p, n);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < l; ++i) bv(k * l + i, j) = b(i, j, k);
  const Eigen::MatrixXd cv = oracle::bcirc(a) * bv;
  Tensor3 c(m, n, p);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i) c(i, j, k) = cv(k * m + i, j);
  return c;
}

inline Tensor3 ttranspose(const Tensor3& a) {
  const auto [m, n, p] = a.dims();
  Tensor3 t(n, m, p);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i) t(j, i, (p - k) % p) = a(i, j, k);
  return t;
}

/// Unnormalized DFT matrix of order p.
inline Eigen::MatrixXcd dft_matrix(std::size_t p) {
  Eigen::MatrixXcd f(p, p);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c) f(r, c) = std::polar(1.0, -2.0 * kPi * double(r * c % p) / double(p));
  return f;
}

/// Largest deviation of (F kron I_m) bcirc(a) (F^-1 kron I_n) from blockdiag of the given slices.
inline double block_diagonal_residual(const Tensor3& a, const std::vector<Eigen::MatrixXcd>& slices) {
  const auto [m, n, p] = a.dims();
  const Eigen::MatrixXcd f = dft_matrix(p);
  const Eigen::MatrixXcd finv = f.adjoint() / double(p);
  Eigen::MatrixXcd left = Eigen::MatrixXcd::Zero(m * p, m * p), right = Eigen::MatrixXcd::Zero(n * p, n * p);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c) {
      left.block(r * m, c * m, m, m) = f(r, c) * Eigen::MatrixXcd::Identity(m, m);
      right.block(r * n, c * n, n, n) = finv(r, c) * Eigen::MatrixXcd::Identity(n, n);
    }
  Eigen::MatrixXcd d = left * oracle::bcirc(a).cast<cd>() * right;
  for (std::size_t k = 0; k < p; ++k) d.block(k * m, k * n, m, n) -= slices[k];
  return d.cwiseAbs().maxCoeff();
}

/// Random real tensor with orthonormal Fourier-slice columns (m x d x p).
inline Tensor3 random_f_orthogonal(std::size_t m, std::size_t d, std::size_t p, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::MatrixXcd> s(p);
  for (std::size_t k = 0; k <= p / 2; ++k) {
    const bool real = k == 0 || 2 * k == p;
    Eigen::MatrixXcd z(m, m);
    for (Eigen::Index c = 0; c < z.cols(); ++c)
      for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = real ? cd(g(rng), 0.0) : cd(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    const Eigen::MatrixXcd q = qr.householderQ();
    s[k] = q.leftCols(d);
    if (real) s[k] = s[k].real().cast<cd>();
  }
  for (std::size_t k = p / 2 + 1; k < p; ++k) s[k] = s[p - k].conjugate();
  return idft_slices(s);
}

/// Random f-symmetric psd tensor X * X^T with X of size m x r x p.
inline Tensor3 random_gram(std::size_t m, std::size_t r, std::size_t p, std::mt19937_64& rng) {
  const Tensor3 x = random_tensor(m, r, p, rng);
  return oracle::tprod(x, oracle::ttranspose(x));
}

inline double trace_f(const Tensor3& a) {
  const auto s = dft_slices(a);
  cd t = 0.0;
  for (const auto& x : s) t += x.trace();
  return t.real() / double(s.size());
}

/// Per-slice eigenvalues ascending (Eigen's self-adjoint solver).
inline std::vector<Eigen::VectorXd> slice_eigenvalues(const Tensor3& a) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& s : dft_slices(a)) {
    const Eigen::MatrixXcd h = (s + s.adjoint()) * 0.5;
    out.push_back(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues());
  }
  return out;
}

inline std::vector<Eigen::VectorXd> slice_generalized_eigenvalues(const Tensor3& a, const Tensor3& b) {
  std::vector<Eigen::VectorXd> out;
  const auto sa = dft_slices(a), sb = dft_slices(b);
  for (std::size_t k = 0; k < sa.size(); ++k) {
    const Eigen::MatrixXcd ha = (sa[k] + sa[k].adjoint()) * 0.5, hb = (sb[k] + sb[k].adjoint()) * 0.5;
    // Reduce with an explicit inverse square root of b.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eb(hb);
    const Eigen::MatrixXcd isq = eb.eigenvectors() * eb.eigenvalues().cwiseInverse().cwiseSqrt().cast<cd>().asDiagonal() *
                                 eb.eigenvectors().adjoint();
    const Eigen::MatrixXcd c = isq * ha * isq;
    out.push_back(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>((c + c.adjoint()) * 0.5).eigenvalues());
  }
  return out;
}

/// Sum of the d largest (or smallest) per-slice eigenvalues divided by p.
inline double eigen_sum(const std::vector<Eigen::VectorXd>& eigs, std::size_t d, bool largest) {
  double s = 0.0;
  for (const auto& e : eigs) {
    const auto n = std::size_t(e.size());
    for (std::size_t j = 0; j < d; ++j) s += largest ? e(n - 1 - j) : e(j);
  }
  return s / double(eigs.size());
}

/// Distance between the row spaces of two real matrices with the same row count.
inline double projector_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  auto proj = [](const Eigen::MatrixXd& rows) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows.transpose(), Eigen::ComputeThinU);
    const Eigen::MatrixXd u = svd.matrixU();
    return Eigen::MatrixXd(u * u.transpose());
  };
  return (proj(a) - proj(b)).norm();
}

inline double max_abs(const Tensor3& a, const Tensor3& b) {
  double w = 0.0;
  for (std::size_t t = 0; t < a.values().size(); ++t) w = std::max(w, std::abs(a.values()[t] - b.values()[t]));
  return w;
}

}  // namespace oracle
