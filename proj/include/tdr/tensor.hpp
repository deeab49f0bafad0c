#pragma once

// Third-order tensors and the t-product algebra.
//
// Storage is frontal-slice-major with column-major slices: entry (i, j, k)
// lives at offset k*m*n + j*m + i. Fourier-domain tensors use the unscaled
// forward DFT along mode 3 and a 1/p inverse.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tdr {

using cdouble = std::complex<double>;

/// Default relative tolerance for residual checks.
inline constexpr double kDefaultTol = 1e-10;

struct Dims {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t p = 0;

  std::size_t size() const { return m * n * p; }
  bool operator==(const Dims&) const = default;
};

/// Number of Fourier slices that determine a real tensor's spectrum; the
/// remaining slices are conjugate mirrors.
constexpr std::size_t independent_slices(std::size_t p) { return p / 2 + 1; }

/// Index of the slice whose conjugate equals slice k of a real tensor's DFT.
constexpr std::size_t mirror_index(std::size_t k, std::size_t p) { return k == 0 ? 0 : p - k; }

class Tensor3 {
 public:
  using SliceMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstSliceMap = Eigen::Map<const Eigen::MatrixXd>;

  Tensor3() = default;
  /// Zero tensor.
  Tensor3(std::size_t m, std::size_t n, std::size_t p);
  /// Takes ownership of values in storage order; all values must be finite.
  Tensor3(std::size_t m, std::size_t n, std::size_t p, std::vector<double> values);

  static Tensor3 from_frontal_slices(const std::vector<Eigen::MatrixXd>& slices);

  std::size_t rows() const { return dims_.m; }
  std::size_t cols() const { return dims_.n; }
  std::size_t depth() const { return dims_.p; }
  const Dims& dims() const { return dims_; }

  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[offset(i, j, k)];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[offset(i, j, k)]; }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  ConstSliceMap frontal(std::size_t k) const;
  SliceMap frontal(std::size_t k);

  /// m x 1 x p sample j.
  Tensor3 lateral(std::size_t j) const;
  /// Lateral slices in the given order (m x idx.size() x p).
  Tensor3 select_lateral(std::span<const std::size_t> idx) const;
  std::vector<double> tube(std::size_t i, std::size_t j) const;

 private:
  std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const {
    return (k * dims_.n + j) * dims_.m + i;
  }

  Dims dims_;
  std::vector<double> data_;
};

/// Complex tensor, usually the mode-3 DFT of a Tensor3.
class CTensor3 {
 public:
  using SliceMap = Eigen::Map<Eigen::MatrixXcd>;
  using ConstSliceMap = Eigen::Map<const Eigen::MatrixXcd>;

  CTensor3() = default;
  CTensor3(std::size_t m, std::size_t n, std::size_t p, bool from_real = false);

  static CTensor3 from_slices(const std::vector<Eigen::MatrixXcd>& slices, bool from_real);

  std::size_t rows() const { return dims_.m; }
  std::size_t cols() const { return dims_.n; }
  std::size_t depth() const { return dims_.p; }
  const Dims& dims() const { return dims_; }

  /// Set when the slices came from the forward DFT of a real tensor (or were
  /// assembled to satisfy the same conjugate symmetry).
  bool from_real() const { return from_real_; }
  void set_from_real(bool v) { from_real_ = v; }

  cdouble operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(k * dims_.n + j) * dims_.m + i];
  }
  cdouble& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(k * dims_.n + j) * dims_.m + i];
  }

  std::span<const cdouble> values() const { return data_; }
  std::span<cdouble> values() { return data_; }

  ConstSliceMap slice(std::size_t k) const;
  SliceMap slice(std::size_t k);

 private:
  Dims dims_;
  bool from_real_ = false;
  std::vector<cdouble> data_;
};

CTensor3 fft3(const Tensor3& x);

/// Largest ||X_k - conj(X_{p-k})||_F over k, relative to ||X||_F (0 for the
/// zero tensor).
double conjugate_symmetry_residual(const CTensor3& xh);

/// Inverse DFT along mode 3. Throws ConjugateSymmetryViolation when the
/// slices are not conjugate symmetric within tol (relative); the imaginary
/// residue of the inverse is dropped.
Tensor3 ifft3(const CTensor3& xh, double tol = kDefaultTol);

/// Largest |imag| of the full complex inverse DFT, relative to the largest
/// |real| (or absolute when that is below 1).
double inverse_imag_residue(const CTensor3& xh);

/// Fills slices k >= independent_slices(p) with conjugates of their mirrors
/// and marks the tensor as real-derived.
void mirror_conjugate(CTensor3& xh);

Eigen::MatrixXd bcirc(const Tensor3& a);
Eigen::MatrixXd matvec(const Tensor3& a);
Tensor3 matvec_inverse(const Eigen::MatrixXd& stacked, std::size_t p);

Tensor3 tprod(const Tensor3& a, const Tensor3& b);
Tensor3 ttranspose(const Tensor3& a);
Tensor3 identity(std::size_t m, std::size_t p);

double frob_inner(const Tensor3& a, const Tensor3& b);
double frob_norm(const Tensor3& a);

/// (1/p) * sum of traces of the Fourier slices.
double trace_f(const Tensor3& a);

/// Every Fourier slice is Hermitian within tol relative to its own norm.
bool check_f_symmetric(const Tensor3& a, double tol = kDefaultTol);
/// f-symmetric and every Fourier slice has min eigenvalue >= -tol * max(1, ||A_k||_F).
bool check_f_psd(const Tensor3& a, double tol = kDefaultTol);

/// Largest absolute entrywise difference; dims must agree.
double max_abs_diff(const Tensor3& a, const Tensor3& b);

// T3F1 binary format: "T3F1", m, n, p as little-endian u64, then m*n*p
// little-endian float64 values in storage order.
void write_t3f1(const Tensor3& x, const std::string& path);
Tensor3 read_t3f1(const std::string& path);

}  // namespace tdr
