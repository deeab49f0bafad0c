#include "tdr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include <fftw3.h>

#include "tdr/error.hpp"
#include "tdr/spectral.hpp"

namespace tdr {

namespace {

void require_positive(std::size_t m, std::size_t n, std::size_t p) {
  if (m == 0 || n == 0 || p == 0)
    fail(ErrorCode::DimensionMismatch, "tensor dimensions must be positive, got " +
                                           std::to_string(m) + "x" + std::to_string(n) + "x" +
                                           std::to_string(p));
}

std::string dims_str(const Dims& d) {
  return std::to_string(d.m) + "x" + std::to_string(d.n) + "x" + std::to_string(d.p);
}

// FFTW's planner is not thread-safe; execution of a private plan is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

class Plan {
 public:
  explicit Plan(fftw_plan plan) : plan_(plan) {}
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

// ---------------------------------------------------------------------------
// Tensor3

Tensor3::Tensor3(std::size_t m, std::size_t n, std::size_t p) : dims_{m, n, p} {
  require_positive(m, n, p);
  data_.assign(m * n * p, 0.0);
}

Tensor3::Tensor3(std::size_t m, std::size_t n, std::size_t p, std::vector<double> values)
    : dims_{m, n, p}, data_(std::move(values)) {
  require_positive(m, n, p);
  if (data_.size() != m * n * p)
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(m * n * p) + " values, got " +
                                           std::to_string(data_.size()));
  for (double v : data_)
    if (!std::isfinite(v)) fail(ErrorCode::NonFinite, "tensor contains a non-finite value");
}

Tensor3 Tensor3::from_frontal_slices(const std::vector<Eigen::MatrixXd>& slices) {
  if (slices.empty()) fail(ErrorCode::DimensionMismatch, "no frontal slices");
  const auto m = static_cast<std::size_t>(slices.front().rows());
  const auto n = static_cast<std::size_t>(slices.front().cols());
  Tensor3 out(m, n, slices.size());
  for (std::size_t k = 0; k < slices.size(); ++k) {
    if (static_cast<std::size_t>(slices[k].rows()) != m ||
        static_cast<std::size_t>(slices[k].cols()) != n)
      fail(ErrorCode::DimensionMismatch, "frontal slices differ in shape");
    if (!slices[k].allFinite()) fail(ErrorCode::NonFinite, "frontal slice is not finite");
    out.frontal(k) = slices[k];
  }
  return out;
}

Tensor3::ConstSliceMap Tensor3::frontal(std::size_t k) const {
  return ConstSliceMap(data_.data() + k * dims_.m * dims_.n, static_cast<Eigen::Index>(dims_.m),
                       static_cast<Eigen::Index>(dims_.n));
}

Tensor3::SliceMap Tensor3::frontal(std::size_t k) {
  return SliceMap(data_.data() + k * dims_.m * dims_.n, static_cast<Eigen::Index>(dims_.m),
                  static_cast<Eigen::Index>(dims_.n));
}

Tensor3 Tensor3::lateral(std::size_t j) const {
  const std::size_t idx[] = {j};
  return select_lateral(idx);
}

Tensor3 Tensor3::select_lateral(std::span<const std::size_t> idx) const {
  Tensor3 out(dims_.m, idx.size(), dims_.p);
  for (std::size_t k = 0; k < dims_.p; ++k)
    for (std::size_t c = 0; c < idx.size(); ++c) {
      if (idx[c] >= dims_.n) fail(ErrorCode::DimensionMismatch, "lateral index out of range");
      for (std::size_t i = 0; i < dims_.m; ++i) out(i, c, k) = (*this)(i, idx[c], k);
    }
  return out;
}

std::vector<double> Tensor3::tube(std::size_t i, std::size_t j) const {
  std::vector<double> t(dims_.p);
  for (std::size_t k = 0; k < dims_.p; ++k) t[k] = (*this)(i, j, k);
  return t;
}

// ---------------------------------------------------------------------------
// CTensor3

CTensor3::CTensor3(std::size_t m, std::size_t n, std::size_t p, bool from_real)
    : dims_{m, n, p}, from_real_(from_real) {
  require_positive(m, n, p);
  data_.assign(m * n * p, cdouble{});
}

CTensor3 CTensor3::from_slices(const std::vector<Eigen::MatrixXcd>& slices, bool from_real) {
  if (slices.empty()) fail(ErrorCode::DimensionMismatch, "no frontal slices");
  const auto m = static_cast<std::size_t>(slices.front().rows());
  const auto n = static_cast<std::size_t>(slices.front().cols());
  CTensor3 out(m, n, slices.size(), from_real);
  for (std::size_t k = 0; k < slices.size(); ++k) {
    if (static_cast<std::size_t>(slices[k].rows()) != m ||
        static_cast<std::size_t>(slices[k].cols()) != n)
      fail(ErrorCode::DimensionMismatch, "frontal slices differ in shape");
    out.slice(k) = slices[k];
  }
  return out;
}

CTensor3::ConstSliceMap CTensor3::slice(std::size_t k) const {
  return ConstSliceMap(data_.data() + k * dims_.m * dims_.n, static_cast<Eigen::Index>(dims_.m),
                       static_cast<Eigen::Index>(dims_.n));
}

CTensor3::SliceMap CTensor3::slice(std::size_t k) {
  return SliceMap(data_.data() + k * dims_.m * dims_.n, static_cast<Eigen::Index>(dims_.m),
                  static_cast<Eigen::Index>(dims_.n));
}

// ---------------------------------------------------------------------------
// Transforms

CTensor3 fft3(const Tensor3& x) {
  const auto [m, n, p] = x.dims();
  const std::size_t mn = m * n;
  CTensor3 out(m, n, p, true);
  if (p == 1) {
    for (std::size_t t = 0; t < mn; ++t) out.values()[t] = x.values()[t];
    return out;
  }

  // Real-to-complex along every tube; the output holds slices 0..p/2.
  std::vector<double> in(x.values().begin(), x.values().end());
  const int len = static_cast<int>(p);
  const int howmany = static_cast<int>(mn);
  const int stride = static_cast<int>(mn);
  fftw_plan raw;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    raw = fftw_plan_many_dft_r2c(1, &len, howmany, in.data(), nullptr, stride, 1,
                                 as_fftw(out.values().data()), nullptr, stride, 1, FFTW_ESTIMATE);
  }
  Plan plan(raw);
  plan.execute();
  mirror_conjugate(out);
  return out;
}

void mirror_conjugate(CTensor3& xh) {
  const std::size_t p = xh.depth();
  for (std::size_t k = independent_slices(p); k < p; ++k)
    xh.slice(k) = xh.slice(p - k).conjugate();
  xh.set_from_real(true);
}

double conjugate_symmetry_residual(const CTensor3& xh) {
  const std::size_t p = xh.depth();
  double total = 0.0;
  for (std::size_t k = 0; k < p; ++k) total += xh.slice(k).squaredNorm();
  if (total == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    const double r = (xh.slice(k) - xh.slice(mirror_index(k, p)).conjugate()).norm();
    worst = std::max(worst, r);
  }
  return worst / std::sqrt(total);
}

namespace {

// Full complex inverse DFT along mode 3, scaled by 1/p.
std::vector<cdouble> inverse_dft(const CTensor3& xh) {
  const auto [m, n, p] = xh.dims();
  const std::size_t mn = m * n;
  std::vector<cdouble> in(xh.values().begin(), xh.values().end());
  if (p == 1) return in;
  std::vector<cdouble> out(in.size());
  const int len = static_cast<int>(p);
  const int howmany = static_cast<int>(mn);
  const int stride = static_cast<int>(mn);
  fftw_plan raw;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    raw = fftw_plan_many_dft(1, &len, howmany, as_fftw(in.data()), nullptr, stride, 1,
                             as_fftw(out.data()), nullptr, stride, 1, FFTW_BACKWARD,
                             FFTW_ESTIMATE);
  }
  Plan plan(raw);
  plan.execute();
  const double scale = 1.0 / static_cast<double>(p);
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace

Tensor3 ifft3(const CTensor3& xh, double tol) {
  const double residual = conjugate_symmetry_residual(xh);
  if (residual > tol)
    fail(ErrorCode::ConjugateSymmetryViolation,
         "Fourier slices are not conjugate symmetric (relative residual " +
             std::to_string(residual) + ")");
  const auto full = inverse_dft(xh);
  std::vector<double> re(full.size());
  std::transform(full.begin(), full.end(), re.begin(), [](cdouble v) { return v.real(); });
  return Tensor3(xh.rows(), xh.cols(), xh.depth(), std::move(re));
}

double inverse_imag_residue(const CTensor3& xh) {
  const auto full = inverse_dft(xh);
  double max_re = 0.0;
  double max_im = 0.0;
  for (const auto& v : full) {
    max_re = std::max(max_re, std::abs(v.real()));
    max_im = std::max(max_im, std::abs(v.imag()));
  }
  return max_im / std::max(1.0, max_re);
}

// ---------------------------------------------------------------------------
// Block-circulant view

Eigen::MatrixXd bcirc(const Tensor3& a) {
  const auto [m, n, p] = a.dims();
  Eigen::MatrixXd out(m * p, n * p);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c)
      out.block(r * m, c * n, m, n) = a.frontal((r + p - c) % p);
  return out;
}

Eigen::MatrixXd matvec(const Tensor3& a) {
  const auto [m, n, p] = a.dims();
  Eigen::MatrixXd out(m * p, n);
  for (std::size_t k = 0; k < p; ++k) out.block(k * m, 0, m, n) = a.frontal(k);
  return out;
}

Tensor3 matvec_inverse(const Eigen::MatrixXd& stacked, std::size_t p) {
  if (p == 0 || stacked.rows() % static_cast<Eigen::Index>(p) != 0)
    fail(ErrorCode::DimensionMismatch, "stacked rows not divisible by depth");
  const auto m = static_cast<std::size_t>(stacked.rows()) / p;
  const auto n = static_cast<std::size_t>(stacked.cols());
  Tensor3 out(m, n, p);
  for (std::size_t k = 0; k < p; ++k) out.frontal(k) = stacked.block(k * m, 0, m, n);
  return out;
}

// ---------------------------------------------------------------------------
// t-product algebra

Tensor3 tprod(const Tensor3& a, const Tensor3& b) {
  if (a.cols() != b.rows() || a.depth() != b.depth())
    fail(ErrorCode::DimensionMismatch,
         "t-product of " + dims_str(a.dims()) + " and " + dims_str(b.dims()));
  const auto ah = fft3(a);
  const auto bh = fft3(b);
  const std::size_t p = a.depth();
  CTensor3 ch(a.rows(), b.cols(), p, true);
  for (std::size_t k = 0; k < independent_slices(p); ++k)
    ch.slice(k).noalias() = ah.slice(k) * bh.slice(k);
  mirror_conjugate(ch);
  return ifft3(ch);
}

Tensor3 ttranspose(const Tensor3& a) {
  const auto [m, n, p] = a.dims();
  Tensor3 out(n, m, p);
  for (std::size_t k = 0; k < p; ++k) out.frontal(k) = a.frontal(mirror_index(k, p)).transpose();
  return out;
}

Tensor3 identity(std::size_t m, std::size_t p) {
  Tensor3 out(m, m, p);
  out.frontal(0).setIdentity();
  return out;
}

double frob_inner(const Tensor3& a, const Tensor3& b) {
  if (a.dims() != b.dims())
    fail(ErrorCode::DimensionMismatch,
         "inner product of " + dims_str(a.dims()) + " and " + dims_str(b.dims()));
  double s = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t t = 0; t < av.size(); ++t) s += av[t] * bv[t];
  return s;
}

double frob_norm(const Tensor3& a) { return std::sqrt(frob_inner(a, a)); }

double trace_f(const Tensor3& a) {
  if (a.rows() != a.cols()) fail(ErrorCode::NotSquare, "frontal trace of " + dims_str(a.dims()));
  const auto ah = fft3(a);
  cdouble s{};
  for (std::size_t k = 0; k < a.depth(); ++k) s += ah.slice(k).trace();
  return s.real() / static_cast<double>(a.depth());
}

bool check_f_symmetric(const Tensor3& a, double tol) {
  if (a.rows() != a.cols()) fail(ErrorCode::NotSquare, "symmetry check of " + dims_str(a.dims()));
  const auto ah = fft3(a);
  for (std::size_t k = 0; k < independent_slices(a.depth()); ++k) {
    const auto s = ah.slice(k);
    if ((s - s.adjoint()).norm() > tol * s.norm()) return false;
  }
  return true;
}

bool check_f_psd(const Tensor3& a, double tol) {
  if (!check_f_symmetric(a, tol)) return false;
  const auto ah = fft3(a);
  for (std::size_t k = 0; k < independent_slices(a.depth()); ++k) {
    const Eigen::MatrixXcd s = ah.slice(k);
    const auto eig = hermitian_eig(s);
    if (eig.values(0) < -tol * std::max(1.0, s.norm())) return false;
  }
  return true;
}

double max_abs_diff(const Tensor3& a, const Tensor3& b) {
  if (a.dims() != b.dims())
    fail(ErrorCode::DimensionMismatch,
         "comparing " + dims_str(a.dims()) + " with " + dims_str(b.dims()));
  double worst = 0.0;
  for (std::size_t t = 0; t < a.values().size(); ++t)
    worst = std::max(worst, std::abs(a.values()[t] - b.values()[t]));
  return worst;
}

}  // namespace tdr
