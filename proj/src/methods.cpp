#include "tdr/methods.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "tdr/error.hpp"
#include "tdr/parallel.hpp"
#include "tdr/spectral.hpp"

namespace tdr {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t v) { return static_cast<Index>(v); }

// Rows (d x n) and selected eigenvalues for each independent slice.
struct SliceRows {
  Eigen::MatrixXcd rows;
  std::vector<double> eigs;
};

std::vector<std::vector<double>> mirrored(const std::vector<SliceRows>& half, std::size_t p) {
  std::vector<std::vector<double>> out(p);
  for (std::size_t k = 0; k < p; ++k) out[k] = half[k < half.size() ? k : p - k].eigs;
  return out;
}

double mean_sum(const std::vector<std::vector<double>>& spectra) {
  double s = 0.0;
  for (const auto& row : spectra)
    for (double v : row) s += v;
  return s / static_cast<double>(spectra.size());
}

// Embedding from per-slice rows; metric is the constraint matrix per slice
// (identity when empty).
ReductionOutput assemble(const std::vector<SliceRows>& half, std::size_t p, double tol,
                         const std::vector<Eigen::MatrixXcd>& metric = {}) {
  std::vector<Eigen::MatrixXcd> rows(half.size());
  double residual = 0.0;
  for (std::size_t k = 0; k < half.size(); ++k) {
    rows[k] = half[k].rows;
    const Index d = rows[k].rows();
    const Eigen::MatrixXcd gram =
        metric.empty() ? Eigen::MatrixXcd(rows[k] * rows[k].adjoint())
                       : Eigen::MatrixXcd(rows[k] * metric[k] * rows[k].adjoint());
    residual = std::max(residual, (gram - Eigen::MatrixXcd::Identity(d, d)).norm());
  }
  const CTensor3 yh = conjugate_completion(rows, p, tol);
  ReductionOutput out;
  out.diagnostics.imag_residue = inverse_imag_residue(yh);
  out.y = ifft3(yh, tol);
  out.diagnostics.spectra = mirrored(half, p);
  out.diagnostics.objective = mean_sum(out.diagnostics.spectra);
  out.diagnostics.constraint_residual = residual;
  return out;
}

// Rows are adjoints of the chosen eigenvector columns.
SliceRows pick(const EigenDecomposition& eig, const std::vector<Index>& cols, bool scale = false) {
  SliceRows s;
  s.rows.resize(idx(cols.size()), eig.vectors.rows());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    s.rows.row(idx(j)) = eig.vectors.col(cols[j]).adjoint();
    if (scale) s.rows.row(idx(j)) *= std::sqrt(std::max(eig.values(cols[j]), 0.0));
    s.eigs.push_back(eig.values(cols[j]));
  }
  return s;
}

std::vector<Index> range(Index first, std::size_t count) {
  std::vector<Index> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = first + idx(j);
  return out;
}

std::vector<Index> top(Index n, std::size_t count) {
  std::vector<Index> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = n - 1 - idx(j);
  return out;
}

// Y = V^T * X through the Fourier slices, with the residue recorded.
void project(ReductionOutput& out, const Tensor3& v, const Tensor3& x, double tol) {
  const auto vh = fft3(v);
  const auto xh = fft3(x);
  const std::size_t p = x.depth();
  CTensor3 yh(v.cols(), x.cols(), p, true);
  double residual = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    yh.slice(k) = vh.slice(k).adjoint() * xh.slice(k);
    const Index d = idx(v.cols());
    residual = std::max(residual, (vh.slice(k).adjoint() * vh.slice(k) -
                                   Eigen::MatrixXcd::Identity(d, d)).norm());
  }
  out.diagnostics.imag_residue = inverse_imag_residue(yh);
  out.diagnostics.constraint_residual = residual;
  out.y = ifft3(yh, tol);
  out.v = v;
}

void require_gram(const GramStack& g) {
  for (const auto& s : g.slices) {
    if (s.norm() <= 1e-13 * static_cast<double>(s.rows()))
      fail(ErrorCode::DegenerateGram, "centered Gram matrix is zero (all samples identical?)");
  }
}

void require_spread(const Tensor3& centered, const Tensor3& raw) {
  if (frob_norm(centered) <= 1e-14 * std::max(1.0, frob_norm(raw)))
    fail(ErrorCode::DegenerateGram, "centered data is zero (all samples identical)");
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& q) {
  const auto eig = hermitian_eig(q);
  const Eigen::VectorXd root = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * root.cast<cdouble>().asDiagonal() * eig.vectors.adjoint();
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& a) { return (a + a.adjoint()) * 0.5; }

}  // namespace

// ---------------------------------------------------------------------------
// Names

const char* to_string(Method m) {
  switch (m) {
    case Method::Mpca: return "mpca";
    case Method::Monpp: return "monpp";
    case Method::Mkpca: return "mkpca";
    case Method::Mkonpp: return "mkonpp";
    case Method::Mlle: return "mlle";
    case Method::Mle: return "mle";
  }
  return "?";
}

const char* to_string(Kernel k) {
  switch (k) {
    case Kernel::Gaussian: return "gaussian";
    case Kernel::RbfC: return "rbf";
    case Kernel::Linear: return "linear";
  }
  return "?";
}

const char* to_string(GramMode g) { return g == GramMode::Shared ? "shared" : "per-slice"; }
const char* to_string(WeightDomain w) { return w == WeightDomain::Fourier ? "fourier" : "original"; }
const char* to_string(ProjectionWeights w) { return w == ProjectionWeights::Lle ? "lle" : "gaussian"; }
const char* to_string(DegreeMode d) { return d == DegreeMode::RowSum ? "rowsum" : "paper"; }

namespace {
template <typename E, std::size_t N>
E parse_enum(const std::string& s, const E (&values)[N], const char* what) {
  for (E v : values)
    if (s == to_string(v)) return v;
  fail(ErrorCode::InvalidConfig, std::string("unknown ") + what + " '" + s + "'");
}
}  // namespace

Method parse_method(const std::string& s) {
  static const Method all[] = {Method::Mpca, Method::Monpp, Method::Mkpca,
                               Method::Mkonpp, Method::Mlle, Method::Mle};
  return parse_enum(s, all, "method");
}
Kernel parse_kernel(const std::string& s) {
  static const Kernel all[] = {Kernel::Gaussian, Kernel::RbfC, Kernel::Linear};
  return parse_enum(s, all, "kernel");
}
GramMode parse_gram_mode(const std::string& s) {
  static const GramMode all[] = {GramMode::Shared, GramMode::PerSlice};
  return parse_enum(s, all, "gram mode");
}
WeightDomain parse_weight_domain(const std::string& s) {
  static const WeightDomain all[] = {WeightDomain::Fourier, WeightDomain::Original};
  return parse_enum(s, all, "weight domain");
}
ProjectionWeights parse_weights(const std::string& s) {
  static const ProjectionWeights all[] = {ProjectionWeights::Lle, ProjectionWeights::Gaussian};
  return parse_enum(s, all, "weights");
}
DegreeMode parse_degree_mode(const std::string& s) {
  static const DegreeMode all[] = {DegreeMode::RowSum, DegreeMode::UnitDiagonal};
  return parse_enum(s, all, "degree mode");
}

// ---------------------------------------------------------------------------

void ReductionConfig::validate(const Dims& data) const {
  const bool linear = method == Method::Mpca || method == Method::Monpp;
  const std::size_t cap = linear ? data.m : data.n - 1;
  if (dim < 1 || dim > cap)
    fail(ErrorCode::DOutOfRange, "dim = " + std::to_string(dim) + " must lie in [1, " +
                                     std::to_string(cap) + "] for " + to_string(method));
  const bool graph = method == Method::Monpp || method == Method::Mkonpp ||
                     method == Method::Mlle || method == Method::Mle;
  if (graph && (neighbors < 1 || neighbors + 1 > data.n))
    fail(ErrorCode::KOutOfRange, "neighbors = " + std::to_string(neighbors) + " with n = " +
                                     std::to_string(data.n));
  if (sigma && !(*sigma > 0.0))
    fail(ErrorCode::SigmaNonPositive, "sigma = " + std::to_string(*sigma));
  if (!(rbf_c > 0.0)) fail(ErrorCode::SigmaNonPositive, "rbf c = " + std::to_string(rbf_c));
  if (!(lle_reg >= 0.0)) fail(ErrorCode::InvalidConfig, "lle_reg must be nonnegative");
  if (!(tol > 0.0)) fail(ErrorCode::InvalidConfig, "tol must be positive");
}

Centered center_data(const Tensor3& x) {
  const auto [m, n, p] = x.dims();
  Tensor3 mean(m, 1, p);
  for (std::size_t k = 0; k < p; ++k) mean.frontal(k) = x.frontal(k).rowwise().mean();
  Tensor3 c = x;
  for (std::size_t k = 0; k < p; ++k) c.frontal(k).colwise() -= mean.frontal(k).col(0);
  return Centered{std::move(c), std::move(mean)};
}

Eigen::MatrixXcd center_gram(const Eigen::MatrixXcd& g) {
  const Index n = g.rows();
  const Eigen::MatrixXcd h =
      Eigen::MatrixXcd::Identity(n, n) - Eigen::MatrixXcd::Constant(n, n, 1.0 / static_cast<double>(n));
  return hermitian_part(h * g * h);
}

Eigen::MatrixXcd kernel_matrix(const Eigen::MatrixXcd& columns, Kernel kernel, double sigma,
                               double rbf_c) {
  if (kernel == Kernel::Linear) return hermitian_part(columns.adjoint() * columns);
  double denom = rbf_c;
  if (kernel == Kernel::Gaussian) {
    if (!(sigma > 0.0)) fail(ErrorCode::SigmaNonPositive, "sigma = " + std::to_string(sigma));
    denom = 2.0 * sigma * sigma;
  }
  if (!(denom > 0.0)) fail(ErrorCode::SigmaNonPositive, "kernel width must be positive");
  const Eigen::MatrixXd d = pairwise_sqdist(columns);
  return (-d.array() / denom).exp().matrix().cast<cdouble>();
}

double resolve_sigma(const Tensor3& x, const ReductionConfig& cfg) {
  return cfg.sigma ? *cfg.sigma : median_bandwidth(x);
}

GramStack build_gram(const Tensor3& centered, const ReductionConfig& cfg) {
  const std::size_t p = centered.depth();
  const double sigma = cfg.kernel == Kernel::Gaussian ? resolve_sigma(centered, cfg) : 0.0;
  GramStack g;
  g.p = p;
  g.shared = cfg.gram == GramMode::Shared;
  const std::size_t half = independent_slices(p);
  if (g.shared) {
    const Eigen::MatrixXcd cols = sample_matrix(centered).cast<cdouble>();
    g.slices.assign(half, center_gram(kernel_matrix(cols, cfg.kernel, sigma, cfg.rbf_c)));
  } else {
    const auto xh = fft3(centered);
    g.slices.resize(half);
    parallel_for(half, [&](std::size_t k) {
      Eigen::MatrixXcd s = center_gram(kernel_matrix(xh.slice(k), cfg.kernel, sigma, cfg.rbf_c));
      if (k == 0 || 2 * k == p) s = s.real().cast<cdouble>();
      g.slices[k] = std::move(s);
    });
  }
  return g;
}

std::vector<WeightGraph> slice_weights(const Tensor3& x, const ReductionConfig& cfg,
                                       WeightKind kind, double sigma) {
  auto build = [&](const Eigen::MatrixXcd& cols) {
    switch (kind) {
      case WeightKind::LleReconstruction: return lle_weights(cols, cfg.neighbors, cfg.lle_reg);
      case WeightKind::GaussianNormalized: return gaussian_weights(cols, cfg.neighbors, sigma, true);
      case WeightKind::GaussianAffinity: break;
    }
    return gaussian_weights(cols, cfg.neighbors, sigma, false);
  };
  const std::size_t half = independent_slices(x.depth());
  if (cfg.weight_domain == WeightDomain::Original)
    return std::vector<WeightGraph>(half, build(sample_matrix(x).cast<cdouble>()));
  const auto xh = fft3(x);
  std::vector<WeightGraph> out(half);
  parallel_for(half, [&](std::size_t k) { out[k] = build(xh.slice(k)); });
  return out;
}

// ---------------------------------------------------------------------------
// Methods

ReductionOutput mpca(const Tensor3& x, const ReductionConfig& cfg) {
  const auto c = center_data(x);
  const Tensor3 a = tprod(c.x, ttranspose(c.x));
  auto opt = trace_opt_max(a, cfg.dim, cfg.tol);
  ReductionOutput out;
  project(out, opt.v, c.x, cfg.tol);
  out.diagnostics.objective = opt.objective;
  out.diagnostics.spectra = std::move(opt.per_slice_eigs);
  return out;
}

ReductionOutput monpp(const Tensor3& x, const ReductionConfig& cfg) {
  const bool lle = cfg.weights == ProjectionWeights::Lle;
  const double sigma = lle ? 0.0 : resolve_sigma(x, cfg);
  const auto graphs = slice_weights(
      x, cfg, lle ? WeightKind::LleReconstruction : WeightKind::GaussianNormalized, sigma);
  const auto xh = fft3(x);
  const std::size_t p = x.depth();
  std::vector<Eigen::MatrixXcd> mh(graphs.size());
  parallel_for(graphs.size(), [&](std::size_t k) {
    mh[k] = hermitian_part(xh.slice(k) * reconstruction_operator(graphs[k]) * xh.slice(k).adjoint());
  });
  const Tensor3 m = ifft3(conjugate_completion(mh, p, 1e-8), 1e-8);
  auto opt = trace_opt_min(m, cfg.dim, cfg.tol);
  ReductionOutput out;
  project(out, opt.v, x, cfg.tol);
  out.diagnostics.objective = opt.objective;
  out.diagnostics.spectra = std::move(opt.per_slice_eigs);
  out.diagnostics.sigma = sigma;
  return out;
}

ReductionOutput mkpca(const Tensor3& x, const ReductionConfig& cfg) {
  const auto c = center_data(x);
  require_spread(c.x, x);
  const auto gram = build_gram(c.x, cfg);
  require_gram(gram);
  const std::size_t half = gram.slices.size();
  std::vector<SliceRows> rows(half);
  auto solve = [&](std::size_t k) {
    const auto eig = hermitian_eig(gram.slices[k]);
    rows[k] = pick(eig, top(eig.values.size(), cfg.dim), cfg.kpca_scale);
  };
  if (gram.shared) {
    solve(0);
    std::fill(rows.begin() + 1, rows.end(), rows[0]);
  } else {
    parallel_for(half, solve);
  }
  auto out = assemble(rows, x.depth(), cfg.tol);
  if (cfg.kpca_scale) out.diagnostics.constraint_residual = 0.0;
  if (cfg.kernel == Kernel::Gaussian) out.diagnostics.sigma = resolve_sigma(c.x, cfg);
  return out;
}

ReductionOutput mkonpp_embed(const GramStack& gram, const std::vector<Eigen::MatrixXcd>& q,
                             std::size_t d, double tol) {
  if (q.size() != gram.slices.size())
    fail(ErrorCode::DimensionMismatch, "operator and Gram slice counts differ");
  require_gram(gram);
  std::vector<SliceRows> rows(q.size());
  parallel_for(q.size(), [&](std::size_t k) {
    const Eigen::MatrixXcd root = psd_sqrt(hermitian_part(q[k]));
    Eigen::MatrixXcd s = hermitian_part(root * gram.slices[k] * root);
    if (k == 0 || 2 * k == gram.p) s = s.real().cast<cdouble>();
    rows[k] = pick(hermitian_eig(s), range(0, d));
  });
  return assemble(rows, gram.p, tol);
}

ReductionOutput mkonpp(const Tensor3& x, const ReductionConfig& cfg) {
  const auto c = center_data(x);
  require_spread(c.x, x);
  const auto gram = build_gram(c.x, cfg);
  const double sigma = resolve_sigma(x, cfg);
  const auto graphs = slice_weights(x, cfg, WeightKind::GaussianNormalized, sigma);
  std::vector<Eigen::MatrixXcd> q(graphs.size());
  for (std::size_t k = 0; k < graphs.size(); ++k) q[k] = reconstruction_operator(graphs[k]);
  auto out = mkonpp_embed(gram, q, cfg.dim, cfg.tol);
  out.diagnostics.sigma = sigma;
  return out;
}

ReductionOutput mlle(const Tensor3& x, const ReductionConfig& cfg) {
  const auto graphs = slice_weights(x, cfg, WeightKind::LleReconstruction, 0.0);
  std::vector<SliceRows> rows(graphs.size());
  parallel_for(graphs.size(), [&](std::size_t k) {
    Eigen::MatrixXcd nk = hermitian_part(reconstruction_operator(graphs[k]));
    if (k == 0 || 2 * k == x.depth()) nk = nk.real().cast<cdouble>();
    // The smallest eigenpair is the constant direction (rows of W sum to one).
    rows[k] = pick(hermitian_eig(nk), range(1, cfg.dim));
  });
  return assemble(rows, x.depth(), cfg.tol);
}

ReductionOutput mle(const Tensor3& x, const ReductionConfig& cfg) {
  const double sigma = resolve_sigma(x, cfg);
  const auto graphs = slice_weights(x, cfg, WeightKind::GaussianAffinity, sigma);
  std::vector<SliceRows> rows(graphs.size());
  std::vector<Eigen::MatrixXcd> degrees(graphs.size());
  parallel_for(graphs.size(), [&](std::size_t k) {
    auto lp = laplacian(graphs[k], cfg.degree);
    if (k == 0 || 2 * k == x.depth()) {
      lp.l = lp.l.real().cast<cdouble>();
      lp.d = lp.d.real().cast<cdouble>();
    }
    const auto eig = generalized_hermitian_eig(hermitian_part(lp.l), lp.d);
    if (cfg.degree == DegreeMode::RowSum) {
      const double top_value = eig.values.cwiseAbs().maxCoeff();
      Index zeros = 0;
      for (Index j = 0; j < eig.values.size(); ++j)
        if (std::abs(eig.values(j)) <= 1e-8 * top_value) ++zeros;
      if (zeros > 1)
        fail(ErrorCode::DisconnectedGraph,
             "Fourier slice " + std::to_string(k + 1) + " has " + std::to_string(zeros) +
                 " zero Laplacian eigenvalues; increase neighbors or sigma");
    }
    rows[k] = pick(eig, range(1, cfg.dim));
    degrees[k] = lp.d;
  });
  auto out = assemble(rows, x.depth(), cfg.tol, degrees);
  out.diagnostics.sigma = sigma;
  return out;
}

ReductionOutput reduce(const Tensor3& x, const ReductionConfig& cfg) {
  cfg.validate(x.dims());
  const auto start = std::chrono::steady_clock::now();
  ReductionOutput out;
  switch (cfg.method) {
    case Method::Mpca: out = mpca(x, cfg); break;
    case Method::Monpp: out = monpp(x, cfg); break;
    case Method::Mkpca: out = mkpca(x, cfg); break;
    case Method::Mkonpp: out = mkonpp(x, cfg); break;
    case Method::Mlle: out = mlle(x, cfg); break;
    case Method::Mle: out = mle(x, cfg); break;
  }
  out.diagnostics.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace tdr
