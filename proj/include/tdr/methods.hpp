#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdr/graph.hpp"
#include "tdr/tensor.hpp"

namespace tdr {

enum class Method { Mpca, Monpp, Mkpca, Mkonpp, Mlle, Mle };
enum class Kernel { Gaussian, RbfC, Linear };
enum class GramMode { Shared, PerSlice };
enum class WeightDomain { Fourier, Original };
/// Weights used by MONPP.
enum class ProjectionWeights { Lle, Gaussian };

const char* to_string(Method m);
const char* to_string(Kernel k);
const char* to_string(GramMode g);
const char* to_string(WeightDomain w);
const char* to_string(ProjectionWeights w);
const char* to_string(DegreeMode d);

/// Parsers accept the CLI spellings; they throw InvalidConfig otherwise.
Method parse_method(const std::string& s);
Kernel parse_kernel(const std::string& s);
GramMode parse_gram_mode(const std::string& s);
WeightDomain parse_weight_domain(const std::string& s);
ProjectionWeights parse_weights(const std::string& s);
DegreeMode parse_degree_mode(const std::string& s);

struct ReductionConfig {
  Method method = Method::Mpca;
  std::size_t dim = 2;
  std::size_t neighbors = 5;
  /// Empty means the median-distance heuristic.
  std::optional<double> sigma;
  Kernel kernel = Kernel::Gaussian;
  double rbf_c = 1.0;
  ProjectionWeights weights = ProjectionWeights::Lle;
  DegreeMode degree = DegreeMode::RowSum;
  GramMode gram = GramMode::Shared;
  WeightDomain weight_domain = WeightDomain::Fourier;
  double lle_reg = kDefaultLleReg;
  /// MKPCA: scale each embedding row by sqrt(lambda), i.e. project onto the
  /// coefficient vectors v / sqrt(lambda).
  bool kpca_scale = false;
  std::uint64_t seed = 0;
  double tol = kDefaultTol;

  /// Checks ranges against the data shape.
  void validate(const Dims& data) const;
};

struct ReductionDiagnostics {
  double objective = 0.0;
  /// Selected eigenvalues per Fourier slice (p rows).
  std::vector<std::vector<double>> spectra;
  double seconds = 0.0;
  /// Relative imaginary part of the inverse transform of the embedding.
  double imag_residue = 0.0;
  /// Method constraint residual measured on the Fourier slices.
  double constraint_residual = 0.0;
  /// Bandwidth actually used (0 when none).
  double sigma = 0.0;
};

struct ReductionOutput {
  Tensor3 y;                 // d x n x p
  std::optional<Tensor3> v;  // m x d x p for MPCA and MONPP
  ReductionDiagnostics diagnostics;
};

/// Centered Gram matrices, one per Fourier slice (shared mode repeats one).
struct GramStack {
  std::vector<Eigen::MatrixXcd> slices;  // independent_slices(p) entries
  std::size_t p = 1;
  bool shared = true;
};

struct Centered {
  Tensor3 x;     // m x n x p
  Tensor3 mean;  // m x 1 x p
};

Centered center_data(const Tensor3& x);

/// H g H with H = I - (1/n) 1 1^T.
Eigen::MatrixXcd center_gram(const Eigen::MatrixXcd& g);

/// Uncentered kernel matrix between columns.
Eigen::MatrixXcd kernel_matrix(const Eigen::MatrixXcd& columns, Kernel kernel, double sigma,
                               double rbf_c);

/// Bandwidth from cfg.sigma or the median heuristic on x.
double resolve_sigma(const Tensor3& x, const ReductionConfig& cfg);

GramStack build_gram(const Tensor3& centered, const ReductionConfig& cfg);

/// Weight graphs for slices 0..independent_slices(p)-1. Original-domain mode
/// builds one graph on the flattened samples and repeats it.
std::vector<WeightGraph> slice_weights(const Tensor3& x, const ReductionConfig& cfg,
                                       WeightKind kind, double sigma);

ReductionOutput mpca(const Tensor3& x, const ReductionConfig& cfg);
ReductionOutput monpp(const Tensor3& x, const ReductionConfig& cfg);
ReductionOutput mkpca(const Tensor3& x, const ReductionConfig& cfg);
ReductionOutput mkonpp(const Tensor3& x, const ReductionConfig& cfg);
ReductionOutput mlle(const Tensor3& x, const ReductionConfig& cfg);
ReductionOutput mle(const Tensor3& x, const ReductionConfig& cfg);

/// MKONPP core on given centered Gram and operator slices (independent
/// slices only). Rows of each embedding slice are the d smallest
/// eigenvectors of Q^{1/2} G Q^{1/2}.
ReductionOutput mkonpp_embed(const GramStack& gram, const std::vector<Eigen::MatrixXcd>& q,
                             std::size_t d, double tol = kDefaultTol);

/// Dispatches on cfg.method after validation and records the wall time.
ReductionOutput reduce(const Tensor3& x, const ReductionConfig& cfg);

}  // namespace tdr
