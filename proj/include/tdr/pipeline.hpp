#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdr/methods.hpp"
#include "tdr/tensor.hpp"

namespace tdr {

struct LabeledDataset {
  Tensor3 x;  // m x n x p, samples are lateral slices
  std::vector<int> labels;
  std::string name;
};

/// One base-10 integer per line; blank trailing lines are ignored.
std::vector<int> read_labels(const std::string& path);
void write_labels(const std::vector<int>& labels, const std::string& path);

LabeledDataset load_dataset(const std::string& tensor_path, const std::string& labels_path);
void save_tensor(const Tensor3& y, const std::string& path);

/// Gaussian clusters (spread = per-entry std) around centers drawn with
/// per-entry std 5. Samples are grouped by class.
LabeledDataset synth_blobs(std::size_t classes, std::size_t per_class, std::size_t m,
                           std::size_t p, double spread, std::uint64_t seed);

struct RingOptions {
  double inner_radius = 0.2;
  double outer_radius = 1.0;
  /// Std of the two nuisance coordinates.
  double nuisance_std = 0.1;
  /// Fraction of samples whose nuisance coordinates are gross outliers.
  double outlier_fraction = 0.03;
  double outlier_scale = 30.0;
};

/// Two concentric circles in coordinates (0, 1) of a 4 x n x p tensor.
/// Every frontal slice holds the same circle point plus its own isotropic
/// noise; coordinates 2 and 3 are nuisance values shared by all slices.
/// Ring 0 (label 0) is the inner ring.
LabeledDataset synth_rings(std::size_t n_per_ring, double noise, std::size_t p,
                           std::uint64_t seed, const RingOptions& opts = {});

/// n x (d*p); row j concatenates y(:, j, k) over k.
Eigen::MatrixXd flatten_embedding(const Tensor3& y);

/// Euclidean k-NN majority vote. Vote ties: smaller mean distance, then lower
/// label. Distance ties: lower training index.
std::vector<int> knn_classify(const Eigen::MatrixXd& train, const std::vector<int>& train_labels,
                              const Eigen::MatrixXd& test, std::size_t k);

/// Fold index sets (each sorted). Classes are shuffled with the seed and dealt
/// round-robin; the dealing position carries over between classes.
std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& labels,
                                                       std::size_t folds, std::uint64_t seed);

/// 100 * correct / total.
double accuracy_percent(const std::vector<int>& predicted, const std::vector<int>& truth);

struct CVConfig {
  std::size_t folds = 5;
  std::size_t knn_k = 5;
  std::uint64_t seed = 0;
};

struct CVReport {
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  double reduction_seconds = 0.0;
  double classification_seconds = 0.0;
  ReductionConfig cfg;
  CVConfig cv;
  Dims dims;
  std::string dataset;
  ReductionDiagnostics diagnostics;
};

/// Reduces the whole tensor once, then cross-validates KNN on the flattened
/// embedding.
CVReport run_experiment(const LabeledDataset& data, const ReductionConfig& cfg,
                        const CVConfig& cv);

std::string report_json(const CVReport& report);

}  // namespace tdr
