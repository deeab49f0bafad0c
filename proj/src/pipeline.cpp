#include "tdr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "json.hpp"

#include "tdr/error.hpp"
#include "tdr/parallel.hpp"

namespace tdr {

namespace {

using Index = Eigen::Index;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<int> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(trim(line));
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  std::vector<int> labels;
  labels.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(lines[i], &used, 10);
    } catch (const std::exception&) {
      used = 0;
    }
    if (lines[i].empty() || used != lines[i].size())
      fail(ErrorCode::IoError, path + ":" + std::to_string(i + 1) + ": not an integer label");
    labels.push_back(v);
  }
  return labels;
}

void write_labels(const std::vector<int>& labels, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  for (int v : labels) out << v << '\n';
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

LabeledDataset load_dataset(const std::string& tensor_path, const std::string& labels_path) {
  LabeledDataset d{read_t3f1(tensor_path), read_labels(labels_path), tensor_path};
  if (d.labels.size() != d.x.cols())
    fail(ErrorCode::LabelCountMismatch, std::to_string(d.labels.size()) + " labels for " +
                                            std::to_string(d.x.cols()) + " samples");
  return d;
}

void save_tensor(const Tensor3& y, const std::string& path) { write_t3f1(y, path); }

// ---------------------------------------------------------------------------
// Synthetic data

LabeledDataset synth_blobs(std::size_t classes, std::size_t per_class, std::size_t m,
                           std::size_t p, double spread, std::uint64_t seed) {
  if (classes < 1 || per_class < 1) fail(ErrorCode::InvalidConfig, "empty blob specification");
  if (!(spread >= 0.0)) fail(ErrorCode::InvalidConfig, "spread must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t n = classes * per_class;
  LabeledDataset d{Tensor3(m, n, p), std::vector<int>(n), "blobs"};
  std::vector<std::vector<double>> c(classes, std::vector<double>(m * p));
  for (auto& center : c)
    for (double& v : center) v = 5.0 * normal(rng);
  for (std::size_t cls = 0; cls < classes; ++cls)
    for (std::size_t s = 0; s < per_class; ++s) {
      const std::size_t j = cls * per_class + s;
      d.labels[j] = static_cast<int>(cls);
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t i = 0; i < m; ++i) d.x(i, j, k) = c[cls][k * m + i] + spread * normal(rng);
    }
  return d;
}

LabeledDataset synth_rings(std::size_t n_per_ring, double noise, std::size_t p,
                           std::uint64_t seed, const RingOptions& opts) {
  if (n_per_ring < 1 || p < 1) fail(ErrorCode::InvalidConfig, "empty ring specification");
  if (!(noise >= 0.0)) fail(ErrorCode::InvalidConfig, "noise must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));

  const std::size_t n = 2 * n_per_ring;
  LabeledDataset d{Tensor3(4, n, p), std::vector<int>(n), "rings"};

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto outliers = static_cast<std::size_t>(std::llround(opts.outlier_fraction * static_cast<double>(n)));
  std::vector<bool> is_outlier(n, false);
  for (std::size_t t = 0; t < outliers && t < n; ++t) is_outlier[order[t]] = true;

  for (std::size_t j = 0; j < n; ++j) {
    const int ring = j < n_per_ring ? 0 : 1;
    const double r = ring == 0 ? opts.inner_radius : opts.outer_radius;
    const double theta = angle(rng);
    const double amp = is_outlier[j] ? opts.outlier_scale : opts.nuisance_std;
    const double z0 = amp * normal(rng);
    const double z1 = amp * normal(rng);
    d.labels[j] = ring;
    for (std::size_t k = 0; k < p; ++k) {
      d.x(0, j, k) = r * std::cos(theta) + noise * normal(rng);
      d.x(1, j, k) = r * std::sin(theta) + noise * normal(rng);
      d.x(2, j, k) = z0;
      d.x(3, j, k) = z1;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Classification

Eigen::MatrixXd flatten_embedding(const Tensor3& y) {
  const auto [d, n, p] = y.dims();
  Eigen::MatrixXd out(static_cast<Index>(n), static_cast<Index>(d * p));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t i = 0; i < d; ++i)
        out(static_cast<Index>(j), static_cast<Index>(k * d + i)) = y(i, j, k);
  return out;
}

std::vector<int> knn_classify(const Eigen::MatrixXd& train, const std::vector<int>& train_labels,
                              const Eigen::MatrixXd& test, std::size_t k) {
  const auto nt = static_cast<std::size_t>(train.rows());
  if (nt == 0) fail(ErrorCode::EmptyTrainSet, "no training samples");
  if (train_labels.size() != nt)
    fail(ErrorCode::LabelCountMismatch, "training labels do not match training rows");
  if (k < 1 || k > nt)
    fail(ErrorCode::KOutOfRange, "knn k = " + std::to_string(k) + " with " +
                                     std::to_string(nt) + " training samples");
  if (test.cols() != train.cols())
    fail(ErrorCode::DimensionMismatch, "train and test feature counts differ");

  std::vector<int> out(static_cast<std::size_t>(test.rows()));
  std::vector<std::size_t> order(nt);
  std::vector<double> dist(nt);
  for (Index t = 0; t < test.rows(); ++t) {
    for (std::size_t r = 0; r < nt; ++r)
      dist[r] = (train.row(static_cast<Index>(r)) - test.row(t)).norm();
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                      });
    std::map<int, std::pair<std::size_t, double>> votes;  // label -> (count, distance sum)
    for (std::size_t r = 0; r < k; ++r) {
      auto& v = votes[train_labels[order[r]]];
      ++v.first;
      v.second += dist[order[r]];
    }
    int best = votes.begin()->first;
    std::size_t best_count = 0;
    double best_mean = 0.0;
    for (const auto& [label, v] : votes) {
      const double mean = v.second / static_cast<double>(v.first);
      if (v.first > best_count || (v.first == best_count && mean < best_mean)) {
        best = label;
        best_count = v.first;
        best_mean = mean;
      }
    }
    out[static_cast<std::size_t>(t)] = best;
  }
  return out;
}

std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& labels,
                                                       std::size_t folds, std::uint64_t seed) {
  if (folds < 2) fail(ErrorCode::InvalidConfig, "need at least two folds");
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t j = 0; j < labels.size(); ++j) classes[labels[j]].push_back(j);
  for (const auto& [label, members] : classes)
    if (members.size() < folds)
      fail(ErrorCode::ClassTooSmall, "class " + std::to_string(label) + " has " +
                                         std::to_string(members.size()) + " samples for " +
                                         std::to_string(folds) + " folds");

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t next = 0;
  for (auto& [label, members] : classes) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t j : members) {
      out[next].push_back(j);
      next = (next + 1) % folds;
    }
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

double accuracy_percent(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size() || truth.empty())
    fail(ErrorCode::LabelCountMismatch, "prediction and truth sizes differ");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i] ? 1 : 0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
}

CVReport run_experiment(const LabeledDataset& data, const ReductionConfig& cfg,
                        const CVConfig& cv) {
  const std::size_t n = data.x.cols();
  if (data.labels.size() != n)
    fail(ErrorCode::LabelCountMismatch, std::to_string(data.labels.size()) + " labels for " +
                                            std::to_string(n) + " samples");
  if (std::set<int>(data.labels.begin(), data.labels.end()).size() < 2)
    fail(ErrorCode::InvalidConfig, "evaluation needs at least two classes");

  CVReport report;
  report.cfg = cfg;
  report.cv = cv;
  report.dims = data.x.dims();
  report.dataset = data.name;

  const auto folds = stratified_kfold(data.labels, cv.folds, cv.seed);

  auto t0 = Clock::now();
  const auto reduced = reduce(data.x, cfg);
  report.reduction_seconds = seconds_since(t0);
  report.diagnostics = reduced.diagnostics;

  t0 = Clock::now();
  const Eigen::MatrixXd features = flatten_embedding(reduced.y);
  report.fold_accuracies.assign(folds.size(), 0.0);
  parallel_for(folds.size(), [&](std::size_t f) {
    std::vector<bool> in_test(n, false);
    for (std::size_t j : folds[f]) in_test[j] = true;
    std::vector<std::size_t> train_idx;
    for (std::size_t j = 0; j < n; ++j)
      if (!in_test[j]) train_idx.push_back(j);

    Eigen::MatrixXd train(static_cast<Index>(train_idx.size()), features.cols());
    std::vector<int> train_labels(train_idx.size());
    for (std::size_t r = 0; r < train_idx.size(); ++r) {
      train.row(static_cast<Index>(r)) = features.row(static_cast<Index>(train_idx[r]));
      train_labels[r] = data.labels[train_idx[r]];
    }
    Eigen::MatrixXd test(static_cast<Index>(folds[f].size()), features.cols());
    std::vector<int> truth(folds[f].size());
    for (std::size_t r = 0; r < folds[f].size(); ++r) {
      test.row(static_cast<Index>(r)) = features.row(static_cast<Index>(folds[f][r]));
      truth[r] = data.labels[folds[f][r]];
    }
    report.fold_accuracies[f] =
        accuracy_percent(knn_classify(train, train_labels, test, cv.knn_k), truth);
  });
  report.classification_seconds = seconds_since(t0);
  report.mean_accuracy =
      std::accumulate(report.fold_accuracies.begin(), report.fold_accuracies.end(), 0.0) /
      static_cast<double>(report.fold_accuracies.size());
  return report;
}

std::string report_json(const CVReport& r) {
  nlohmann::json cfg = {
      {"method", to_string(r.cfg.method)},
      {"dim", r.cfg.dim},
      {"neighbors", r.cfg.neighbors},
      {"kernel", to_string(r.cfg.kernel)},
      {"rbf_c", r.cfg.rbf_c},
      {"weights", to_string(r.cfg.weights)},
      {"degree", to_string(r.cfg.degree)},
      {"gram", to_string(r.cfg.gram)},
      {"weight_domain", to_string(r.cfg.weight_domain)},
      {"lle_reg", r.cfg.lle_reg},
      {"kpca_scale", r.cfg.kpca_scale},
      {"seed", r.cfg.seed},
  };
  cfg["sigma"] = r.cfg.sigma ? nlohmann::json(*r.cfg.sigma) : nlohmann::json("median");
  nlohmann::json j = {
      {"dataset", r.dataset},
      {"dims", {r.dims.m, r.dims.n, r.dims.p}},
      {"config", cfg},
      {"cv", {{"folds", r.cv.folds}, {"knn_k", r.cv.knn_k}, {"seed", r.cv.seed}}},
      {"fold_accuracies", r.fold_accuracies},
      {"mean_accuracy", r.mean_accuracy},
      {"timings", {{"reduction_seconds", r.reduction_seconds},
                   {"classification_seconds", r.classification_seconds}}},
      {"diagnostics", {{"objective", r.diagnostics.objective},
                       {"sigma", r.diagnostics.sigma},
                       {"imag_residue", r.diagnostics.imag_residue},
                       {"constraint_residual", r.diagnostics.constraint_residual}}},
  };
  return j.dump(2);
}

}  // namespace tdr
