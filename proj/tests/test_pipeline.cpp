#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "tdr/error.hpp"
#include "tdr/pipeline.hpp"

using namespace tdr;
namespace fs = std::filesystem;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidConfig;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "tdr_pipeline_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

Eigen::MatrixXd column(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(Eigen::Index(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

// Brute-force vote with the same tie rules.
int vote(const Eigen::MatrixXd& train, const std::vector<int>& labels, const Eigen::RowVectorXd& q, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (Eigen::Index i = 0; i < train.rows(); ++i) d.emplace_back((train.row(i) - q).norm(), std::size_t(i));
  std::stable_sort(d.begin(), d.end(), [](auto& a, auto& b) { return a.first < b.first; });
  std::map<int, std::pair<int, double>> tally;
  for (std::size_t j = 0; j < k; ++j) {
    auto& t = tally[labels[d[j].second]];
    t.first += 1;
    t.second += d[j].first;
  }
  int best = 0, best_count = -1;
  double best_mean = 0;
  for (const auto& [label, t] : tally) {
    const double mean = t.second / t.first;
    if (t.first > best_count || (t.first == best_count && mean < best_mean)) {
      best = label;
      best_count = t.first;
      best_mean = mean;
    }
  }
  return best;
}

ReductionConfig mpca_config(std::size_t d) {
  ReductionConfig c;
  c.method = Method::Mpca;
  c.dim = d;
  return c;
}

}  // namespace

TEST_CASE("tensor and label files round trip") {
  std::mt19937_64 rng(61);
  const auto x = oracle::random_tensor(3, 5, 2, rng);
  const auto tp = scratch("x.t3f1"), lp = scratch("x.labels");
  save_tensor(x, tp.string());
  write_labels({0, 1, 2, 1, 0}, lp.string());
  const auto d = load_dataset(tp.string(), lp.string());
  CHECK(d.x.dims() == x.dims());
  CHECK(oracle::max_abs(d.x, x) == 0.0);
  CHECK(d.labels == std::vector<int>{0, 1, 2, 1, 0});

  write_text(lp, " 3\n-1 \n7\n\n\n");
  CHECK(read_labels(lp.string()) == std::vector<int>{3, -1, 7});

  write_text(lp, "1\n2\n");
  CHECK(code_of([&] { load_dataset(tp.string(), lp.string()); }) == ErrorCode::LabelCountMismatch);
  write_text(lp, "1\nx\n");
  CHECK(code_of([&] { read_labels(lp.string()); }) == ErrorCode::IoError);
  write_text(lp, "1\n\n2\n");
  CHECK(code_of([&] { read_labels(lp.string()); }) == ErrorCode::IoError);
  CHECK(code_of([&] { read_labels(scratch("missing.labels").string()); }) == ErrorCode::IoError);

  write_text(tp, "NOPE0000000000000000000000000000");
  CHECK(code_of([&] { load_dataset(tp.string(), lp.string()); }) == ErrorCode::BadMagic);
}

TEST_CASE("synth_blobs") {
  const auto a = synth_blobs(3, 4, 5, 2, 0.5, 9);
  const auto b = synth_blobs(3, 4, 5, 2, 0.5, 9);
  CHECK(a.x.dims() == Dims{5, 12, 2});
  CHECK(oracle::max_abs(a.x, b.x) == 0.0);
  CHECK(a.labels == std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2});
  CHECK(oracle::max_abs(a.x, synth_blobs(3, 4, 5, 2, 0.5, 10).x) > 0.0);

  // Zero spread puts every sample on its class center.
  const auto c = synth_blobs(2, 3, 4, 2, 0.0, 9);
  for (std::size_t j = 0; j < 6; ++j)
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t i = 0; i < 4; ++i) CHECK(c.x(i, j, k) == c.x(i, j < 3 ? 0 : 3, k));
}

TEST_CASE("synth_rings without noise") {
  const auto r = synth_rings(25, 0.0, 3, 12);
  CHECK(r.x.dims() == Dims{4, 50, 3});
  std::size_t inner = 0;
  for (std::size_t j = 0; j < 50; ++j) {
    const double want = r.labels[j] == 0 ? 0.2 : 1.0;
    inner += r.labels[j] == 0;
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(std::hypot(r.x(0, j, k), r.x(1, j, k)) == doctest::Approx(want));
      CHECK(r.x(2, j, k) == r.x(2, j, 0));
      CHECK(r.x(3, j, k) == r.x(3, j, 0));
    }
  }
  CHECK(inner == 25);

  RingOptions none;
  none.outlier_fraction = 0.0;
  const auto q = synth_rings(200, 0.0, 1, 13, none);
  double worst = 0;
  for (std::size_t j = 0; j < 400; ++j) worst = std::max({worst, std::abs(q.x(2, j, 0)), std::abs(q.x(3, j, 0))});
  CHECK(worst < 1.0);
}

TEST_CASE("flatten_embedding") {
  Tensor3 y(2, 2, 2);
  double v = 1;
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 2; ++i) y(i, j, k) = v++;
  const auto f = flatten_embedding(y);
  Eigen::MatrixXd want(2, 4);
  want << 1, 2, 5, 6, 3, 4, 7, 8;
  CHECK(f == want);
}

TEST_CASE("knn_classify examples and tie rules") {
  const auto train = column({0.0, 1.0, 10.0});
  const std::vector<int> labels{0, 0, 1};
  CHECK(knn_classify(train, labels, column({0.4, 9.0}), 1) == std::vector<int>{0, 1});
  CHECK(knn_classify(train, labels, column({9.0}), 3) == std::vector<int>{0});

  // Equal votes: smaller mean distance wins.
  CHECK(knn_classify(column({4.0, 7.0}), {1, 2}, column({5.0}), 2) == std::vector<int>{1});
  // Equal votes and distances: lower label.
  CHECK(knn_classify(column({4.0, 6.0}), {2, 1}, column({5.0}), 2) == std::vector<int>{1});
  // Distance tie for the last slot: lower training index.
  CHECK(knn_classify(column({4.0, 6.0}), {2, 1}, column({5.0}), 1) == std::vector<int>{2});

  CHECK(code_of([] { knn_classify(Eigen::MatrixXd(0, 1), {}, column({1.0}), 1); }) == ErrorCode::EmptyTrainSet);
  CHECK(code_of([&] { knn_classify(train, labels, column({1.0}), 4); }) == ErrorCode::KOutOfRange);
  CHECK(code_of([&] { knn_classify(train, {0, 1}, column({1.0}), 1); }) == ErrorCode::LabelCountMismatch);
  CHECK(code_of([&] { knn_classify(train, labels, Eigen::MatrixXd::Zero(1, 2), 1); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("knn_classify matches a brute-force vote") {
  std::mt19937_64 rng(62);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, 3);
  Eigen::MatrixXd train(40, 3), test(25, 3);
  for (Eigen::Index i = 0; i < train.size(); ++i) train(i) = g(rng);
  for (Eigen::Index i = 0; i < test.size(); ++i) test(i) = g(rng);
  std::vector<int> labels(40);
  for (int& l : labels) l = lab(rng);
  for (std::size_t k : {1, 2, 4, 7}) {
    const auto got = knn_classify(train, labels, test, k);
    for (Eigen::Index q = 0; q < 25; ++q) CHECK(got[std::size_t(q)] == vote(train, labels, test.row(q), k));
  }
}

TEST_CASE("stratified_kfold") {
  const std::vector<int> labels{0, 0, 0, 0, 1, 1, 1, 1};
  const auto f = stratified_kfold(labels, 2, 3);
  REQUIRE(f.size() == 2);
  for (const auto& fold : f) {
    CHECK(fold.size() == 4);
    CHECK(std::is_sorted(fold.begin(), fold.end()));
    CHECK(std::count_if(fold.begin(), fold.end(), [&](std::size_t j) { return labels[j] == 0; }) == 2);
  }
  CHECK(stratified_kfold(labels, 2, 3) == f);

  std::vector<int> big;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 11 + 3 * c; ++i) big.push_back(c);
  const auto g = stratified_kfold(big, 5, 4);
  std::vector<int> seen(big.size(), 0);
  std::size_t smallest = big.size(), largest = 0;
  for (const auto& fold : g) {
    for (std::size_t j : fold) ++seen[j];
    smallest = std::min(smallest, fold.size());
    largest = std::max(largest, fold.size());
    for (int c = 0; c < 3; ++c) {
      const auto in_fold = std::count_if(fold.begin(), fold.end(), [&](std::size_t j) { return big[j] == c; });
      const auto total = std::count(big.begin(), big.end(), c);
      CHECK(std::abs(double(in_fold) - double(total) / 5.0) < 1.0);
    }
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  CHECK(largest - smallest <= 1);

  CHECK(code_of([&] { stratified_kfold(labels, 1, 0); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { stratified_kfold({0, 0, 0, 1}, 2, 0); }) == ErrorCode::ClassTooSmall);
}

TEST_CASE("accuracy_percent") {
  CHECK(accuracy_percent({1, 2, 3, 4}, {1, 2, 3, 0}) == 75.0);
  CHECK(code_of([] { accuracy_percent({1}, {1, 2}); }) == ErrorCode::LabelCountMismatch);
}

TEST_CASE("run_experiment on separable blobs") {
  const auto data = synth_blobs(3, 20, 10, 2, 0.5, 63);
  const CVConfig cv{5, 3, 63};
  const auto r = run_experiment(data, mpca_config(3), cv);
  CHECK(r.fold_accuracies.size() == 5);
  CHECK(r.mean_accuracy == 100.0);
  const auto again = run_experiment(data, mpca_config(3), cv);
  CHECK(again.fold_accuracies == r.fold_accuracies);
}

TEST_CASE("run_experiment on shuffled labels is near chance") {
  auto data = synth_blobs(4, 30, 10, 2, 0.5, 64);
  std::mt19937_64 rng(64);
  std::shuffle(data.labels.begin(), data.labels.end(), rng);
  const auto r = run_experiment(data, mpca_config(3), CVConfig{5, 3, 64});
  CHECK(r.mean_accuracy > 10.0);
  CHECK(r.mean_accuracy < 40.0);

  data.labels.assign(data.labels.size(), 1);
  CHECK(code_of([&] { run_experiment(data, mpca_config(3), CVConfig{}); }) == ErrorCode::InvalidConfig);
  data.labels.pop_back();
  CHECK(code_of([&] { run_experiment(data, mpca_config(3), CVConfig{}); }) == ErrorCode::LabelCountMismatch);
}

TEST_CASE("report_json") {
  auto data = synth_blobs(2, 10, 4, 2, 4.0, 65);
  data.name = "blobs";
  ReductionConfig cfg;
  cfg.method = Method::Mle;
  cfg.dim = 1;
  cfg.neighbors = 19;
  const auto r = run_experiment(data, cfg, CVConfig{2, 1, 65});
  const auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["config"]["method"] == "mle");
  CHECK(j["config"]["dim"] == 1);
  CHECK(j["config"]["sigma"] == "median");
  CHECK(j["cv"]["folds"] == 2);
  CHECK(j["dataset"] == "blobs");
  CHECK(j["fold_accuracies"].size() == 2);
  CHECK(j["mean_accuracy"].get<double>() == doctest::Approx(r.mean_accuracy));
  CHECK(j["diagnostics"]["sigma"].get<double>() > 0.0);
  CHECK(j.contains("timings"));

  cfg.sigma = 25.0;
  const auto fixed = nlohmann::json::parse(report_json(run_experiment(data, cfg, CVConfig{2, 1, 65})));
  CHECK(fixed["config"]["sigma"].get<double>() == 25.0);
}
