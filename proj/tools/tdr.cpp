// tdr: reduce, evaluate and generate third-order tensor datasets.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tdr/error.hpp"
#include "tdr/methods.hpp"
#include "tdr/pipeline.hpp"

namespace {

struct ReduceArgs {
  std::string method = "mpca";
  std::size_t dim = 2;
  std::size_t neighbors = 5;
  std::string sigma = "median";
  std::string kernel = "gaussian";
  double c = 1.0;
  std::string degree = "rowsum";
  std::string gram = "shared";
  std::string weights = "lle";
  std::string weight_domain = "fourier";
  double lle_reg = tdr::kDefaultLleReg;
  bool kpca_scale = false;
  std::uint64_t seed = 0;
};

void add_reduce_options(CLI::App* cmd, ReduceArgs& a) {
  cmd->add_option("--method", a.method, "mpca|monpp|mkpca|mkonpp|mlle|mle")->required();
  cmd->add_option("--dim", a.dim, "target dimension d")->required();
  cmd->add_option("--neighbors", a.neighbors, "neighbors per sample");
  cmd->add_option("--sigma", a.sigma, "bandwidth, or 'median'");
  cmd->add_option("--kernel", a.kernel, "gaussian|rbf|linear");
  cmd->add_option("--c", a.c, "rbf kernel parameter");
  cmd->add_option("--degree", a.degree, "rowsum|paper");
  cmd->add_option("--gram", a.gram, "shared|per-slice");
  cmd->add_option("--weights", a.weights, "lle|gaussian (monpp)");
  cmd->add_option("--weight-domain", a.weight_domain, "fourier|original");
  cmd->add_option("--lle-reg", a.lle_reg, "local Gram regularization");
  cmd->add_flag("--kpca-scale", a.kpca_scale, "scale mkpca rows by sqrt(eigenvalue)");
}

tdr::ReductionConfig to_config(const ReduceArgs& a) {
  tdr::ReductionConfig cfg;
  cfg.method = tdr::parse_method(a.method);
  cfg.dim = a.dim;
  cfg.neighbors = a.neighbors;
  if (a.sigma != "median") {
    try {
      std::size_t used = 0;
      cfg.sigma = std::stod(a.sigma, &used);
      if (used != a.sigma.size()) throw std::invalid_argument(a.sigma);
    } catch (const std::exception&) {
      tdr::fail(tdr::ErrorCode::InvalidConfig, "--sigma must be a number or 'median'");
    }
  }
  cfg.kernel = tdr::parse_kernel(a.kernel);
  cfg.rbf_c = a.c;
  cfg.degree = tdr::parse_degree_mode(a.degree);
  cfg.gram = tdr::parse_gram_mode(a.gram);
  cfg.weights = tdr::parse_weights(a.weights);
  cfg.weight_domain = tdr::parse_weight_domain(a.weight_domain);
  cfg.lle_reg = a.lle_reg;
  cfg.kpca_scale = a.kpca_scale;
  cfg.seed = a.seed;
  return cfg;
}

int exit_code(const tdr::Error& e) {
  switch (tdr::category(e.code())) {
    case tdr::ErrorCategory::Usage: return 2;
    case tdr::ErrorCategory::Data: return 3;
    case tdr::ErrorCategory::Numerical: return 4;
  }
  return 1;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) tdr::fail(tdr::ErrorCode::IoError, "cannot open " + path + " for writing");
  out << text << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor dimensionality reduction"};
  app.require_subcommand(1);

  ReduceArgs reduce_args;
  std::string input, output;
  auto* reduce = app.add_subcommand("reduce", "reduce a tensor and write the embedding");
  add_reduce_options(reduce, reduce_args);
  reduce->add_option("--input", input, "input T3F1 tensor")->required();
  reduce->add_option("--output", output, "output T3F1 embedding")->required();

  ReduceArgs eval_args;
  std::string eval_input, labels, report = "-";
  tdr::CVConfig cv;
  auto* eval = app.add_subcommand("eval", "cross-validate KNN on a reduced tensor");
  add_reduce_options(eval, eval_args);
  eval->add_option("--input", eval_input, "input T3F1 tensor")->required();
  eval->add_option("--labels", labels, "labels file")->required();
  eval->add_option("--folds", cv.folds, "number of folds");
  eval->add_option("--knn-k", cv.knn_k, "KNN neighbors");
  eval->add_option("--seed", cv.seed, "fold shuffling seed");
  eval->add_option("--report", report, "JSON report path ('-' for stdout)");

  ReduceArgs sweep_args;
  std::string sweep_input, sweep_labels, csv = "-";
  std::vector<std::size_t> dims;
  tdr::CVConfig sweep_cv;
  auto* sweep = app.add_subcommand("sweep", "mean accuracy over several target dimensions (CSV)");
  add_reduce_options(sweep, sweep_args);
  sweep->get_option("--dim")->required(false);
  sweep->add_option("--dims", dims, "target dimensions (space or comma separated)")->required()->delimiter(',');
  sweep->add_option("--input", sweep_input, "input T3F1 tensor")->required();
  sweep->add_option("--labels", sweep_labels, "labels file")->required();
  sweep->add_option("--folds", sweep_cv.folds, "number of folds");
  sweep->add_option("--knn-k", sweep_cv.knn_k, "KNN neighbors");
  sweep->add_option("--seed", sweep_cv.seed, "fold shuffling seed");
  sweep->add_option("--csv", csv, "CSV output path ('-' for stdout)");

  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic dataset");
  synth->require_subcommand(1);
  std::string synth_out, synth_labels;
  std::uint64_t synth_seed = 0;
  std::size_t classes = 4, per_class = 50, m = 20, p = 2;
  double spread = 0.5;
  auto* blobs = synth->add_subcommand("blobs", "Gaussian clusters");
  blobs->add_option("--classes", classes);
  blobs->add_option("--per-class", per_class);
  blobs->add_option("--m", m);
  blobs->add_option("--p", p);
  blobs->add_option("--spread", spread);
  std::size_t per_ring = 100, ring_p = 2;
  double noise = 0.05;
  auto* rings = synth->add_subcommand("rings", "two concentric rings with nuisance coordinates");
  rings->add_option("--per-ring", per_ring);
  rings->add_option("--noise", noise);
  rings->add_option("--p", ring_p);
  for (auto* cmd : {blobs, rings}) {
    cmd->add_option("--seed", synth_seed);
    cmd->add_option("--output", synth_out, "output T3F1 tensor")->required();
    cmd->add_option("--labels", synth_labels, "output labels file")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*reduce) {
      const auto cfg = to_config(reduce_args);
      const auto out = tdr::reduce(tdr::read_t3f1(input), cfg);
      tdr::save_tensor(out.y, output);
      std::cerr << "objective " << out.diagnostics.objective << ", " << out.diagnostics.seconds
                << " s\n";
    } else if (*eval) {
      eval_args.seed = cv.seed;
      const auto cfg = to_config(eval_args);
      const auto data = tdr::load_dataset(eval_input, labels);
      write_text(tdr::report_json(tdr::run_experiment(data, cfg, cv)), report);
    } else if (*sweep) {
      sweep_args.seed = sweep_cv.seed;
      auto cfg = to_config(sweep_args);
      const auto data = tdr::load_dataset(sweep_input, sweep_labels);
      std::string text = "dim,mean_accuracy,reduction_seconds";
      for (std::size_t d : dims) {
        cfg.dim = d;
        const auto r = tdr::run_experiment(data, cfg, sweep_cv);
        text += "\n" + std::to_string(d) + "," + std::to_string(r.mean_accuracy) + "," +
                std::to_string(r.reduction_seconds);
      }
      write_text(text, csv);
    } else if (*blobs || *rings) {
      const auto data = *blobs ? tdr::synth_blobs(classes, per_class, m, p, spread, synth_seed)
                               : tdr::synth_rings(per_ring, noise, ring_p, synth_seed);
      tdr::save_tensor(data.x, synth_out);
      tdr::write_labels(data.labels, synth_labels);
    }
  } catch (const tdr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
