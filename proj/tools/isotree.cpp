#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "isotree/isotree.hpp"

namespace {

struct CommonFlags {
  std::string input;
  bool header = false;
  std::string label_column;
  std::size_t k = 2;
  std::string scaling = "global";
  double sigma = 1.0;
  std::size_t nu = 7;
  std::string exponent = "linear";
  bool self_tuning = false;
  std::string normalize = "none";
  bool no_postprocess = false;
  int quant_bits = isotree::Quantizer::kDefaultBits;
  std::optional<std::size_t> root;
  std::uint64_t seed = 0;
  bool recompute_weights = false;
  std::string output;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--input,-i", f.input, "CSV file, one point per row")->required();
  cmd->add_flag("--header", f.header, "first row is a header");
  cmd->add_option("--label-column", f.label_column, "column (name or 0-based index) holding class labels; excluded from features");
  cmd->add_option("--k", f.k, "number of parts")->required();
  cmd->add_option("--scaling", f.scaling, "affinity graph: global (complete) or local (nu-NN)")
      ->check(CLI::IsMember({"global", "local"}));
  cmd->add_option("--sigma", f.sigma, "kernel scale")->check(CLI::PositiveNumber);
  cmd->add_option("--nu", f.nu, "neighbours per point in local scaling");
  cmd->add_option("--exponent", f.exponent, "linear: exp(-d/s), half: exp(-d/2s^2), gaussian: exp(-d^2/2s^2)")
      ->check(CLI::IsMember({"linear", "half", "gaussian"}));
  cmd->add_flag("--self-tuning", f.self_tuning, "local scaling with per-point scales");
  cmd->add_option("--normalize", f.normalize, "feature preprocessing: none or minmax")
      ->check(CLI::IsMember({"none", "minmax"}));
  cmd->add_flag("--no-postprocess", f.no_postprocess, "skip residue reduction");
  cmd->add_option("--quant-bits", f.quant_bits, "flows, weights and potentials are multiples of 2^-bits")
      ->check(CLI::Range(0, 52));
  cmd->add_option("--root", f.root, "root vertex of the spanning tree (default: largest weight)");
  cmd->add_option("--seed", f.seed, "accepted for reproducible scripts; every step is deterministic");
  cmd->add_flag("--recompute-weights", f.recompute_weights, "vertex weights from tree edges instead of the affinity graph");
  cmd->add_option("--output,-o", f.output, "output file (default: standard output)");
}

isotree::Kernel parse_kernel(const std::string& name) {
  if (name == "half") return isotree::Kernel::distance_over_two_sigma_squared;
  if (name == "gaussian") return isotree::Kernel::squared_distance;
  return isotree::Kernel::distance_over_sigma;
}

void fill_pipeline(const CommonFlags& f, isotree::PipelineConfig& config) {
  config.k = f.k;
  config.scaling.mode = f.scaling == "local" ? isotree::ScalingMode::local : isotree::ScalingMode::global;
  config.scaling.sigma = f.sigma;
  config.scaling.nu = f.nu;
  config.scaling.kernel = parse_kernel(f.exponent);
  config.scaling.self_tuning = f.self_tuning;
  config.normalization = f.normalize == "minmax" ? isotree::Normalization::min_max : isotree::Normalization::none;
  config.quant_bits = f.quant_bits;
  config.root = f.root;
  config.recompute_weights = f.recompute_weights;
  config.postprocess = !f.no_postprocess;
}

isotree::DataSet load(const CommonFlags& f) {
  isotree::io::CsvOptions options;
  options.has_header = f.header;
  if (!f.label_column.empty()) options.label_column = f.label_column;
  return isotree::io::read_dataset(f.input, options);
}

template <class Write>
void emit(const std::string& path, Write&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-isoperimetry clustering of point sets via spanning trees"};
  app.require_subcommand(1);

  CommonFlags cluster_flags;
  std::string alpha_text = "0";
  bool complete_labels = false;
  std::string summary_path;
  auto* cluster = app.add_subcommand("cluster", "cluster a dataset; writes index,cluster labels and a JSON summary");
  add_common(cluster, cluster_flags);
  cluster->add_option("--alpha", alpha_text, "potential scale (decimal or a/b)");
  cluster->add_flag("--complete-labels", complete_labels, "give residue points the label of the nearest part");
  cluster->add_option("--summary", summary_path, "summary file (default: standard output, or standard error when labels go there)");

  CommonFlags profile_flags;
  double sigma_s = 0.5;
  std::string alpha_max_text;
  std::string epsilon_text = "0.01";
  auto* profile = app.add_subcommand("profile", "residue count as a function of alpha, alpha* and the outlier set");
  add_common(profile, profile_flags);
  profile->add_option("--sigma-s", sigma_s, "scale of the interval measure")->check(CLI::PositiveNumber);
  profile->add_option("--alpha-max", alpha_max_text, "upper end of the alpha range (default: found by doubling)");
  profile->add_option("--epsilon", epsilon_text, "breakpoint resolution");

  std::string predicted_path;
  std::string truth_path;
  std::string truth_column = "label";
  auto* eval = app.add_subcommand("eval", "misclassification rate of predicted labels");
  eval->add_option("--predicted", predicted_path, "index,cluster file")->required();
  eval->add_option("--truth", truth_path, "headed CSV with class labels")->required();
  eval->add_option("--truth-column", truth_column, "class column (name or 0-based index)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cluster->parsed()) {
      isotree::ClusterConfig config;
      fill_pipeline(cluster_flags, config);
      config.alpha = isotree::parse_rational(alpha_text);
      config.complete_labels = complete_labels;
      const auto report = isotree::run_cluster(load(cluster_flags), config);
      emit(cluster_flags.output, [&](std::ostream& out) { isotree::io::write_labels(out, report.labels); });
      const std::string summary = isotree::summary_json(report).dump(2) + "\n";
      if (!summary_path.empty()) {
        emit(summary_path, [&](std::ostream& out) { out << summary; });
      } else if (cluster_flags.output.empty() || cluster_flags.output == "-") {
        std::cerr << summary;
      } else {
        std::cout << summary;
      }
    } else if (profile->parsed()) {
      isotree::ProfileConfig config;
      fill_pipeline(profile_flags, config);
      config.sigma_s = sigma_s;
      config.epsilon = isotree::parse_rational(epsilon_text);
      if (!alpha_max_text.empty()) config.alpha_max = isotree::parse_rational(alpha_max_text);
      const auto report = isotree::run_profile(load(profile_flags), config);
      emit(profile_flags.output, [&](std::ostream& out) { out << isotree::profile_json(report).dump(2) << '\n'; });
    } else if (eval->parsed()) {
      const auto predicted = isotree::io::read_labels(predicted_path);
      const auto truth = isotree::io::read_column(truth_path, truth_column);
      const double rate = isotree::misclassification_rate(predicted, truth);
      std::size_t residue = 0;
      for (int label : predicted) residue += label < 0 ? 1 : 0;
      std::cout << std::fixed << std::setprecision(6) << "misclassification " << rate << "\n"
                << "points " << predicted.size() << "\nresidue " << residue << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
