#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fedshot {

// Full experiment configuration. The on-disk format is a flat key = value
// document whose keys match these field names exactly; '#' starts a comment.
// List-valued fields are comma separated.
struct ExperimentConfig {
  // Dataset source: "synthetic" or "csv".
  std::string dataset = "synthetic";
  std::string csv_path;
  std::size_t synth_devices = 40;
  std::size_t synth_dim = 10;
  std::size_t synth_size_min = 20;
  std::size_t synth_size_max = 120;
  double synth_heterogeneity = 0.7;

  // Protocol.
  double split_train = 0.5;
  double split_test = 0.4;
  double split_validation = 0.1;
  std::size_t min_samples = 30;
  double lambda = 0.0;  // <= 0 ("auto"): per-device 1/n_train
  std::string gamma = "median-heuristic";  // or a positive literal
  double tol = 1e-6;
  std::size_t max_epochs = 1000;

  // Server policies.
  std::vector<std::string> policies = {"CV", "Data", "Random", "Full"};
  std::vector<std::size_t> k_grid = {1, 10, 50, 100};
  double cv_baseline_auc = 0.5;
  std::size_t data_baseline_n = 0;  // 0: defaults to min_samples
  std::size_t random_trials = 5;
  std::string aggregation = "mean-decision";

  // Distillation.
  std::vector<std::size_t> proxy_sizes = {10, 25, 50, 100, 200};
  double ridge = 1e-8;

  // Reproducibility and scale.
  std::uint64_t seed = 1;
  std::size_t ideal_pool_cap = 0;  // 0: unlimited
  std::size_t threads = 0;         // 0: hardware default

  std::size_t effective_data_baseline() const {
    return data_baseline_n > 0 ? data_baseline_n : min_samples;
  }
};

// Parses and validates; throws ConfigError with the offending key or line.
ExperimentConfig parse_config_file(const std::string& path);

// Invariant checks shared by the parser and programmatic configs.
void validate_config(const ExperimentConfig& config);

// Serializes back to the flat key = value format (one key per line).
std::string config_to_text(const ExperimentConfig& config);

}  // namespace fedshot
