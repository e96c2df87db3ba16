#include "fedshot/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fedshot/error.hpp"

namespace fedshot {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_double(const std::string& v, const std::string& key) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(x)) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
  return x;
}

std::size_t to_size(const std::string& v, const std::string& key) {
  const double x = to_double(v, key);
  if (x < 0 || x != std::floor(x)) {
    throw ConfigError("config: key '" + key + "' expects a nonnegative integer, got '" + v + "'");
  }
  return static_cast<std::size_t>(x);
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
  const char* begin = v.c_str();
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE || v[0] == '-') {
    throw ConfigError("config: key '" + key + "' expects an unsigned integer, got '" +
                      v + "'");
  }
  return static_cast<std::uint64_t>(x);
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }

    if (key == "dataset") cfg.dataset = value;
    else if (key == "csv_path") cfg.csv_path = value;
    else if (key == "synth_devices") cfg.synth_devices = to_size(value, key);
    else if (key == "synth_dim") cfg.synth_dim = to_size(value, key);
    else if (key == "synth_size_min") cfg.synth_size_min = to_size(value, key);
    else if (key == "synth_size_max") cfg.synth_size_max = to_size(value, key);
    else if (key == "synth_heterogeneity") cfg.synth_heterogeneity = to_double(value, key);
    else if (key == "split_train") cfg.split_train = to_double(value, key);
    else if (key == "split_test") cfg.split_test = to_double(value, key);
    else if (key == "split_validation") cfg.split_validation = to_double(value, key);
    else if (key == "min_samples") cfg.min_samples = to_size(value, key);
    else if (key == "lambda") {
      if (value == "auto") cfg.lambda = 0.0;
      else {
        cfg.lambda = to_double(value, key);
        if (!(cfg.lambda > 0.0)) {
          throw ConfigError("config: lambda must be positive or 'auto'");
        }
      }
    }
    else if (key == "gamma") cfg.gamma = value;
    else if (key == "tol") cfg.tol = to_double(value, key);
    else if (key == "max_epochs") cfg.max_epochs = to_size(value, key);
    else if (key == "policies") cfg.policies = to_list(value);
    else if (key == "k_grid") {
      cfg.k_grid.clear();
      for (const auto& item : to_list(value)) cfg.k_grid.push_back(to_size(item, key));
    } else if (key == "cv_baseline_auc") cfg.cv_baseline_auc = to_double(value, key);
    else if (key == "data_baseline_n") cfg.data_baseline_n = to_size(value, key);
    else if (key == "random_trials") cfg.random_trials = to_size(value, key);
    else if (key == "aggregation") cfg.aggregation = value;
    else if (key == "proxy_sizes") {
      cfg.proxy_sizes.clear();
      for (const auto& item : to_list(value)) cfg.proxy_sizes.push_back(to_size(item, key));
    } else if (key == "ridge") cfg.ridge = to_double(value, key);
    else if (key == "seed") cfg.seed = to_u64(value, key);
    else if (key == "ideal_pool_cap") cfg.ideal_pool_cap = to_size(value, key);
    else if (key == "threads") cfg.threads = to_size(value, key);
    else {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }

  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& config) {
  if (config.dataset != "synthetic" && config.dataset != "csv") {
    throw ConfigError("config: dataset must be 'synthetic' or 'csv'");
  }
  if (config.dataset == "csv" && config.csv_path.empty()) {
    throw ConfigError("config: csv dataset requires csv_path");
  }
  if (config.dataset == "synthetic") {
    if (config.synth_devices < 1) throw ConfigError("config: synth_devices must be >= 1");
    if (config.synth_dim < 2) throw ConfigError("config: synth_dim must be >= 2");
    if (config.synth_size_min < 1 || config.synth_size_min > config.synth_size_max) {
      throw ConfigError("config: invalid synth size range");
    }
    if (config.synth_heterogeneity < 0.0 || config.synth_heterogeneity > 1.0) {
      throw ConfigError("config: synth_heterogeneity must lie in [0,1]");
    }
  }
  if (!(config.split_train > 0.0) || !(config.split_test > 0.0) ||
      !(config.split_validation > 0.0)) {
    throw ConfigError("config: split ratios must be positive");
  }
  if (std::abs(config.split_train + config.split_test + config.split_validation - 1.0) > 1e-9) {
    throw ConfigError("config: split ratios must sum to 1");
  }
  if (config.gamma != "median-heuristic") {
    const double g = to_double(config.gamma, "gamma");
    if (!(g > 0.0)) throw ConfigError("config: gamma must be positive");
  }
  if (!(config.tol > 0.0)) throw ConfigError("config: tol must be positive");
  if (config.max_epochs < 1) throw ConfigError("config: max_epochs must be >= 1");
  if (config.policies.empty()) throw ConfigError("config: policies must be nonempty");
  std::set<std::string> policy_names;
  for (const auto& p : config.policies) {
    if (p != "CV" && p != "Data" && p != "Random" && p != "Full") {
      throw ConfigError("config: unknown policy '" + p + "'");
    }
    if (!policy_names.insert(p).second) {
      throw ConfigError("config: duplicate policy '" + p + "'");
    }
  }
  if (config.k_grid.empty()) throw ConfigError("config: k_grid must be nonempty");
  std::set<std::size_t> k_values;
  for (std::size_t k : config.k_grid) {
    if (k < 1) throw ConfigError("config: k_grid entries must be >= 1");
    if (!k_values.insert(k).second) {
      throw ConfigError("config: duplicate k_grid entry " + std::to_string(k));
    }
  }
  if (config.cv_baseline_auc < 0.0 || config.cv_baseline_auc > 1.0) {
    throw ConfigError("config: cv_baseline_auc must lie in [0,1]");
  }
  if (config.random_trials < 1) throw ConfigError("config: random_trials must be >= 1");
  if (config.aggregation != "mean-decision" && config.aggregation != "mean-sign") {
    throw ConfigError("config: aggregation must be 'mean-decision' or 'mean-sign'");
  }
  if (config.proxy_sizes.empty()) throw ConfigError("config: proxy_sizes must be nonempty");
  for (std::size_t l : config.proxy_sizes) {
    if (l < 1) throw ConfigError("config: proxy_sizes entries must be >= 1");
  }
  if (config.ridge < 0.0) throw ConfigError("config: ridge must be nonnegative");
}

std::string config_to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "dataset = " << c.dataset << "\n";
  if (!c.csv_path.empty()) out << "csv_path = " << c.csv_path << "\n";
  out << "synth_devices = " << c.synth_devices << "\n";
  out << "synth_dim = " << c.synth_dim << "\n";
  out << "synth_size_min = " << c.synth_size_min << "\n";
  out << "synth_size_max = " << c.synth_size_max << "\n";
  out << "synth_heterogeneity = " << format17(c.synth_heterogeneity) << "\n";
  out << "split_train = " << format17(c.split_train) << "\n";
  out << "split_test = " << format17(c.split_test) << "\n";
  out << "split_validation = " << format17(c.split_validation) << "\n";
  out << "min_samples = " << c.min_samples << "\n";
  if (c.lambda > 0.0) out << "lambda = " << format17(c.lambda) << "\n";
  else out << "lambda = auto\n";
  out << "gamma = " << c.gamma << "\n";
  out << "tol = " << format17(c.tol) << "\n";
  out << "max_epochs = " << c.max_epochs << "\n";
  out << "policies = ";
  for (std::size_t i = 0; i < c.policies.size(); ++i) {
    out << (i ? "," : "") << c.policies[i];
  }
  out << "\nk_grid = ";
  for (std::size_t i = 0; i < c.k_grid.size(); ++i) out << (i ? "," : "") << c.k_grid[i];
  out << "\ncv_baseline_auc = " << format17(c.cv_baseline_auc) << "\n";
  out << "data_baseline_n = " << c.data_baseline_n << "\n";
  out << "random_trials = " << c.random_trials << "\n";
  out << "aggregation = " << c.aggregation << "\n";
  out << "proxy_sizes = ";
  for (std::size_t i = 0; i < c.proxy_sizes.size(); ++i) {
    out << (i ? "," : "") << c.proxy_sizes[i];
  }
  out << "\nridge = " << format17(c.ridge) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "ideal_pool_cap = " << c.ideal_pool_cap << "\n";
  out << "threads = " << c.threads << "\n";
  return out.str();
}

}  // namespace fedshot
