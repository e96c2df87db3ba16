// Exercises the shared-library surface only (fedshot.h, no core headers).
#include <cassert>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "fedshot/fedshot.h"

namespace {

int g_failures = 0;

void expect(bool ok, const char* what) {
  if (!ok) {
    std::fprintf(stderr, "FAILED: %s (last error: %s)\n", what, fedshot_last_error());
    ++g_failures;
  }
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

int main() {
  expect(std::strlen(fedshot_version()) > 0, "version string");

  // Config loading and validation.
  const auto good = temp_path("capi_good.cfg");
  write_text(good,
             "dataset = synthetic\n"
             "synth_devices = 8\n"
             "synth_dim = 3\n"
             "synth_size_min = 10\n"
             "synth_size_max = 40\n"
             "min_samples = 10\n"
             "k_grid = 1,3\n"
             "random_trials = 2\n"
             "proxy_sizes = 5,8\n"
             "max_epochs = 150\n"
             "seed = 9\n");
  expect(fedshot_config_validate_file(good.c_str()) == FEDSHOT_OK, "validate good config");

  const auto bad = temp_path("capi_bad.cfg");
  write_text(bad, "dataset = synthetic\nwat = 1\n");
  expect(fedshot_config_validate_file(bad.c_str()) == FEDSHOT_ERR_CONFIG,
         "validate bad config returns the config status");
  expect(std::strstr(fedshot_last_error(), "unknown key") != nullptr,
         "bad config error message");

  expect(fedshot_config_validate_file("/nonexistent.cfg") == FEDSHOT_ERR_CONFIG,
         "missing config file is a config error");

  // A csv config pointing at a missing dataset fails at run time with the
  // config status and names the path.
  const auto missing_data = temp_path("capi_missing_data.cfg");
  write_text(missing_data, "dataset = csv\ncsv_path = /no/such/data.csv\n");
  fedshot_config* cfg = nullptr;
  expect(fedshot_config_load(missing_data.c_str(), &cfg) == FEDSHOT_OK,
         "csv config itself parses");
  fedshot_report* report = nullptr;
  expect(fedshot_run(cfg, &report) == FEDSHOT_ERR_CONFIG,
         "missing dataset is a config error");
  expect(std::strstr(fedshot_last_error(), "/no/such/data.csv") != nullptr,
         "missing dataset error names the path");
  fedshot_config_free(cfg);

  // Full run through the API.
  cfg = nullptr;
  expect(fedshot_config_load(good.c_str(), &cfg) == FEDSHOT_OK, "load good config");
  expect(fedshot_config_set_seed(cfg, 11) == FEDSHOT_OK, "seed override");
  report = nullptr;
  expect(fedshot_run(cfg, &report) == FEDSHOT_OK, "run experiment");
  fedshot_config_free(cfg);

  const size_t methods = fedshot_report_method_count(report);
  expect(methods == 9, "method count (2 baselines + 2x3 policy entries + full)");
  expect(std::strcmp(fedshot_report_method_name(report, 0), "local") == 0,
         "first method is the local baseline");
  expect(fedshot_report_method_name(report, methods) == nullptr,
         "out-of-range method name is null");

  double local_auc = 0.0, ideal_auc = 0.0;
  expect(fedshot_report_method_mean_auc(report, 0, &local_auc) == FEDSHOT_OK,
         "local mean auc");
  expect(fedshot_report_method_mean_auc(report, 1, &ideal_auc) == FEDSHOT_OK,
         "ideal mean auc");
  expect(local_auc > 0.0 && local_auc <= 1.0, "local auc in range");
  expect(ideal_auc > 0.0 && ideal_auc <= 1.0, "ideal auc in range");
  expect(fedshot_report_best_method(report) != nullptr &&
             std::strlen(fedshot_report_best_method(report)) > 0,
         "best method name");
  expect(fedshot_report_wall_seconds(report) > 0.0, "wall time populated");

  const auto out_dir = temp_path("capi_report_out");
  std::filesystem::remove_all(out_dir);
  expect(fedshot_report_emit(report, out_dir.c_str()) == FEDSHOT_OK, "emit report");
  expect(std::filesystem::exists(out_dir + "/report.json"), "report.json written");
  expect(std::filesystem::exists(out_dir + "/summary.csv"), "summary.csv written");
  expect(std::filesystem::exists(out_dir + "/device_scores.csv"),
         "device_scores.csv written");
  expect(std::filesystem::exists(out_dir + "/distill_curve.csv"),
         "distill_curve.csv written");
  fedshot_report_free(report);

  // Synthetic export.
  const auto csv = temp_path("capi_synth.csv");
  expect(fedshot_synth_export(4, 3, 0.5, 5, 9, 21, csv.c_str()) == FEDSHOT_OK,
         "synth export");
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  expect(header == "device_id,label,f0,f1,f2", "synth csv header");
  expect(fedshot_synth_export(4, 1, 0.5, 5, 9, 21, csv.c_str()) == FEDSHOT_ERR_CONFIG,
         "synth export rejects dim < 2");

  if (g_failures == 0) {
    std::puts("capi: all checks passed");
    return 0;
  }
  std::fprintf(stderr, "capi: %d check(s) failed\n", g_failures);
  return 1;
}
