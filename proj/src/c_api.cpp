#include "fedshot/fedshot.h"

#include <string>

#include "fedshot/config.hpp"
#include "fedshot/data.hpp"
#include "fedshot/error.hpp"
#include "fedshot/experiment.hpp"
#include "fedshot/report.hpp"
#include "fedshot/rng.hpp"

struct fedshot_config {
  fedshot::ExperimentConfig cfg;
};

struct fedshot_report {
  fedshot::ExperimentReport rep;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
fedshot_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FEDSHOT_OK;
  } catch (const fedshot::ConfigError& e) {
    g_last_error = e.what();
    return FEDSHOT_ERR_CONFIG;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FEDSHOT_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return FEDSHOT_ERR_RUNTIME;
  }
}

fedshot_status invalid_arg(const char* message) {
  g_last_error = message;
  return FEDSHOT_ERR_RUNTIME;
}

}  // namespace

extern "C" {

const char* fedshot_version(void) { return "0.1.0"; }

const char* fedshot_last_error(void) { return g_last_error.c_str(); }

fedshot_status fedshot_config_load(const char* path, fedshot_config** out) {
  if (path == nullptr || out == nullptr) return invalid_arg("null argument");
  return guarded([&] { *out = new fedshot_config{fedshot::parse_config_file(path)}; });
}

fedshot_status fedshot_config_default(fedshot_config** out) {
  if (out == nullptr) return invalid_arg("null argument");
  return guarded([&] { *out = new fedshot_config{}; });
}

fedshot_status fedshot_config_validate_file(const char* path) {
  if (path == nullptr) return invalid_arg("null argument");
  return guarded([&] { fedshot::parse_config_file(path); });
}

fedshot_status fedshot_config_set_seed(fedshot_config* config, uint64_t seed) {
  if (config == nullptr) return invalid_arg("null config");
  config->cfg.seed = seed;
  g_last_error.clear();
  return FEDSHOT_OK;
}

void fedshot_config_free(fedshot_config* config) { delete config; }

fedshot_status fedshot_run(const fedshot_config* config, fedshot_report** out) {
  if (config == nullptr || out == nullptr) return invalid_arg("null argument");
  return guarded([&] {
    *out = new fedshot_report{fedshot::run_experiment(config->cfg)};
  });
}

fedshot_status fedshot_report_emit(const fedshot_report* report,
                                   const char* out_dir) {
  if (report == nullptr || out_dir == nullptr) return invalid_arg("null argument");
  return guarded([&] { fedshot::emit_report(report->rep, out_dir); });
}

size_t fedshot_report_method_count(const fedshot_report* report) {
  return report == nullptr ? 0 : report->rep.methods.size();
}

const char* fedshot_report_method_name(const fedshot_report* report, size_t index) {
  if (report == nullptr || index >= report->rep.methods.size()) return nullptr;
  return report->rep.methods[index].name.c_str();
}

fedshot_status fedshot_report_method_mean_auc(const fedshot_report* report,
                                              size_t index, double* out) {
  if (report == nullptr || out == nullptr) return invalid_arg("null argument");
  if (index >= report->rep.methods.size()) return invalid_arg("method index out of range");
  const auto& method = report->rep.methods[index];
  if (method.failed()) {
    g_last_error = method.error;
    return FEDSHOT_ERR_RUNTIME;
  }
  *out = method.summary.mean_auc;
  g_last_error.clear();
  return FEDSHOT_OK;
}

const char* fedshot_report_best_method(const fedshot_report* report) {
  return report == nullptr ? nullptr : report->rep.best_method.c_str();
}

double fedshot_report_wall_seconds(const fedshot_report* report) {
  return report == nullptr ? 0.0 : report->rep.wall_seconds;
}

void fedshot_report_free(fedshot_report* report) { delete report; }

fedshot_status fedshot_synth_export(uint32_t devices, uint32_t dim,
                                    double heterogeneity, uint32_t n_min,
                                    uint32_t n_max, uint64_t seed,
                                    const char* csv_path) {
  if (csv_path == nullptr) return invalid_arg("null csv_path");
  return guarded([&] {
    fedshot::SynthSpec spec;
    spec.devices = devices;
    spec.dim = dim;
    spec.heterogeneity = heterogeneity;
    spec.n_min = n_min;
    spec.n_max = n_max;
    const auto data = fedshot::synth_federated(spec, fedshot::derive_seed(seed, "synth"));
    fedshot::write_csv(data, csv_path);
  });
}

}  // extern "C"
