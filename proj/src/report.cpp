#include "fedshot/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fedshot {

namespace {

using nlohmann::json;

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"dataset", c.dataset},
              {"csv_path", c.csv_path},
              {"synth_devices", c.synth_devices},
              {"synth_dim", c.synth_dim},
              {"synth_size_min", c.synth_size_min},
              {"synth_size_max", c.synth_size_max},
              {"synth_heterogeneity", c.synth_heterogeneity},
              {"split_train", c.split_train},
              {"split_test", c.split_test},
              {"split_validation", c.split_validation},
              {"min_samples", c.min_samples},
              {"lambda", c.lambda},
              {"gamma", c.gamma},
              {"tol", c.tol},
              {"max_epochs", c.max_epochs},
              {"policies", c.policies},
              {"k_grid", c.k_grid},
              {"cv_baseline_auc", c.cv_baseline_auc},
              {"data_baseline_n", c.data_baseline_n},
              {"random_trials", c.random_trials},
              {"aggregation", c.aggregation},
              {"proxy_sizes", c.proxy_sizes},
              {"ridge", c.ridge},
              {"seed", c.seed},
              {"ideal_pool_cap", c.ideal_pool_cap},
              {"threads", c.threads}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  j.at("dataset").get_to(c.dataset);
  j.at("csv_path").get_to(c.csv_path);
  j.at("synth_devices").get_to(c.synth_devices);
  j.at("synth_dim").get_to(c.synth_dim);
  j.at("synth_size_min").get_to(c.synth_size_min);
  j.at("synth_size_max").get_to(c.synth_size_max);
  j.at("synth_heterogeneity").get_to(c.synth_heterogeneity);
  j.at("split_train").get_to(c.split_train);
  j.at("split_test").get_to(c.split_test);
  j.at("split_validation").get_to(c.split_validation);
  j.at("min_samples").get_to(c.min_samples);
  j.at("lambda").get_to(c.lambda);
  j.at("gamma").get_to(c.gamma);
  j.at("tol").get_to(c.tol);
  j.at("max_epochs").get_to(c.max_epochs);
  j.at("policies").get_to(c.policies);
  j.at("k_grid").get_to(c.k_grid);
  j.at("cv_baseline_auc").get_to(c.cv_baseline_auc);
  j.at("data_baseline_n").get_to(c.data_baseline_n);
  j.at("random_trials").get_to(c.random_trials);
  j.at("aggregation").get_to(c.aggregation);
  j.at("proxy_sizes").get_to(c.proxy_sizes);
  j.at("ridge").get_to(c.ridge);
  j.at("seed").get_to(c.seed);
  j.at("ideal_pool_cap").get_to(c.ideal_pool_cap);
  j.at("threads").get_to(c.threads);
  return c;
}

json optional_to_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json summary_to_json(const SummaryMetrics& s) {
  json pct = json::object();
  for (const auto& [p, v] : s.percentiles) pct[std::to_string(p)] = v;
  return json{{"mean_auc", s.mean_auc},
              {"evaluated_devices", s.evaluated_devices},
              {"skipped_devices", s.skipped_devices},
              {"percentiles", pct}};
}

SummaryMetrics summary_from_json(const json& j) {
  SummaryMetrics s;
  j.at("mean_auc").get_to(s.mean_auc);
  j.at("evaluated_devices").get_to(s.evaluated_devices);
  j.at("skipped_devices").get_to(s.skipped_devices);
  for (const auto& [key, v] : j.at("percentiles").items()) {
    s.percentiles[std::stoi(key)] = v.get<double>();
  }
  return s;
}

json cards_to_json(const std::vector<DeviceScorecard>& cards) {
  json out = json::array();
  for (const auto& card : cards) {
    out.push_back(json{{"device_id", card.device_id},
                       {"auc", optional_to_json(card.auc)},
                       {"n_test", card.n_test}});
  }
  return out;
}

std::vector<DeviceScorecard> cards_from_json(const json& j) {
  std::vector<DeviceScorecard> cards;
  for (const auto& item : j) {
    DeviceScorecard card;
    item.at("device_id").get_to(card.device_id);
    card.auc = optional_from_json(item.at("auc"));
    item.at("n_test").get_to(card.n_test);
    cards.push_back(std::move(card));
  }
  return cards;
}

json method_to_json(const MethodResult& m) {
  json j{{"name", m.name},
         {"policy", m.policy},
         {"k", m.k},
         {"error", m.error},
         {"summary", summary_to_json(m.summary)},
         {"scorecards", cards_to_json(m.scorecards)},
         {"comm",
          json{{"up_bytes", m.comm.up_bytes},
               {"down_bytes", m.comm.down_bytes},
               {"up_models", m.comm.up_models},
               {"down_models", m.comm.down_models}}},
         {"relative_gain", optional_to_json(m.relative_gain)},
         {"relative_gain_mean_of_devices", optional_to_json(m.relative_gain_mean_of_devices)},
         {"fraction_of_ideal", optional_to_json(m.fraction_of_ideal)}};
  json trials = json::array();
  for (const auto& t : m.trial_summaries) trials.push_back(summary_to_json(t));
  j["trial_summaries"] = std::move(trials);
  return j;
}

MethodResult method_from_json(const json& j) {
  MethodResult m;
  j.at("name").get_to(m.name);
  j.at("policy").get_to(m.policy);
  j.at("k").get_to(m.k);
  j.at("error").get_to(m.error);
  m.summary = summary_from_json(j.at("summary"));
  m.scorecards = cards_from_json(j.at("scorecards"));
  const auto& comm = j.at("comm");
  comm.at("up_bytes").get_to(m.comm.up_bytes);
  comm.at("down_bytes").get_to(m.comm.down_bytes);
  comm.at("up_models").get_to(m.comm.up_models);
  comm.at("down_models").get_to(m.comm.down_models);
  m.relative_gain = optional_from_json(j.at("relative_gain"));
  m.relative_gain_mean_of_devices =
      optional_from_json(j.at("relative_gain_mean_of_devices"));
  m.fraction_of_ideal = optional_from_json(j.at("fraction_of_ideal"));
  for (const auto& t : j.at("trial_summaries")) {
    m.trial_summaries.push_back(summary_from_json(t));
  }
  return m;
}

}  // namespace

std::string report_to_json(const ExperimentReport& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["config"] = config_to_json(r.config);
  j["gamma_resolved"] = r.gamma_resolved;
  j["dataset_name"] = r.dataset_name;
  j["device_count"] = r.device_count;
  j["feature_dim"] = r.feature_dim;
  json methods = json::array();
  for (const auto& m : r.methods) methods.push_back(method_to_json(m));
  j["methods"] = std::move(methods);
  j["best_method"] = r.best_method;
  j["distill_teacher"] = r.distill_teacher;
  j["teacher_down_bytes"] = r.teacher_down_bytes;
  json curve = json::array();
  for (const auto& p : r.distill_curve) {
    curve.push_back(json{{"l", p.l},
                         {"teacher_mean_auc", p.teacher_mean_auc},
                         {"distilled_mean_auc", p.distilled_mean_auc},
                         {"distilled_bytes", p.distilled_bytes},
                         {"distilled_summary", summary_to_json(p.distilled_summary)}});
  }
  j["distill_curve"] = std::move(curve);
  j["solver"] = json{{"svm_devices", r.solver.svm_devices},
                     {"constant_devices", r.solver.constant_devices},
                     {"converged", r.solver.converged},
                     {"mean_epochs", r.solver.mean_epochs},
                     {"max_final_gap", r.solver.max_final_gap},
                     {"ideal_converged", r.solver.ideal_converged},
                     {"ideal_epochs", r.solver.ideal_epochs}};
  return j.dump(2);
}

ExperimentReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentReport r;
  j.at("schema_version").get_to(r.schema_version);
  if (r.schema_version != 1) {
    throw std::runtime_error("report: unsupported schema_version " +
                             std::to_string(r.schema_version));
  }
  r.config = config_from_json(j.at("config"));
  j.at("gamma_resolved").get_to(r.gamma_resolved);
  j.at("dataset_name").get_to(r.dataset_name);
  j.at("device_count").get_to(r.device_count);
  j.at("feature_dim").get_to(r.feature_dim);
  for (const auto& m : j.at("methods")) r.methods.push_back(method_from_json(m));
  j.at("best_method").get_to(r.best_method);
  j.at("distill_teacher").get_to(r.distill_teacher);
  j.at("teacher_down_bytes").get_to(r.teacher_down_bytes);
  for (const auto& p : j.at("distill_curve")) {
    DistillPoint point;
    p.at("l").get_to(point.l);
    p.at("teacher_mean_auc").get_to(point.teacher_mean_auc);
    p.at("distilled_mean_auc").get_to(point.distilled_mean_auc);
    p.at("distilled_bytes").get_to(point.distilled_bytes);
    point.distilled_summary = summary_from_json(p.at("distilled_summary"));
    r.distill_curve.push_back(std::move(point));
  }
  const auto& s = j.at("solver");
  s.at("svm_devices").get_to(r.solver.svm_devices);
  s.at("constant_devices").get_to(r.solver.constant_devices);
  s.at("converged").get_to(r.solver.converged);
  s.at("mean_epochs").get_to(r.solver.mean_epochs);
  s.at("max_final_gap").get_to(r.solver.max_final_gap);
  s.at("ideal_converged").get_to(r.solver.ideal_converged);
  s.at("ideal_epochs").get_to(r.solver.ideal_epochs);
  return r;
}

void emit_report(const ExperimentReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "report.json").string());
    out << report_to_json(report) << "\n";
  }

  {
    std::ofstream out(dir / "summary.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
    out << "method,mean_auc,relative_gain,fraction_of_ideal,up_bytes,down_bytes\n";
    const auto opt17 = [](const std::optional<double>& v) {
      return v ? format17(*v) : std::string("nan");
    };
    for (const auto& m : report.methods) {
      if (m.failed()) {
        out << m.name << ",nan,nan,nan,nan,nan\n";
        continue;
      }
      out << m.name << "," << format17(m.summary.mean_auc) << ","
          << opt17(m.relative_gain) << "," << opt17(m.fraction_of_ideal) << ","
          << format17(m.comm.up_bytes) << "," << format17(m.comm.down_bytes) << "\n";
    }
  }

  {
    std::ofstream out(dir / "device_scores.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "device_scores.csv").string());
    out << "method,device_id,auc\n";
    for (const auto& m : report.methods) {
      for (const auto& card : m.scorecards) {
        out << m.name << "," << card.device_id << ","
            << (card.auc ? format17(*card.auc) : std::string("nan")) << "\n";
      }
    }
  }

  {
    std::ofstream out(dir / "distill_curve.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "distill_curve.csv").string());
    out << "l,teacher_auc,distilled_auc\n";
    for (const auto& p : report.distill_curve) {
      out << p.l << "," << format17(p.teacher_mean_auc) << ","
          << format17(p.distilled_mean_auc) << "\n";
    }
  }
}

}  // namespace fedshot
