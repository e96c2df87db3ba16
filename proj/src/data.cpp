#include "fedshot/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fedshot/error.hpp"
#include "fedshot/rng.hpp"

namespace fedshot {

bool LabeledSet::has_both_classes() const {
  bool pos = false, neg = false;
  for (double label : y) {
    if (label > 0) pos = true;
    else neg = true;
  }
  return pos && neg;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& token, std::size_t line_no,
                    const char* what) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError("csv line " + std::to_string(line_no) + ": bad " + what +
                      " '" + token + "'");
  }
  return v;
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RawFederatedData load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ConfigError("no samples in " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "device_id" || header[1] != "label") {
    throw ConfigError("csv line 1: expected header device_id,label,f0,...");
  }
  const std::size_t dim = header.size() - 2;
  for (std::size_t j = 0; j < dim; ++j) {
    if (header[j + 2] != "f" + std::to_string(j)) {
      throw ConfigError("csv line 1: expected feature column f" +
                        std::to_string(j) + ", got '" + header[j + 2] + "'");
    }
  }

  RawFederatedData out;
  out.name = path;
  out.dim = dim;
  std::map<std::string, std::size_t> device_index;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (fields.size() != dim + 2) {
      throw ConfigError("csv line " + std::to_string(line_no) + ": expected " +
                        std::to_string(dim + 2) + " fields, got " +
                        std::to_string(fields.size()));
    }

    const double raw_label = parse_double(fields[1], line_no, "label");
    double label;
    if (raw_label == -1.0 || raw_label == 1.0) label = raw_label;
    else if (raw_label == 0.0) label = -1.0;
    else {
      throw ConfigError("csv line " + std::to_string(line_no) +
                        ": label must be one of {-1,0,1}, got '" + fields[1] + "'");
    }

    auto [it, inserted] = device_index.try_emplace(fields[0], out.devices.size());
    if (inserted) {
      out.devices.push_back(DeviceSamples{fields[0], LabeledSet{Points(dim), {}}});
    }
    auto& dev = out.devices[it->second];
    for (std::size_t j = 0; j < dim; ++j) {
      dev.samples.X.data.push_back(parse_double(fields[j + 2], line_no, "feature"));
    }
    dev.samples.y.push_back(label);
  }

  if (out.devices.empty()) throw ConfigError("no samples in " + path);
  return out;
}

void write_csv(const RawFederatedData& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "device_id,label";
  for (std::size_t j = 0; j < data.dim; ++j) out << ",f" << j;
  out << "\n";
  for (const auto& dev : data.devices) {
    for (std::size_t i = 0; i < dev.samples.size(); ++i) {
      out << dev.device_id << "," << (dev.samples.y[i] > 0 ? "1" : "-1");
      for (double v : dev.samples.X.row(i)) out << "," << format17(v);
      out << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

RawFederatedData synth_federated(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.devices < 1) throw ConfigError("synth: need at least one device");
  if (spec.dim < 2) throw ConfigError("synth: dimension must be >= 2");
  if (spec.n_min < 1 || spec.n_min > spec.n_max) {
    throw ConfigError("synth: invalid device size range");
  }
  if (spec.heterogeneity < 0.0 || spec.heterogeneity > 1.0) {
    throw ConfigError("synth: heterogeneity must lie in [0,1]");
  }

  // Class means sit at +-(separation/2) along the first axis; the device
  // latent rotates that axis within the first two coordinates and shifts
  // every sample by a Gaussian offset.
  constexpr double kSeparation = 3.0;
  constexpr double kOffsetScale = 0.5;
  constexpr double kMaxAngle = 3.14159265358979323846 / 2.0;

  int width = 1;
  for (std::size_t v = spec.devices > 0 ? spec.devices - 1 : 0; v >= 10; v /= 10) ++width;

  RawFederatedData out;
  out.name = "synthetic";
  out.dim = spec.dim;
  out.devices.resize(spec.devices);

  for (std::size_t t = 0; t < spec.devices; ++t) {
    Rng rng(derive_seed(seed, "synth-device", t));
    auto& dev = out.devices[t];

    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "d%0*zu", width, t);
    dev.device_id = idbuf;
    dev.samples.X = Points(spec.dim);

    const std::size_t n =
        spec.n_min + static_cast<std::size_t>(rng.uniform_int(spec.n_max - spec.n_min + 1));
    const double angle = spec.heterogeneity * rng.uniform(-kMaxAngle, kMaxAngle);
    std::vector<double> offset(spec.dim);
    for (auto& o : offset) o = spec.heterogeneity * kOffsetScale * rng.normal();

    const double mean_x = 0.5 * kSeparation * std::cos(angle);
    const double mean_y = 0.5 * kSeparation * std::sin(angle);

    dev.samples.X.data.reserve(n * spec.dim);
    dev.samples.y.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double label = rng.uniform() < 0.5 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < spec.dim; ++j) {
        double mu = offset[j];
        if (j == 0) mu += label * mean_x;
        if (j == 1) mu += label * mean_y;
        dev.samples.X.data.push_back(mu + rng.normal());
      }
      dev.samples.y.push_back(label);
    }
  }
  return out;
}

FederatedDataset split(const RawFederatedData& data, const SplitRatios& ratios,
                       std::uint64_t seed) {
  if (!(ratios.train > 0.0) || !(ratios.test > 0.0) || !(ratios.validation > 0.0)) {
    throw ConfigError("split: ratios must be positive");
  }
  if (std::abs(ratios.train + ratios.test + ratios.validation - 1.0) > 1e-9) {
    throw ConfigError("split: ratios must sum to 1");
  }

  FederatedDataset out;
  out.name = data.name;
  out.dim = data.dim;
  out.devices.resize(data.devices.size());

  for (std::size_t t = 0; t < data.devices.size(); ++t) {
    const auto& src = data.devices[t];
    auto& dst = out.devices[t];
    dst.device_id = src.device_id;
    dst.dim = data.dim;
    dst.train.X = Points(data.dim);
    dst.test.X = Points(data.dim);
    dst.validation.X = Points(data.dim);

    const std::size_t n = src.samples.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "split:" + src.device_id));
    rng.shuffle(idx);

    const std::size_t n_test = static_cast<std::size_t>(std::floor(n * ratios.test));
    const std::size_t n_val = static_cast<std::size_t>(std::floor(n * ratios.validation));
    const std::size_t n_train = n - n_test - n_val;  // floor(n*train) + remainder

    for (std::size_t i = 0; i < n; ++i) {
      LabeledSet* part = &dst.train;
      if (i >= n_train && i < n_train + n_test) part = &dst.test;
      else if (i >= n_train + n_test) part = &dst.validation;
      part->X.push_back(src.samples.X.row(idx[i]));
      part->y.push_back(src.samples.y[idx[i]]);
    }
  }

  std::sort(out.devices.begin(), out.devices.end(),
            [](const DeviceDataset& a, const DeviceDataset& b) {
              return a.device_id < b.device_id;
            });
  return out;
}

LabeledSet pool_train(const FederatedDataset& dataset, std::size_t cap,
                      std::uint64_t seed) {
  LabeledSet pooled;
  pooled.X = Points(dataset.dim);
  for (const auto& dev : dataset.devices) {
    pooled.X.data.insert(pooled.X.data.end(), dev.train.X.data.begin(),
                         dev.train.X.data.end());
    pooled.y.insert(pooled.y.end(), dev.train.y.begin(), dev.train.y.end());
  }
  if (cap == 0 || pooled.size() <= cap) return pooled;

  std::vector<std::size_t> idx(pooled.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "pool-cap"));
  rng.shuffle(idx);
  idx.resize(cap);

  LabeledSet capped;
  capped.X = Points(dataset.dim);
  capped.X.data.reserve(cap * dataset.dim);
  capped.y.reserve(cap);
  for (std::size_t i : idx) {
    capped.X.push_back(pooled.X.row(i));
    capped.y.push_back(pooled.y[i]);
  }
  return capped;
}

}  // namespace fedshot
