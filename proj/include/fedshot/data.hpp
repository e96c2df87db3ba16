#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedshot/matrix.hpp"

namespace fedshot {

// A labeled sample set: features row per sample, labels in {-1, +1}.
struct LabeledSet {
  Points X;
  std::vector<double> y;

  std::size_t size() const { return y.size(); }
  bool has_both_classes() const;
};

// One device's samples before splitting.
struct DeviceSamples {
  std::string device_id;
  LabeledSet samples;
};

// Federated dataset as ingested or generated: per-device sample lists.
struct RawFederatedData {
  std::string name;
  std::size_t dim = 0;
  std::vector<DeviceSamples> devices;
};

// One device's materialized train/test/validation partition.
struct DeviceDataset {
  std::string device_id;
  std::size_t dim = 0;
  LabeledSet train;
  LabeledSet test;
  LabeledSet validation;
};

struct FederatedDataset {
  std::string name;
  std::size_t dim = 0;
  std::vector<DeviceDataset> devices;
};

// CSV schema: header "device_id,label,f0,f1,...,f{d-1}"; label in {-1,1}
// (or {0,1}, remapped to {-1,+1}); features are decimal floats; LF or CRLF.
// One DeviceSamples per distinct device_id, in order of first appearance,
// samples in file order. Schema violations report the offending line number.
RawFederatedData load_csv(const std::string& path);

// Writes the same schema, features with 17 significant digits so that
// load_csv(write_csv(data)) reproduces every sample exactly.
void write_csv(const RawFederatedData& data, const std::string& path);

struct SynthSpec {
  std::size_t devices = 40;
  std::size_t dim = 10;
  std::size_t n_min = 20;
  std::size_t n_max = 120;
  double heterogeneity = 0.7;  // in [0, 1]; 0 = every device draws IID
};

// Two Gaussian classes per device. Each device gets a latent rotation of the
// class axis (in the first two coordinates) and a latent offset, both scaled
// by heterogeneity; heterogeneity 0 makes all devices share one global
// mixture. Same (spec, seed) always produces bitwise-identical data.
RawFederatedData synth_federated(const SynthSpec& spec, std::uint64_t seed);

struct SplitRatios {
  double train = 0.5;
  double test = 0.4;
  double validation = 0.1;
};

// Per-device seeded shuffle, then contiguous partition of floor(n * ratio)
// samples in the order train, test, validation; remainder samples go to
// train. Output devices are sorted by ascending device_id. Per-device RNG
// streams derive from hash(seed, device_id), so parallel splitting cannot
// change results.
FederatedDataset split(const RawFederatedData& data, const SplitRatios& ratios,
                       std::uint64_t seed);

// Concatenation of every device's train split, in dataset order. cap > 0
// keeps a seed-deterministic subsample of exactly cap samples.
LabeledSet pool_train(const FederatedDataset& dataset, std::size_t cap = 0,
                      std::uint64_t seed = 0);

}  // namespace fedshot
