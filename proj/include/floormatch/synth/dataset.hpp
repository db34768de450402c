#pragma once

#include <string>
#include <vector>

#include "floormatch/common.hpp"
#include "floormatch/synth/generator.hpp"

namespace floormatch::synth {

struct DatasetManifest {
  uint64_t seed = 0;
  GeneratorSpec spec;
  int version = 1;
  std::vector<uint64_t> train_ids;
  std::vector<uint64_t> test_ids;
};

// In-memory dataset: apartments indexed by id (ids are dense, 0..n-1).
class Dataset {
 public:
  Dataset() = default;
  Dataset(DatasetManifest manifest, std::vector<Apartment> apartments);

  // Generation is parallel across apartment ids; each apartment derives its
  // own seed from (seed, id), so any jobs count yields identical bits.
  static Dataset generate(uint64_t seed, const GeneratorSpec& spec, int count,
                          double train_fraction, int jobs = 1);

  const DatasetManifest& manifest() const { return manifest_; }
  const Apartment& by_id(uint64_t id) const;
  const std::vector<uint64_t>& train_ids() const { return manifest_.train_ids; }
  const std::vector<uint64_t>& test_ids() const { return manifest_.test_ids; }
  size_t size() const { return apartments_.size(); }

 private:
  DatasetManifest manifest_;
  std::vector<Apartment> apartments_;
};

void save_dataset(const Dataset& dataset, const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace floormatch::synth
