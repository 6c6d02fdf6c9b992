#pragma once

#include <cstdint>
#include <string>

#include "authorid/encoder.hpp"
#include "authorid/loss.hpp"
#include "authorid/model.hpp"
#include "authorid/synth.hpp"
#include "authorid/trainer.hpp"

namespace authorid {

struct KnnConfig {
  uint32_t k = 20;
  double tau = 0.7;
};

struct EncoderConfig {
  uint32_t dim = 16384;
  NgramRange n_range = {2, 4};
};

// One JSON document drives every command; unknown keys anywhere are rejected.
// The top-level seed feeds synth and training unless they override it.
struct CliConfig {
  uint64_t seed = 42;
  ModelDims model;
  EncoderConfig encoder;
  TrainConfig train;
  LossConfig loss;
  KnnConfig knn;
  SynthConfig synth;

  std::string to_json() const;
  static CliConfig from_json(const std::string& text);
  static CliConfig from_file(const std::string& path);

  // Cross-field checks (encoder.dim == model.base_dim).
  void validate() const;
};

}  // namespace authorid
