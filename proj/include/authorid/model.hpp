#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "authorid/encoder.hpp"
#include "authorid/errors.hpp"

namespace authorid {

struct ModelDims {
  uint32_t base_dim = 16384;   // D: base embedding size
  uint32_t hidden_dim = 256;   // width of the tanh layer
  uint32_t embed_dim = 128;    // d: representation size

  bool operator==(const ModelDims&) const = default;
};

// Unit-norm d-dimensional representation the similarity space is built on.
struct EmbeddingVector {
  std::vector<double> values;
};

// Sparse view of a base embedding; hashed n-gram vectors are mostly zeros and
// the first layer exploits that.
struct SparseVec {
  std::vector<uint32_t> idx;
  std::vector<double> val;

  static SparseVec from_dense(std::span<const float> dense);
};

// Projection head e = normalize(W2 tanh(W1 x + b1) + b2) plus the auxiliary
// binary head p = sigmoid(wc . e + bc), p being the probability that the text
// is fully LLM-generated (x = 0).
//
// Values are doubles for gradient work, but every array the system produces
// holds exact float32 images (init and each optimizer step round through
// float), so the float32 file format round-trips bitwise.
struct ModelParams {
  ModelDims dims;
  std::vector<double> w1;  // stored fan-in major: w1[i*hidden + j] = W1[j][i]
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // row-major d x hidden
  std::vector<double> b2;  // d
  std::vector<double> wc;  // d
  double bc = 0.0;

  bool all_finite() const;
  bool operator==(const ModelParams&) const = default;
};

// Glorot-uniform weights quantized to float32, zero biases; deterministic per
// seed (draw order: W1 row-major, W2 row-major, wc).
ModelParams init_params(ModelDims dims, uint64_t seed);

EmbeddingVector project(const ModelParams& params, std::span<const float> base);
EmbeddingVector project(const ModelParams& params, const SparseVec& base);

double classify_prob(const ModelParams& params, std::span<const double> embedding);

// FMDL file: magic "FMDL", u32 version=1, u32 D, u32 hidden, u32 d, then
// W1 (row-major hidden x D), b1, W2 (row-major d x hidden), b2, wc, bc as
// float32 LE.
void save_params(const ModelParams& params, const std::string& path);
ModelParams load_params(const std::string& path);

// Round a double through float32 (the storage precision of all model files).
inline double quantize_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace authorid
