#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "authorid/corpus.hpp"
#include "authorid/loss.hpp"
#include "authorid/model.hpp"

namespace authorid {

struct TrainConfig {
  uint32_t batch_size = 64;
  uint32_t epochs = 50;
  double lr = 3e-4;
  double weight_decay = 1e-4;
  // Linear warmup, scaled down proportionally when the run is shorter than
  // 4000 steps so short runs still spend warmup on a fraction of the run.
  uint32_t warmup_steps = 2000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double grad_clip = 5.0;  // global L2 norm
  uint64_t seed = 42;

  void validate() const;
};

struct StepStats {
  uint64_t step = 0;
  double total = 0.0;
  double ce = 0.0;
  double mcl = 0.0;
  std::array<double, 5> levels{};
  int skipped = 0;
};

struct EpochStats {
  uint32_t epoch = 0;
  double val_accuracy = 0.0;
  double val_macro_f1 = 0.0;
};

struct TrainHistory {
  std::vector<StepStats> steps;
  std::vector<EpochStats> epochs;
  uint32_t best_epoch = 0;  // 1-based; 0 when no validation ran
  double best_val_f1 = 0.0;
};

std::string history_to_csv(const TrainHistory& history);
std::string epochs_to_csv(const TrainHistory& history);

// Stratified batch: every coarse class present in the train split appears at
// least twice, and per family the llm and collab sides appear at least twice
// when available, capacity permitting. Deterministic in (config.seed, step).
std::vector<size_t> sample_batch(const CorpusDataset& dataset, const TrainConfig& config,
                                 uint64_t step);

struct AdamHyper {
  double lr = 1e-3;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  uint64_t warmup_steps = 0;  // effective (already scaled) warmup
};

struct OptState {
  Gradients m, v;
  static OptState zeros(const ModelDims& dims);
};

// One decoupled-weight-decay Adam update (step is 1-based):
//   lr_t = lr * min(1, step / warmup_steps)
//   theta -= lr_t * mhat / (sqrt(vhat) + eps) + lr_t * wd * theta
// Updated parameters are rounded through float32, matching the model file's
// storage precision.
void adamw_step(ModelParams& params, const Gradients& grads, OptState& state,
                const AdamHyper& hyper, uint64_t step);

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

// Full loop: sample -> project -> loss -> gradients -> AdamW, with per-epoch
// fuzzy-kNN validation (k=20, tau=0.7) of the val split against the train
// split. Throws NumericalDivergence if the loss or any parameter goes
// non-finite. bases must align with dataset.records.
TrainResult train(const CorpusDataset& dataset, const std::vector<SparseVec>& bases,
                  ModelDims dims, const TrainConfig& train_config, const LossConfig& loss_config);

// Hash-encodes the corpus at dims.base_dim with the default n-gram range.
TrainResult train(const CorpusDataset& dataset, ModelDims dims, const TrainConfig& train_config,
                  const LossConfig& loss_config);

}  // namespace authorid
