#include "authorid/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "authorid/classifier.hpp"
#include "authorid/encoder.hpp"
#include "authorid/eval.hpp"
#include "authorid/index.hpp"
#include "authorid/rng.hpp"

namespace authorid {

void TrainConfig::validate() const {
  if (batch_size < 4) throw Error(errc::config_invalid, "batch_size must be >= 4");
  if (lr < 0.0) throw Error(errc::config_invalid, "lr must be non-negative");
  if (weight_decay < 0.0) throw Error(errc::config_invalid, "weight_decay must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw Error(errc::config_invalid, "betas must be in [0,1)");
  if (!(eps > 0.0)) throw Error(errc::config_invalid, "eps must be positive");
  if (grad_clip <= 0.0) throw Error(errc::config_invalid, "grad_clip must be positive");
}

std::string history_to_csv(const TrainHistory& history) {
  std::ostringstream out;
  out << "step,loss,ce,mcl,level1,level2,level3,level4,level5,skipped\n";
  for (const auto& s : history.steps) {
    out << s.step << ',' << s.total << ',' << s.ce << ',' << s.mcl;
    for (double l : s.levels) out << ',' << l;
    out << ',' << s.skipped << '\n';
  }
  return out.str();
}

std::string epochs_to_csv(const TrainHistory& history) {
  std::ostringstream out;
  out << "epoch,val_accuracy,val_macro_f1\n";
  for (const auto& e : history.epochs)
    out << e.epoch << ',' << e.val_accuracy << ',' << e.val_macro_f1 << '\n';
  return out.str();
}

std::vector<size_t> sample_batch(const CorpusDataset& dataset, const TrainConfig& config,
                                 uint64_t step) {
  config.validate();

  std::vector<size_t> train_idx = split_indices(dataset, Split::train);
  if (train_idx.empty()) throw Error(errc::insufficient_data, "train split is empty");

  std::array<std::vector<size_t>, 3> by_class;  // llm, collab, human
  std::vector<std::vector<size_t>> llm_by_family(dataset.family_table.size());
  std::vector<std::vector<size_t>> collab_by_family(dataset.family_table.size());
  for (size_t i : train_idx) {
    const auto& label = dataset.records[i].label;
    by_class[static_cast<size_t>(label.source)].push_back(i);
    if (label.source == Source::llm) llm_by_family[*dataset.family_table.code(*label.family)].push_back(i);
    if (label.source == Source::collab)
      collab_by_family[*dataset.family_table.code(*label.family)].push_back(i);
  }
  int coarse_present = 0;
  for (const auto& c : by_class) coarse_present += c.empty() ? 0 : 1;
  if (coarse_present < 2)
    throw Error(errc::insufficient_data, "train split covers fewer than 2 coarse classes");

  SplitMix64 rng(seed_combine(seed_combine(config.seed, 0x62617463), step));
  std::vector<char> used(dataset.records.size(), 0);
  std::vector<size_t> chosen;
  chosen.reserve(config.batch_size);

  auto pick = [&](const std::vector<size_t>& pool, size_t want) {
    std::vector<size_t> avail;
    for (size_t i : pool)
      if (!used[i]) avail.push_back(i);
    want = std::min({want, avail.size(), static_cast<size_t>(config.batch_size) - chosen.size()});
    for (size_t t = 0; t < want; ++t) {
      size_t j = t + static_cast<size_t>(rng.next_below(avail.size() - t));
      std::swap(avail[t], avail[j]);
      used[avail[t]] = 1;
      chosen.push_back(avail[t]);
    }
  };

  // Family quotas first (these cover llm/collab coarse presence), then top up
  // any coarse class below two.
  for (size_t f = 0; f < dataset.family_table.size(); ++f) {
    pick(llm_by_family[f], 2);
    pick(collab_by_family[f], 2);
  }
  for (const auto& pool : by_class) {
    size_t have = 0;
    for (size_t i : chosen)
      if (std::find(pool.begin(), pool.end(), i) != pool.end()) ++have;
    if (have < 2) pick(pool, 2 - have);
  }

  // Fill the remainder uniformly without replacement, then with replacement
  // if the split is smaller than the batch.
  pick(train_idx, config.batch_size - chosen.size());
  while (chosen.size() < config.batch_size)
    chosen.push_back(train_idx[rng.next_below(train_idx.size())]);

  for (size_t t = chosen.size(); t > 1; --t)
    std::swap(chosen[t - 1], chosen[rng.next_below(t)]);
  return chosen;
}

OptState OptState::zeros(const ModelDims& dims) {
  return {Gradients::zeros(dims), Gradients::zeros(dims)};
}

namespace {

void check_shapes(const ModelParams& p, const Gradients& g) {
  if (g.w1.size() != p.w1.size() || g.b1.size() != p.b1.size() || g.w2.size() != p.w2.size() ||
      g.b2.size() != p.b2.size() || g.wc.size() != p.wc.size())
    throw Error(errc::shape_mismatch, "gradient shapes do not match parameters");
}

}  // namespace

void adamw_step(ModelParams& params, const Gradients& grads, OptState& state,
                const AdamHyper& hyper, uint64_t step) {
  if (step < 1) throw Error(errc::config_invalid, "step must be >= 1");
  check_shapes(params, grads);
  check_shapes(params, state.m);
  check_shapes(params, state.v);

  const double warm = hyper.warmup_steps > 0
                          ? std::min(1.0, static_cast<double>(step) / static_cast<double>(hyper.warmup_steps))
                          : 1.0;
  const double lr_t = hyper.lr * warm;
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));

  auto update = [&](double& theta, double g, double& m, double& v) {
    m = hyper.beta1 * m + (1.0 - hyper.beta1) * g;
    v = hyper.beta2 * v + (1.0 - hyper.beta2) * g * g;
    double mhat = m / bc1;
    double vhat = v / bc2;
    theta = quantize_f32(theta - lr_t * mhat / (std::sqrt(vhat) + hyper.eps) -
                         lr_t * hyper.weight_decay * theta);
  };

  auto update_array = [&](std::vector<double>& theta, const std::vector<double>& g,
                          std::vector<double>& m, std::vector<double>& v) {
    for (size_t i = 0; i < theta.size(); ++i) update(theta[i], g[i], m[i], v[i]);
  };

  update_array(params.w1, grads.w1, state.m.w1, state.v.w1);
  update_array(params.b1, grads.b1, state.m.b1, state.v.b1);
  update_array(params.w2, grads.w2, state.m.w2, state.v.w2);
  update_array(params.b2, grads.b2, state.m.b2, state.v.b2);
  update_array(params.wc, grads.wc, state.m.wc, state.v.wc);
  update(params.bc, grads.bc, state.m.bc, state.v.bc);
}

namespace {

EpochStats validate_epoch(const CorpusDataset& dataset, const std::vector<SparseVec>& bases,
                          const ModelParams& params, const std::vector<Codes>& codes,
                          uint32_t epoch) {
  auto train_idx = split_indices(dataset, Split::train);
  auto val_idx = split_indices(dataset, Split::val);

  std::vector<IndexEntry> entries;
  entries.reserve(train_idx.size());
  for (size_t i : train_idx) {
    EmbeddingVector e = project(params, bases[i]);
    IndexEntry entry;
    entry.id = dataset.records[i].id;
    entry.vector.assign(e.values.begin(), e.values.end());
    entry.codes = codes[i];
    entries.push_back(std::move(entry));
  }
  VectorIndex index = VectorIndex::build(std::move(entries));

  std::vector<Source> pred, gold;
  pred.reserve(val_idx.size());
  for (size_t i : val_idx) {
    EmbeddingVector e = project(params, bases[i]);
    std::vector<float> q(e.values.begin(), e.values.end());
    FuzzyVote vote = fuzzy_knn_classify(index, q, 20, 0.7);
    pred.push_back(source_from_string(vote.predicted));
    gold.push_back(dataset.records[i].label.source);
  }
  MetricsReport report = evaluate(pred, gold);
  return {epoch, report.accuracy, report.f1_macro};
}

}  // namespace

TrainResult train(const CorpusDataset& dataset, const std::vector<SparseVec>& bases,
                  ModelDims dims, const TrainConfig& train_config, const LossConfig& loss_config) {
  train_config.validate();
  loss_config.validate();
  if (bases.size() != dataset.records.size())
    throw Error(errc::length_mismatch, "bases must align with dataset records");

  auto train_idx = split_indices(dataset, Split::train);
  auto val_idx = split_indices(dataset, Split::val);

  std::vector<Codes> codes(dataset.records.size());
  for (size_t i = 0; i < dataset.records.size(); ++i)
    codes[i] = label_to_codes(dataset.records[i].label, dataset.family_table);

  TrainResult result;
  result.params = init_params(dims, train_config.seed);
  if (train_config.epochs == 0) return result;

  {
    int coarse = 0;
    std::array<bool, 3> present{};
    for (size_t i : train_idx) present[static_cast<size_t>(dataset.records[i].label.source)] = true;
    for (bool b : present) coarse += b ? 1 : 0;
    if (coarse < 2)
      throw Error(errc::insufficient_data, "train split covers fewer than 2 coarse classes");
  }

  const uint64_t steps_per_epoch = std::max<uint64_t>(1, train_idx.size() / train_config.batch_size);
  const uint64_t total_steps = steps_per_epoch * train_config.epochs;
  AdamHyper hyper{train_config.lr,    train_config.weight_decay, train_config.beta1,
                  train_config.beta2, train_config.eps,          train_config.warmup_steps};
  if (total_steps < 4000)
    hyper.warmup_steps = train_config.warmup_steps * total_steps / 4000;

  OptState opt = OptState::zeros(dims);
  Gradients grads;
  uint64_t step = 0;

  for (uint32_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
    for (uint64_t s = 0; s < steps_per_epoch; ++s) {
      ++step;
      std::vector<size_t> batch = sample_batch(dataset, train_config, step);
      std::vector<SparseVec> batch_bases;
      std::vector<Codes> batch_codes;
      batch_bases.reserve(batch.size());
      batch_codes.reserve(batch.size());
      for (size_t i : batch) {
        batch_bases.push_back(bases[i]);
        batch_codes.push_back(codes[i]);
      }

      LossBreakdown bd = loss_gradients(batch_bases, batch_codes, result.params, loss_config, grads);
      if (!std::isfinite(bd.total))
        throw Error(errc::numerical_divergence, "loss non-finite at step " + std::to_string(step));

      double norm = std::sqrt(grads.squared_norm());
      if (norm > train_config.grad_clip && norm > 0.0)
        grads.scale(train_config.grad_clip / norm);

      adamw_step(result.params, grads, opt, hyper, step);
      if (!result.params.all_finite())
        throw Error(errc::numerical_divergence, "parameters non-finite at step " + std::to_string(step));

      StepStats stats;
      stats.step = step;
      stats.total = bd.total;
      stats.ce = bd.ce;
      stats.mcl = bd.mcl;
      stats.levels = bd.level_sums;
      stats.skipped = bd.skipped;
      result.history.steps.push_back(stats);
    }

    if (!val_idx.empty()) {
      EpochStats es = validate_epoch(dataset, bases, result.params, codes, epoch);
      if (result.history.epochs.empty() || es.val_macro_f1 > result.history.best_val_f1) {
        result.history.best_epoch = epoch;
        result.history.best_val_f1 = es.val_macro_f1;
      }
      result.history.epochs.push_back(es);
    }
  }
  return result;
}

TrainResult train(const CorpusDataset& dataset, ModelDims dims, const TrainConfig& train_config,
                  const LossConfig& loss_config) {
  std::vector<SparseVec> bases;
  bases.reserve(dataset.records.size());
  for (const auto& r : dataset.records) {
    BaseEmbedding e = hash_ngram_embed(r.text, dims.base_dim, {2, 4}, r.id);
    bases.push_back(SparseVec::from_dense(e.values));
  }
  return train(dataset, bases, dims, train_config, loss_config);
}

}  // namespace authorid
