#include "authorid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "authorid/rng.hpp"

namespace authorid {

namespace {

constexpr double kZipfExponent = 1.1;

// Cumulative weights for inverse-CDF sampling; entries outside [lo, hi) or
// inside a masked range get weight zero.
struct CumDist {
  std::vector<double> cum;
  double total = 0.0;

  static CumDist zipf(uint32_t vocab, uint32_t lo, uint32_t hi, uint32_t mask_lo, uint32_t mask_hi) {
    CumDist d;
    d.cum.resize(vocab);
    double acc = 0.0;
    for (uint32_t i = 0; i < vocab; ++i) {
      bool in_range = i >= lo && i < hi;
      bool masked = i >= mask_lo && i < mask_hi;
      if (in_range && !masked) acc += std::pow(static_cast<double>(i) + 1.0, -kZipfExponent);
      d.cum[i] = acc;
    }
    d.total = acc;
    return d;
  }

  uint32_t sample(SplitMix64& rng) const {
    double u = rng.next_double() * total;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) return static_cast<uint32_t>(cum.size() - 1);
    return static_cast<uint32_t>(it - cum.begin());
  }
};

Split split_for_id(const std::string& id) {
  uint64_t h = fnv1a64(id) % 100;
  if (h < 70) return Split::train;
  if (h < 85) return Split::val;
  return Split::test;
}

std::string doc_id(Source source, int family, uint32_t serial) {
  char buf[64];
  if (family < 0)
    std::snprintf(buf, sizeof(buf), "%s-%05u", to_string(source).c_str(), serial);
  else
    std::snprintf(buf, sizeof(buf), "%s-fam%d-%05u", to_string(source).c_str(), family, serial);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (vocab_size < 16) throw Error(errc::config_invalid, "vocab_size must be at least 16");
  if (n_families < 1) throw Error(errc::config_invalid, "n_families must be at least 1");
  if (n_families > 8) throw Error(errc::config_invalid, "n_families is capped at 8 by the block layout");
  if (docs_per_class < 1) throw Error(errc::config_invalid, "docs_per_class must be at least 1");
  if (doc_len_min < 1 || doc_len_min > doc_len_max)
    throw Error(errc::config_invalid, "doc_len range must satisfy 1 <= min <= max");
  if (style_strength < 0.0 || style_strength > 1.0)
    throw Error(errc::config_invalid, "style_strength must be in [0,1]");
  if (collab_mix < 0.0 || collab_mix > 1.0)
    throw Error(errc::config_invalid, "collab_mix must be in [0,1]");
}

uint32_t family_block_size(const SynthConfig& config) {
  return std::max<uint32_t>(1, config.vocab_size / 16);
}

std::string synth_family_name(uint32_t f) { return "fam" + std::to_string(f); }

CorpusDataset generate_corpus(const SynthConfig& config) {
  config.validate();
  const uint32_t V = config.vocab_size;
  const uint32_t B = family_block_size(config);

  CumDist base = CumDist::zipf(V, 0, V, 0, 0);
  std::vector<CumDist> block(config.n_families), compl_(config.n_families);
  for (uint32_t f = 0; f < config.n_families; ++f) {
    uint32_t hi = V - f * B;
    uint32_t lo = hi - B;
    block[f] = CumDist::zipf(V, lo, hi, 0, 0);
    compl_[f] = CumDist::zipf(V, 0, V, lo, hi);
  }

  auto sample_token = [&](Source source, int family, SplitMix64& rng) -> uint32_t {
    switch (source) {
      case Source::human:
        return base.sample(rng);
      case Source::llm:
        if (rng.next_double() < config.style_strength) return block[family].sample(rng);
        return compl_[family].sample(rng);
      case Source::collab:
        if (rng.next_double() < config.collab_mix) {
          if (rng.next_double() < config.style_strength) return block[family].sample(rng);
          return compl_[family].sample(rng);
        }
        return base.sample(rng);
    }
    return 0;
  };

  std::vector<TextRecord> records;
  records.reserve(static_cast<size_t>(1 + 2 * config.n_families) * config.docs_per_class);

  auto emit_class = [&](Source source, int family) {
    for (uint32_t serial = 0; serial < config.docs_per_class; ++serial) {
      TextRecord r;
      r.id = doc_id(source, family, serial);
      SplitMix64 rng(seed_combine(config.seed, fnv1a64(r.id)));
      uint32_t len = config.doc_len_min +
                     static_cast<uint32_t>(rng.next_below(config.doc_len_max - config.doc_len_min + 1));
      std::string text;
      text.reserve(len * 6);
      for (uint32_t t = 0; t < len; ++t) {
        if (t) text += ' ';
        text += 't';
        text += std::to_string(sample_token(source, family, rng));
      }
      r.text = std::move(text);
      r.lang = "syn";
      r.domain = "synthetic";
      r.label.source = source;
      if (family >= 0) r.label.family = synth_family_name(static_cast<uint32_t>(family));
      if (source == Source::collab) r.label.collab_mode = CollabMode::polished;
      r.split = split_for_id(r.id);
      records.push_back(std::move(r));
    }
  };

  emit_class(Source::human, -1);
  for (uint32_t f = 0; f < config.n_families; ++f) emit_class(Source::llm, static_cast<int>(f));
  for (uint32_t f = 0; f < config.n_families; ++f) emit_class(Source::collab, static_cast<int>(f));

  return dataset_from_records(std::move(records));
}

}  // namespace authorid
