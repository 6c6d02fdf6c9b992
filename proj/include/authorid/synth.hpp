#pragma once

#include <cstdint>

#include "authorid/corpus.hpp"

namespace authorid {

// Deterministic synthetic corpus with planted per-family token styles.
// Tokens are rendered "t<index>" separated by single spaces. Every family owns
// a disjoint block of token ids at the top of the vocabulary; llm docs shift
// probability mass style_strength onto their family's block, collaborative
// docs mix the family distribution with the human one token by token.
struct SynthConfig {
  uint32_t vocab_size = 2000;
  uint32_t n_families = 3;
  uint32_t docs_per_class = 100;
  uint32_t doc_len_min = 120;
  uint32_t doc_len_max = 240;
  double style_strength = 0.6;  // block mass in llm docs
  double collab_mix = 0.5;      // per-token probability of the family distribution
  uint64_t seed = 42;

  void validate() const;  // throws ConfigInvalid
};

// Family block size in token ids (vocab_size / 16, at least 1). Block f is
// [vocab - (f+1)*B, vocab - f*B); the layout does not depend on n_families so
// corpora generated with more families extend, not reshuffle, earlier ones.
uint32_t family_block_size(const SynthConfig& config);

// Classes emitted, docs_per_class each: human, llm(f) for each family, then
// collab(f) for each family. Splits 70/15/15 by FNV-1a hash of the record id.
CorpusDataset generate_corpus(const SynthConfig& config);

// Family name used by the generator for family index f ("fam<f>").
std::string synth_family_name(uint32_t f);

}  // namespace authorid
