#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "authorid/errors.hpp"

namespace authorid {

// Unit-norm base representation of one text, before the trained projection.
struct BaseEmbedding {
  std::string source_id;
  std::vector<float> values;
};

struct NgramRange {
  uint32_t n_min = 2;
  uint32_t n_max = 4;
};

// Signed feature hashing over byte n-grams. For every n in [n_min, n_max] and
// every n-gram g of the text: bucket = fnv1a64(g) & (dim-1), sign from the
// top bit of the SplitMix64 finalizer of the same hash; signed counts are
// accumulated and L2-normalized. A text shorter than n_min hashes as a single
// whole-string gram so the result is always defined. dim must be a power of
// two in [2^8, 2^20].
BaseEmbedding hash_ngram_embed(std::string_view text, uint32_t dim = 16384,
                               NgramRange n_range = {2, 4}, std::string source_id = "");

struct ExternalEmbeddings {
  uint32_t dim = 0;
  std::unordered_map<std::string, BaseEmbedding> by_id;
};

// FEMB file: magic "FEMB", u32 LE version=1, u32 dim, u64 count, then per
// record u16 id byte-length, id bytes, dim float32 LE values.
void save_embeddings(const std::vector<BaseEmbedding>& embeddings, uint32_t dim,
                     const std::string& path);
// Vectors are re-normalized to unit norm on load; ids must be unique.
ExternalEmbeddings load_external_embeddings(const std::string& path);

}  // namespace authorid
