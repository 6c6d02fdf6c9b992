#pragma once

#include <optional>
#include <string>
#include <vector>

#include "authorid/classifier.hpp"
#include "authorid/config.hpp"
#include "authorid/corpus.hpp"
#include "authorid/encoder.hpp"
#include "authorid/eval.hpp"
#include "authorid/index.hpp"
#include "authorid/model.hpp"

namespace authorid {

// Glue shared by the CLI, the python module and the verification suite, so
// every entry point drives the exact same path.

// Base embeddings for every record, hashed at the encoder config.
std::vector<SparseVec> sparse_bases(const CorpusDataset& dataset, const EncoderConfig& encoder);
// Base embeddings looked up in an external embedding file by record id.
std::vector<SparseVec> sparse_bases(const CorpusDataset& dataset, const ExternalEmbeddings& ext);

std::vector<float> to_float32(const EmbeddingVector& e);

// Index entries for the given record indices, with codes resolved against the
// supplied family table (which may be wider than the dataset's own).
std::vector<IndexEntry> index_entries(const CorpusDataset& dataset,
                                      const std::vector<SparseVec>& bases,
                                      const ModelParams& params,
                                      const std::vector<size_t>& record_indices,
                                      const FamilyTable& table, bool adapted);

struct ClassifyResult {
  std::string id;
  FuzzyVote coarse;
  FuzzyVote family;
  double direct_prob = 0.0;  // head-only probability of fully-LLM

  std::string to_json() const;
};

ClassifyResult classify_embedding(const std::string& id, const EmbeddingVector& e,
                                  const ModelParams& params, const VectorIndex& index,
                                  const KnnConfig& knn, const FamilyTable* names);

struct EvalOutput {
  MetricsReport authorship;
  MetricsReport family;
  OrderingReport ordering;
};

// Full evaluation of one split: fuzzy-kNN predictions against the index,
// family attribution, and the similarity-ordering diagnostic.
// family_llm_only restricts the family report to human and fully-LLM records.
EvalOutput evaluate_corpus(const CorpusDataset& dataset, const std::vector<SparseVec>& bases,
                           const ModelParams& params, const VectorIndex& index,
                           const FamilyTable& index_families, const KnnConfig& knn, Split split,
                           bool family_llm_only = false);

// Gold family label for attribution: "human" for human records, else the
// family name.
std::string gold_family_class(const TextRecord& record);

// Side files: "<path>.meta.json" (timestamps live here, never in artifacts)
// and "<path>.families.json" (family code -> name for an index file).
void write_meta(const std::string& artifact_path, const std::string& command);
void save_family_sidecar(const FamilyTable& table, const std::string& index_path);
std::optional<FamilyTable> load_family_sidecar(const std::string& index_path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace authorid
