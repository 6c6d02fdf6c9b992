#include "authorid/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace authorid {

using nlohmann::json;

std::vector<SparseVec> sparse_bases(const CorpusDataset& dataset, const EncoderConfig& encoder) {
  std::vector<SparseVec> bases;
  bases.reserve(dataset.records.size());
  for (const auto& r : dataset.records) {
    BaseEmbedding e = hash_ngram_embed(r.text, encoder.dim, encoder.n_range, r.id);
    bases.push_back(SparseVec::from_dense(e.values));
  }
  return bases;
}

std::vector<SparseVec> sparse_bases(const CorpusDataset& dataset, const ExternalEmbeddings& ext) {
  std::vector<SparseVec> bases;
  bases.reserve(dataset.records.size());
  for (const auto& r : dataset.records) {
    auto it = ext.by_id.find(r.id);
    if (it == ext.by_id.end())
      throw Error(errc::missing_embedding, "no embedding for record '" + r.id + "'");
    bases.push_back(SparseVec::from_dense(it->second.values));
  }
  return bases;
}

std::vector<float> to_float32(const EmbeddingVector& e) {
  return std::vector<float>(e.values.begin(), e.values.end());
}

std::vector<IndexEntry> index_entries(const CorpusDataset& dataset,
                                      const std::vector<SparseVec>& bases,
                                      const ModelParams& params,
                                      const std::vector<size_t>& record_indices,
                                      const FamilyTable& table, bool adapted) {
  std::vector<IndexEntry> entries;
  entries.reserve(record_indices.size());
  for (size_t i : record_indices) {
    IndexEntry e;
    e.id = dataset.records[i].id;
    e.vector = to_float32(project(params, bases[i]));
    e.codes = label_to_codes(dataset.records[i].label, table);
    e.adapted = adapted;
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string ClassifyResult::to_json() const {
  json j;
  j["id"] = id;
  j["predicted"] = coarse.predicted;
  json m;
  for (size_t i = 0; i < coarse.classes.size(); ++i) m[coarse.classes[i]] = coarse.memberships[i];
  j["memberships"] = m;
  j["family_predicted"] = family.predicted;
  json fm;
  for (size_t i = 0; i < family.classes.size(); ++i) fm[family.classes[i]] = family.memberships[i];
  j["family_memberships"] = fm;
  j["direct_prob_llm"] = direct_prob;
  json ns = json::array();
  for (const auto& n : coarse.neighbors)
    ns.push_back({{"id", n.id}, {"similarity", n.similarity}, {"weight", n.weight}});
  j["neighbors"] = ns;
  return j.dump();
}

ClassifyResult classify_embedding(const std::string& id, const EmbeddingVector& e,
                                  const ModelParams& params, const VectorIndex& index,
                                  const KnnConfig& knn, const FamilyTable* names) {
  if (params.dims.embed_dim != index.dim())
    throw Error(errc::dim_mismatch, "model embed_dim " + std::to_string(params.dims.embed_dim) +
                                        " != index dim " + std::to_string(index.dim()));
  ClassifyResult out;
  out.id = id;
  std::vector<float> q = to_float32(e);
  out.coarse = fuzzy_knn_classify(index, q, knn.k, knn.tau);
  out.family = classify_family(index, q, knn.k, knn.tau, names);
  out.direct_prob = classify_direct(params, e);
  return out;
}

std::string gold_family_class(const TextRecord& record) {
  if (record.label.source == Source::human) return "human";
  return *record.label.family;
}

EvalOutput evaluate_corpus(const CorpusDataset& dataset, const std::vector<SparseVec>& bases,
                           const ModelParams& params, const VectorIndex& index,
                           const FamilyTable& index_families, const KnnConfig& knn, Split split,
                           bool family_llm_only) {
  auto idx = split_indices(dataset, split);
  if (idx.empty()) throw Error(errc::empty, "split '" + to_string(split) + "' is empty");
  if (params.dims.embed_dim != index.dim())
    throw Error(errc::dim_mismatch, "model embed_dim != index dim");

  std::vector<Source> pred3, gold3;
  std::vector<std::string> predf, goldf;
  std::vector<EmbeddingVector> embeddings;
  std::vector<Codes> codes;
  embeddings.reserve(idx.size());

  for (size_t i : idx) {
    const auto& record = dataset.records[i];
    EmbeddingVector e = project(params, bases[i]);
    std::vector<float> q = to_float32(e);

    FuzzyVote coarse = fuzzy_knn_classify(index, q, knn.k, knn.tau);
    pred3.push_back(source_from_string(coarse.predicted));
    gold3.push_back(record.label.source);

    if (!family_llm_only || record.label.source != Source::collab) {
      FuzzyVote fam = classify_family(index, q, knn.k, knn.tau, &index_families);
      predf.push_back(fam.predicted);
      goldf.push_back(gold_family_class(record));
    }

    codes.push_back(label_to_codes(record.label, dataset.family_table));
    embeddings.push_back(std::move(e));
  }

  EvalOutput out;
  out.authorship = evaluate(pred3, gold3);
  out.family = evaluate_classes(predf, goldf);
  out.ordering = ordering_diagnostic(embeddings, codes);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot open for writing: " + path);
  out << content;
  if (!out) throw Error(errc::io_error, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_meta(const std::string& artifact_path, const std::string& command) {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  json j;
  j["created_at"] = buf;
  j["tool"] = "authorid 0.1.0";
  j["command"] = command;
  write_text_file(artifact_path + ".meta.json", j.dump() + "\n");
}

void save_family_sidecar(const FamilyTable& table, const std::string& index_path) {
  write_text_file(index_path + ".families.json", table.to_json() + "\n");
}

std::optional<FamilyTable> load_family_sidecar(const std::string& index_path) {
  std::ifstream in(index_path + ".families.json");
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return FamilyTable::from_json(buf.str());
}

}  // namespace authorid
