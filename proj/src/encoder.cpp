#include "authorid/encoder.hpp"

#include <cmath>

#include "authorid/binio.hpp"
#include "authorid/rng.hpp"

namespace authorid {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool effectively_empty(std::string_view text) {
  for (char c : text)
    if (!is_space(c)) return false;
  return true;
}

void check_dim(uint32_t dim) {
  if (dim < (1u << 8) || dim > (1u << 20) || (dim & (dim - 1)) != 0)
    throw Error(errc::dim_out_of_range,
                "dim must be a power of two in [256, 1048576], got " + std::to_string(dim));
}

}  // namespace

BaseEmbedding hash_ngram_embed(std::string_view text, uint32_t dim, NgramRange n_range,
                               std::string source_id) {
  check_dim(dim);
  if (n_range.n_min < 1 || n_range.n_min > n_range.n_max || n_range.n_max > 8)
    throw Error(errc::config_invalid, "n-gram range must satisfy 1 <= n_min <= n_max <= 8");
  if (text.empty() || effectively_empty(text))
    throw Error(errc::empty_text, "cannot embed empty text");

  std::vector<double> acc(dim, 0.0);
  auto add_gram = [&](std::string_view gram) {
    uint64_t h = fnv1a64(gram);
    uint32_t bucket = static_cast<uint32_t>(h & (dim - 1));
    double sign = (mix64(h) >> 63) ? -1.0 : 1.0;
    acc[bucket] += sign;
  };

  bool any = false;
  for (uint32_t n = n_range.n_min; n <= n_range.n_max; ++n) {
    if (text.size() < n) break;
    for (size_t i = 0; i + n <= text.size(); ++i) {
      add_gram(text.substr(i, n));
      any = true;
    }
  }
  if (!any) add_gram(text);

  double norm_sq = 0.0;
  for (double v : acc) norm_sq += v * v;
  double norm = std::sqrt(norm_sq);

  BaseEmbedding e;
  e.source_id = std::move(source_id);
  e.values.resize(dim);
  for (uint32_t i = 0; i < dim; ++i) e.values[i] = static_cast<float>(acc[i] / norm);
  return e;
}

void save_embeddings(const std::vector<BaseEmbedding>& embeddings, uint32_t dim,
                     const std::string& path) {
  BinWriter w(path);
  w.magic("FEMB");
  w.u32(1);
  w.u32(dim);
  w.u64(embeddings.size());
  for (const auto& e : embeddings) {
    if (e.values.size() != dim)
      throw Error(errc::dim_mismatch, "embedding '" + e.source_id + "' has dim " +
                                          std::to_string(e.values.size()) + ", expected " +
                                          std::to_string(dim));
    if (e.source_id.size() > 0xFFFF)
      throw Error(errc::config_invalid, "id longer than 65535 bytes");
    w.u16(static_cast<uint16_t>(e.source_id.size()));
    w.bytes(e.source_id);
    for (float v : e.values) w.f32(v);
  }
  w.close();
}

ExternalEmbeddings load_external_embeddings(const std::string& path) {
  BinReader r(path);
  r.expect_magic("FEMB");
  uint32_t version = r.u32();
  if (version != 1)
    throw Error(errc::unsupported_version, path + ": version " + std::to_string(version));
  ExternalEmbeddings out;
  out.dim = r.u32();
  uint64_t count = r.u64();
  // Guards against a header promising more payload than the file holds.
  if (count > (r.file_size() - r.consumed()) / (2ull + 4ull * out.dim))
    throw Error(errc::truncated_file, path + ": count/dim exceed file size");
  for (uint64_t i = 0; i < count; ++i) {
    uint16_t id_len = r.u16();
    BaseEmbedding e;
    e.source_id = r.bytes(id_len);
    e.values.resize(out.dim);
    r.f32_array(e.values.data(), out.dim);
    double norm_sq = 0.0;
    for (float v : e.values) {
      if (!std::isfinite(v))
        throw Error(errc::malformed_record, path + ": non-finite value in '" + e.source_id + "'");
      norm_sq += static_cast<double>(v) * v;
    }
    if (norm_sq <= 0.0)
      throw Error(errc::degenerate_embedding, path + ": zero vector for '" + e.source_id + "'");
    double inv = 1.0 / std::sqrt(norm_sq);
    for (float& v : e.values) v = static_cast<float>(v * inv);
    auto id = e.source_id;
    if (!out.by_id.emplace(std::move(id), std::move(e)).second)
      throw Error(errc::duplicate_id, path + ": duplicate id");
  }
  r.expect_done();
  return out;
}

}  // namespace authorid
