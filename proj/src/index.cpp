#include "authorid/index.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "authorid/binio.hpp"

namespace authorid {

double dot_f32(std::span<const float> a, std::span<const float> b) {
  // Four independent accumulators break the FMA latency chain; the reduction
  // order is fixed, so results are identical on every run and platform.
  const size_t n = a.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    s1 += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
    s2 += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
    s3 += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
  }
  for (; i < n; ++i) s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return (s0 + s1) + (s2 + s3);
}

void VectorIndex::append_unlocked(const IndexEntry& e) {
  if (e.vector.size() != dim_)
    throw Error(errc::dim_mismatch, "entry '" + e.id + "' has dim " +
                                        std::to_string(e.vector.size()) + ", index dim " +
                                        std::to_string(dim_));
  if (!by_id_.emplace(e.id, ids_.size()).second)
    throw Error(errc::duplicate_id, "entry id '" + e.id + "' already present");
  ids_.push_back(e.id);
  codes_.push_back(e.codes);
  vectors_.insert(vectors_.end(), e.vector.begin(), e.vector.end());
}

VectorIndex VectorIndex::build(std::vector<IndexEntry> entries) {
  if (entries.empty()) throw Error(errc::empty, "cannot build an index from zero entries");
  VectorIndex idx;
  idx.dim_ = static_cast<uint32_t>(entries.front().vector.size());
  for (const auto& e : entries) idx.append_unlocked(e);
  idx.base_count_ = idx.ids_.size();
  return idx;
}

std::vector<SearchResult> VectorIndex::top_k(std::span<const float> query, size_t k) const {
  std::shared_lock lock(*mutex_);
  if (ids_.empty()) throw Error(errc::empty_index, "top_k on an empty index");
  if (k < 1) throw Error(errc::bad_k, "k must be >= 1");
  if (query.size() != dim_)
    throw Error(errc::dim_mismatch, "query dim " + std::to_string(query.size()) +
                                        " != index dim " + std::to_string(dim_));

  const size_t n = ids_.size();
  std::vector<double> sims(n);
  for (size_t i = 0; i < n; ++i)
    sims[i] = std::clamp(dot_f32({vectors_.data() + i * dim_, dim_}, query), -1.0, 1.0);

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto better = [&](size_t a, size_t b) {
    if (sims[a] != sims[b]) return sims[a] > sims[b];
    return ids_[a] < ids_[b];
  };
  const size_t take = std::min(k, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    better);

  std::vector<SearchResult> out;
  out.reserve(take);
  for (size_t r = 0; r < take; ++r) {
    size_t i = order[r];
    out.push_back({ids_[i], codes_[i], i >= base_count_, sims[i]});
  }
  return out;
}

void VectorIndex::add_unseen(const std::vector<IndexEntry>& entries) {
  std::unique_lock lock(*mutex_);
  // Validate first so a failed batch leaves the overlay untouched.
  for (const auto& e : entries) {
    if (e.vector.size() != dim_)
      throw Error(errc::dim_mismatch, "entry '" + e.id + "' has dim " +
                                          std::to_string(e.vector.size()) + ", index dim " +
                                          std::to_string(dim_));
    if (by_id_.count(e.id))
      throw Error(errc::duplicate_id, "entry id '" + e.id + "' already present");
  }
  std::unordered_map<std::string, bool> fresh;
  for (const auto& e : entries)
    if (!fresh.emplace(e.id, true).second)
      throw Error(errc::duplicate_id, "entry id '" + e.id + "' duplicated in batch");
  for (const auto& e : entries) append_unlocked(e);
}

void VectorIndex::save(const std::string& path) const {
  std::shared_lock lock(*mutex_);
  BinWriter w(path);
  w.magic("FIDX");
  w.u32(1);
  w.u32(dim_);
  w.u64(ids_.size());
  for (size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i].size() > 0xFFFF) throw Error(errc::config_invalid, "id longer than 65535 bytes");
    w.u16(static_cast<uint16_t>(ids_[i].size()));
    w.bytes(ids_[i]);
    w.u8(codes_[i].x);
    w.u8(codes_[i].y);
    w.u16(codes_[i].z);
    w.u8(i >= base_count_ ? 1 : 0);
    const float* v = vectors_.data() + i * dim_;
    for (uint32_t o = 0; o < dim_; ++o) w.f32(v[o]);
  }
  w.close();
}

VectorIndex VectorIndex::load(const std::string& path) {
  BinReader r(path);
  r.expect_magic("FIDX");
  uint32_t version = r.u32();
  if (version != 1)
    throw Error(errc::unsupported_version, path + ": version " + std::to_string(version));

  VectorIndex idx;
  idx.dim_ = r.u32();
  uint64_t count = r.u64();
  if (count == 0) throw Error(errc::empty, path + ": index holds zero entries");
  if (count > (r.file_size() - r.consumed()) / (7ull + 4ull * idx.dim_))
    throw Error(errc::truncated_file, path + ": count/dim exceed file size");

  // Base entries precede overlay entries on disk; provenance must not
  // interleave, matching the append-only overlay contract.
  bool seen_adapted = false;
  idx.base_count_ = 0;
  for (uint64_t i = 0; i < count; ++i) {
    IndexEntry e;
    uint16_t id_len = r.u16();
    e.id = r.bytes(id_len);
    e.codes.x = r.u8();
    e.codes.y = r.u8();
    e.codes.z = r.u16();
    uint8_t prov = r.u8();
    if (prov > 1) throw Error(errc::malformed_record, path + ": bad provenance byte");
    if (prov == 0 && seen_adapted)
      throw Error(errc::malformed_record, path + ": base entry after adapted entry");
    seen_adapted = seen_adapted || prov == 1;
    e.vector.resize(idx.dim_);
    r.f32_array(e.vector.data(), idx.dim_);
    idx.append_unlocked(e);
    if (prov == 0) ++idx.base_count_;
  }
  r.expect_done();
  return idx;
}

}  // namespace authorid
