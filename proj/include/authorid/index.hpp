#pragma once

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "authorid/corpus.hpp"
#include "authorid/errors.hpp"

namespace authorid {

struct IndexEntry {
  std::string id;
  std::vector<float> vector;  // unit norm, float32 storage
  Codes codes;
  bool adapted = false;  // false: base store, true: training-free overlay
};

struct SearchResult {
  std::string id;
  Codes codes;
  bool adapted = false;
  double similarity = 0.0;
};

// Shared similarity primitive: dot product of float32 vectors accumulated in
// double, in index order. Both the index and its test oracles use this, so
// result ordering disagreements can only come from selection logic.
double dot_f32(std::span<const float> a, std::span<const float> b);

// Exact-search vector store. The base section is immutable after build/load;
// add_unseen appends to the overlay only. Readers and the single writer are
// serialized by a shared mutex so no reader observes a partial append.
class VectorIndex {
public:
  static VectorIndex build(std::vector<IndexEntry> entries);

  // Exact top-k by cosine similarity over base + overlay, descending, ties by
  // ascending id. k larger than the store returns everything.
  std::vector<SearchResult> top_k(std::span<const float> query, size_t k) const;

  void add_unseen(const std::vector<IndexEntry>& entries);

  // FIDX file: magic "FIDX", u32 version=1, u32 dim, u64 count, then per
  // record u16 id length, id bytes, u8 x, u8 y, u16 z (0xFFFF = none),
  // u8 provenance (0 base / 1 adapted), dim float32 LE values.
  void save(const std::string& path) const;
  static VectorIndex load(const std::string& path);

  uint32_t dim() const { return dim_; }
  size_t size() const { return ids_.size(); }
  size_t base_size() const { return base_count_; }
  size_t overlay_size() const { return ids_.size() - base_count_; }

  const std::string& entry_id(size_t i) const { return ids_[i]; }
  Codes entry_codes(size_t i) const { return codes_[i]; }
  bool entry_adapted(size_t i) const { return i >= base_count_; }
  std::span<const float> entry_vector(size_t i) const {
    return {vectors_.data() + i * dim_, dim_};
  }

  VectorIndex(VectorIndex&&) noexcept = default;
  VectorIndex& operator=(VectorIndex&&) noexcept = default;

private:
  VectorIndex() : mutex_(std::make_unique<std::shared_mutex>()) {}

  void append_unlocked(const IndexEntry& e);

  uint32_t dim_ = 0;
  size_t base_count_ = 0;
  std::vector<std::string> ids_;
  std::vector<Codes> codes_;
  std::vector<float> vectors_;  // flat, size() * dim_
  std::unordered_map<std::string, size_t> by_id_;
  std::unique_ptr<std::shared_mutex> mutex_;
};

}  // namespace authorid
