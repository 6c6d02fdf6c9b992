#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "authorid/index.hpp"
#include "authorid/pipeline.hpp"
#include "authorid/rng.hpp"
#include "oracles.hpp"

using namespace authorid;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<float> random_unit_f32(SplitMix64& rng, size_t d) {
  std::vector<float> v(d);
  double norm_sq = 0.0;
  for (auto& x : v) {
    x = static_cast<float>(rng.next_double() * 2.0 - 1.0);
    norm_sq += static_cast<double>(x) * x;
  }
  float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
  for (auto& x : v) x *= inv;
  return v;
}

std::vector<IndexEntry> random_entries(SplitMix64& rng, size_t n, size_t d) {
  std::vector<IndexEntry> entries;
  for (size_t i = 0; i < n; ++i) {
    IndexEntry e;
    e.id = "e" + std::to_string(i);
    e.vector = random_unit_f32(rng, d);
    e.codes = oracle::random_codes(rng, 3);
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace

TEST_CASE("build populates the base and leaves the overlay empty") {
  SplitMix64 rng(1);
  VectorIndex idx = VectorIndex::build(random_entries(rng, 3, 8));
  CHECK(idx.size() == 3);
  CHECK(idx.base_size() == 3);
  CHECK(idx.overlay_size() == 0);
  CHECK(idx.dim() == 8);
}

TEST_CASE("build rejects bad inputs") {
  SplitMix64 rng(2);
  auto entries = random_entries(rng, 3, 8);
  entries[2].id = entries[0].id;
  CHECK_THROWS_WITH_AS(VectorIndex::build(entries), doctest::Contains("DuplicateId"), Error);

  entries = random_entries(rng, 3, 8);
  entries[1].vector.resize(4);
  CHECK_THROWS_WITH_AS(VectorIndex::build(entries), doctest::Contains("DimMismatch"), Error);

  CHECK_THROWS_WITH_AS(VectorIndex::build({}), doctest::Contains("Empty"), Error);
}

TEST_CASE("a stored vector is its own nearest neighbor") {
  SplitMix64 rng(3);
  auto entries = random_entries(rng, 20, 16);
  VectorIndex idx = VectorIndex::build(entries);
  auto hits = idx.top_k(entries[7].vector, 3);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].id == "e7");
  CHECK(hits[0].similarity == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("k beyond the store returns everything") {
  SplitMix64 rng(4);
  auto entries = random_entries(rng, 2, 8);
  VectorIndex idx = VectorIndex::build(entries);
  auto hits = idx.top_k(entries[0].vector, 5);
  CHECK(hits.size() == 2);
}

TEST_CASE("top_k matches the sort oracle exactly on random stores") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    size_t n = 20 + rng.next_below(180);
    auto entries = random_entries(rng, n, 16);
    VectorIndex idx = VectorIndex::build(entries);
    auto query = random_unit_f32(rng, 16);
    size_t k = 1 + rng.next_below(20);

    auto got = idx.top_k(query, k);
    auto want = oracle::sort_top_k(entries, query, k);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].id == want[i].id);
      CHECK(got[i].similarity == want[i].similarity);
    }
    // exactness: the tail of the ranking is below the k-th result
    if (n > k) {
      auto full = oracle::sort_top_k(entries, query, n);
      CHECK(got.back().similarity >= full[k].similarity);
    }
    for (size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].similarity >= got[i].similarity);
  }
}

TEST_CASE("exact similarity ties order by ascending id") {
  SplitMix64 rng(6);
  auto v = random_unit_f32(rng, 8);
  std::vector<IndexEntry> entries;
  for (const char* id : {"zeta", "alpha", "mid"}) {
    IndexEntry e;
    e.id = id;
    e.vector = v;
    entries.push_back(e);
  }
  VectorIndex idx = VectorIndex::build(entries);
  auto hits = idx.top_k(v, 3);
  CHECK(hits[0].id == "alpha");
  CHECK(hits[1].id == "mid");
  CHECK(hits[2].id == "zeta");
}

TEST_CASE("top_k argument validation") {
  SplitMix64 rng(7);
  VectorIndex idx = VectorIndex::build(random_entries(rng, 3, 8));
  auto q = random_unit_f32(rng, 8);
  CHECK_THROWS_WITH_AS(idx.top_k(q, 0), doctest::Contains("BadK"), Error);
  auto wrong = random_unit_f32(rng, 4);
  CHECK_THROWS_WITH_AS(idx.top_k(wrong, 2), doctest::Contains("DimMismatch"), Error);
}

TEST_CASE("add_unseen appends to the overlay without touching the base") {
  SplitMix64 rng(8);
  auto base_entries = random_entries(rng, 5, 8);
  VectorIndex idx = VectorIndex::build(base_entries);

  std::vector<IndexEntry> extra;
  for (int i = 0; i < 10; ++i) {
    IndexEntry e;
    e.id = "new" + std::to_string(i);
    e.vector = random_unit_f32(rng, 8);
    e.codes = {0, 1, 5};
    e.adapted = true;
    extra.push_back(e);
  }
  idx.add_unseen(extra);
  CHECK(idx.base_size() == 5);
  CHECK(idx.overlay_size() == 10);
  CHECK(idx.size() == 15);

  // adapted entries are reachable through search
  auto hits = idx.top_k(extra[3].vector, 1);
  CHECK(hits[0].id == "new3");
  CHECK(hits[0].adapted);

  // duplicate id anywhere is rejected
  std::vector<IndexEntry> dup = {extra[0]};
  CHECK_THROWS_WITH_AS(idx.add_unseen(dup), doctest::Contains("DuplicateId"), Error);
  IndexEntry clash = base_entries[0];
  CHECK_THROWS_WITH_AS(idx.add_unseen({clash}), doctest::Contains("DuplicateId"), Error);
}

TEST_CASE("overlay append preserves base-only rankings") {
  SplitMix64 rng(9);
  auto base_entries = random_entries(rng, 50, 16);
  VectorIndex idx = VectorIndex::build(base_entries);
  auto query = random_unit_f32(rng, 16);
  auto before = idx.top_k(query, 5);

  // an overlay entry far from the query cannot disturb the head of the list
  IndexEntry far;
  far.id = "far";
  far.vector.assign(16, 0.0f);
  for (size_t i = 0; i < 16; ++i) far.vector[i] = -query[i];
  idx.add_unseen({far});

  auto after = idx.top_k(query, 5);
  REQUIRE(after.size() == before.size());
  for (size_t i = 0; i < before.size(); ++i) {
    CHECK(after[i].id == before[i].id);
    CHECK(after[i].similarity == before[i].similarity);
  }
}

TEST_CASE("index file round-trips bitwise with provenance") {
  SplitMix64 rng(10);
  auto entries = random_entries(rng, 6, 8);
  VectorIndex idx = VectorIndex::build(entries);
  std::vector<IndexEntry> extra = {{"adapted-1", random_unit_f32(rng, 8), {1, 1, 2}, true}};
  idx.add_unseen(extra);

  std::string path = tmp_path("authorid_idx.fidx");
  idx.save(path);
  VectorIndex back = VectorIndex::load(path);
  CHECK(back.size() == 7);
  CHECK(back.base_size() == 6);
  CHECK(back.overlay_size() == 1);
  CHECK(back.entry_adapted(6));
  CHECK(back.entry_id(6) == "adapted-1");
  CHECK(back.entry_codes(6) == Codes{1, 1, 2});

  std::string path2 = tmp_path("authorid_idx2.fidx");
  back.save(path2);
  CHECK(read_text_file(path) == read_text_file(path2));
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("index file error paths") {
  SplitMix64 rng(11);
  VectorIndex idx = VectorIndex::build(random_entries(rng, 5, 8));
  std::string path = tmp_path("authorid_idx_err.fidx");
  idx.save(path);
  std::string bytes = read_text_file(path);

  {  // wrong magic
    std::string bad = bytes;
    bad[0] = 'Z';
    std::ofstream out(path, std::ios::binary);
    out.write(bad.data(), static_cast<std::streamsize>(bad.size()));
  }
  CHECK_THROWS_WITH_AS(VectorIndex::load(path), doctest::Contains("BadMagic"), Error);

  {  // count says 5 but only 4 records present
    std::string bad = bytes.substr(0, bytes.size() - (2 + 8 + 5 + 4 * 8));
    std::ofstream out(path, std::ios::binary);
    out.write(bad.data(), static_cast<std::streamsize>(bad.size()));
  }
  CHECK_THROWS_WITH_AS(VectorIndex::load(path), doctest::Contains("TruncatedFile"), Error);

  std::remove(path.c_str());
}

TEST_CASE("a base entry after an adapted one is rejected on load") {
  SplitMix64 rng(15);
  VectorIndex idx = VectorIndex::build(random_entries(rng, 2, 4));
  std::string path = tmp_path("authorid_idx_prov.fidx");
  idx.save(path);

  // mark only the first record adapted, so a base record follows it;
  // record layout: u16 id length, id, u8 x, u8 y, u16 z, u8 provenance, vector
  std::string tampered = read_text_file(path);
  size_t first_id_len = static_cast<unsigned char>(tampered[20]);
  size_t first_prov = 20 + 2 + first_id_len + 1 + 1 + 2;
  REQUIRE(tampered[first_prov] == 0);
  tampered[first_prov] = 1;
  {
    std::ofstream out(path, std::ios::binary);
    out.write(tampered.data(), static_cast<std::streamsize>(tampered.size()));
  }
  CHECK_THROWS_WITH_AS(VectorIndex::load(path), doctest::Contains("base entry after adapted"),
                       Error);
  std::remove(path.c_str());
}

TEST_CASE("concurrent readers tolerate a writer appending batches") {
  SplitMix64 rng(13);
  VectorIndex idx = VectorIndex::build(random_entries(rng, 50, 8));
  auto query = random_unit_f32(rng, 8);

  std::atomic<bool> done{false};
  std::atomic<int> bad{0};
  std::vector<std::thread> readers;
  for (int t = 0; t < 3; ++t) {
    readers.emplace_back([&] {
      while (!done.load()) {
        auto hits = idx.top_k(query, 10);
        if (hits.size() != 10) bad.fetch_add(1);
        for (size_t i = 1; i < hits.size(); ++i)
          if (hits[i - 1].similarity < hits[i].similarity) bad.fetch_add(1);
      }
    });
  }

  SplitMix64 wrng(14);
  for (int batch = 0; batch < 20; ++batch) {
    std::vector<IndexEntry> extra;
    for (int i = 0; i < 5; ++i) {
      IndexEntry e;
      e.id = "w" + std::to_string(batch) + "-" + std::to_string(i);
      e.vector = random_unit_f32(wrng, 8);
      e.codes = {0, 1, 0};
      extra.push_back(std::move(e));
    }
    idx.add_unseen(extra);
  }
  done.store(true);
  for (auto& r : readers) r.join();
  CHECK(bad.load() == 0);
  CHECK(idx.overlay_size() == 100);
}

TEST_CASE("search result similarities are reproducible") {
  SplitMix64 rng(12);
  auto entries = random_entries(rng, 30, 8);
  VectorIndex idx = VectorIndex::build(entries);
  auto query = random_unit_f32(rng, 8);
  auto a = idx.top_k(query, 10);
  auto b = idx.top_k(query, 10);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].similarity == b[i].similarity);
  }
}
