#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "authorid/binio.hpp"
#include "authorid/encoder.hpp"
#include "authorid/pipeline.hpp"
#include "authorid/rng.hpp"

using namespace authorid;

namespace {

double norm(const std::vector<float>& v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("single bigram lands in exactly one bucket with unit norm") {
  BaseEmbedding e = hash_ngram_embed("aa", 256, {2, 2});
  int nonzero = 0;
  for (float v : e.values)
    if (v != 0.0f) ++nonzero;
  CHECK(nonzero == 1);
  CHECK(norm(e.values) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("identical text embeds identically") {
  BaseEmbedding a = hash_ngram_embed("the quick brown fox", 1024, {2, 4});
  BaseEmbedding b = hash_ngram_embed("the quick brown fox", 1024, {2, 4});
  CHECK(a.values == b.values);
}

TEST_CASE("fixture cosine regression") {
  // Frozen from an independent evaluation of the documented hashing scheme.
  BaseEmbedding a = hash_ngram_embed("the quick brown fox jumps over the lazy dog", 256, {2, 4});
  BaseEmbedding b = hash_ngram_embed("pack my box with five dozen liquor jugs", 256, {2, 4});
  double cos = cosine(a.values, b.values);
  CHECK(cos == doctest::Approx(0.14179294184487834).epsilon(1e-6));
  CHECK(cos < 1.0);
}

TEST_CASE("unit norm holds across random inputs") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    size_t len = 1 + rng.next_below(200);
    for (size_t i = 0; i < len; ++i) text += static_cast<char>('a' + rng.next_below(26));
    BaseEmbedding e = hash_ngram_embed(text, 512, {2, 4});
    CHECK(norm(e.values) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("order matters: equal character multisets embed differently") {
  BaseEmbedding a = hash_ngram_embed("abab", 256, {2, 2});
  BaseEmbedding b = hash_ngram_embed("baba", 256, {2, 2});
  CHECK(a.values != b.values);
}

TEST_CASE("short text falls back to a whole-string gram") {
  BaseEmbedding e = hash_ngram_embed("a", 256, {2, 4});
  CHECK(norm(e.values) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("argument validation") {
  CHECK_THROWS_WITH_AS(hash_ngram_embed("  ", 256, {2, 4}), doctest::Contains("EmptyText"), Error);
  CHECK_THROWS_WITH_AS(hash_ngram_embed("x", 100, {2, 4}), doctest::Contains("DimOutOfRange"),
                       Error);
  CHECK_THROWS_WITH_AS(hash_ngram_embed("x", 64, {2, 4}), doctest::Contains("DimOutOfRange"),
                       Error);
  CHECK_THROWS_WITH_AS(hash_ngram_embed("x", 1u << 21, {2, 4}),
                       doctest::Contains("DimOutOfRange"), Error);
  CHECK_THROWS_WITH_AS(hash_ngram_embed("x", 256, {3, 2}), doctest::Contains("ConfigInvalid"),
                       Error);
}

TEST_CASE("embedding file round-trips") {
  std::string path = tmp_path("authorid_test.femb");
  std::vector<BaseEmbedding> embs;
  for (int i = 0; i < 3; ++i) {
    BaseEmbedding e = hash_ngram_embed("text number " + std::to_string(i), 256, {2, 3});
    e.source_id = "doc-" + std::to_string(i);
    embs.push_back(e);
  }
  save_embeddings(embs, 256, path);

  ExternalEmbeddings back = load_external_embeddings(path);
  CHECK(back.dim == 256);
  CHECK(back.by_id.size() == 3);
  for (const auto& e : embs) {
    const auto& r = back.by_id.at(e.source_id);
    for (size_t i = 0; i < e.values.size(); ++i)
      CHECK(r.values[i] == doctest::Approx(e.values[i]).epsilon(1e-6));
  }

  // file-level round trip: saving what was loaded reproduces the bytes
  std::string path2 = tmp_path("authorid_test2.femb");
  std::vector<BaseEmbedding> again;
  for (const auto& e : embs) again.push_back(back.by_id.at(e.source_id));
  save_embeddings(again, 256, path2);
  CHECK(read_text_file(path) == read_text_file(path2));

  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("zero-count embedding file loads as an empty map") {
  std::string path = tmp_path("authorid_empty.femb");
  save_embeddings({}, 128, path);
  ExternalEmbeddings back = load_external_embeddings(path);
  CHECK(back.by_id.empty());
  CHECK(back.dim == 128);
  std::remove(path.c_str());
}

TEST_CASE("malformed embedding files are rejected") {
  std::string path = tmp_path("authorid_bad.femb");

  {  // wrong magic
    BinWriter w(path);
    w.magic("NOPE");
    w.u32(1);
    w.u32(256);
    w.u64(0);
    w.close();
    CHECK_THROWS_WITH_AS(load_external_embeddings(path), doctest::Contains("BadMagic"), Error);
  }
  {  // unsupported version
    BinWriter w(path);
    w.magic("FEMB");
    w.u32(9);
    w.u32(256);
    w.u64(0);
    w.close();
    CHECK_THROWS_WITH_AS(load_external_embeddings(path), doctest::Contains("UnsupportedVersion"),
                         Error);
  }
  {  // header dim 128 but only 64 floats in the single row
    BinWriter w(path);
    w.magic("FEMB");
    w.u32(1);
    w.u32(128);
    w.u64(1);
    w.u16(2);
    w.bytes("ab");
    for (int i = 0; i < 64; ++i) w.f32(1.0f);
    w.close();
    CHECK_THROWS_WITH_AS(load_external_embeddings(path), doctest::Contains("TruncatedFile"),
                         Error);
  }
  {  // duplicate id
    BinWriter w(path);
    w.magic("FEMB");
    w.u32(1);
    w.u32(4);
    w.u64(2);
    for (int rep = 0; rep < 2; ++rep) {
      w.u16(2);
      w.bytes("ab");
      for (int i = 0; i < 4; ++i) w.f32(0.5f);
    }
    w.close();
    CHECK_THROWS_WITH_AS(load_external_embeddings(path), doctest::Contains("DuplicateId"), Error);
  }
  std::remove(path.c_str());
}

TEST_CASE("vectors are re-normalized on load") {
  std::string path = tmp_path("authorid_norm.femb");
  BinWriter w(path);
  w.magic("FEMB");
  w.u32(1);
  w.u32(4);
  w.u64(1);
  w.u16(1);
  w.bytes("x");
  w.f32(3.0f);
  w.f32(0.0f);
  w.f32(4.0f);
  w.f32(0.0f);
  w.close();

  ExternalEmbeddings back = load_external_embeddings(path);
  const auto& v = back.by_id.at("x").values;
  CHECK(v[0] == doctest::Approx(0.6f));
  CHECK(v[2] == doctest::Approx(0.8f));
  std::remove(path.c_str());
}
