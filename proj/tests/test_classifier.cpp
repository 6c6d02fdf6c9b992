#include <doctest.h>

#include <cmath>

#include "authorid/classifier.hpp"
#include "authorid/rng.hpp"
#include "oracles.hpp"

using namespace authorid;

namespace {

std::vector<float> unit2(double angle) {
  return {static_cast<float>(std::cos(angle)), static_cast<float>(std::sin(angle))};
}

VectorIndex angle_index(const std::vector<std::pair<double, Codes>>& spec) {
  std::vector<IndexEntry> entries;
  int i = 0;
  for (const auto& [angle, codes] : spec) {
    IndexEntry e;
    e.id = "n" + std::to_string(i++);
    e.vector = unit2(angle);
    e.codes = codes;
    entries.push_back(e);
  }
  return VectorIndex::build(entries);
}

const Codes kLlm0{0, 1, 0};
const Codes kLlm1{0, 1, 1};
const Codes kCollab0{1, 1, 0};
const Codes kHuman{1, 0, kNoFamily};

}  // namespace

TEST_CASE("unanimous neighborhood gives membership one") {
  VectorIndex idx = angle_index({{0.1, kLlm0}, {0.2, kLlm1}, {0.3, kLlm0}});
  FuzzyVote v = fuzzy_knn_classify(idx, unit2(0.15), 3, 0.7);
  CHECK(v.predicted == "llm");
  CHECK(v.membership("llm") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v.membership("collab") == 0.0);
  CHECK(v.membership("human") == 0.0);
  double sum = 0.0;
  for (double m : v.memberships) sum += m;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("k=1 reduces to the nearest neighbor") {
  VectorIndex idx = angle_index({{0.0, kHuman}, {1.5, kLlm0}});
  FuzzyVote v = fuzzy_knn_classify(idx, unit2(0.1), 1, 0.7);
  CHECK(v.predicted == "human");
  CHECK(v.membership("human") == 1.0);
  CHECK(v.neighbors.size() == 1);
  CHECK(v.neighbors[0].id == "n0");
}

TEST_CASE("three-neighbor vote matches the frozen weight-formula value") {
  // neighbors at similarities 0.9 (llm), 0.8 (human), 0.7 (llm), tau = 0.7;
  // frozen from a direct evaluation of the softmax weights
  std::vector<double> sims = {0.9, 0.8, 0.7};
  std::vector<double> w = fuzzy_weights(sims, 0.7);
  CHECK(w[0] + w[2] == doctest::Approx(0.6689227259443232).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.3310772740556767).epsilon(1e-12));

  // and through the full classify path with vectors realizing the same sims
  double a = std::acos(0.9), b = std::acos(0.8), c = std::acos(0.7);
  VectorIndex idx = angle_index({{a, kLlm0}, {-b, kHuman}, {c, kLlm1}});
  FuzzyVote v = fuzzy_knn_classify(idx, unit2(0.0), 3, 0.7);
  CHECK(v.predicted == "llm");
  CHECK(v.membership("llm") == doctest::Approx(0.6689227259443232).epsilon(1e-6));
  CHECK(v.membership("human") == doctest::Approx(0.3310772740556767).epsilon(1e-6));
}

TEST_CASE("weights are invariant to a constant similarity shift") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    size_t k = 2 + rng.next_below(10);
    std::vector<double> sims(k), shifted(k);
    double c = rng.next_double() * 4.0 - 2.0;
    for (size_t i = 0; i < k; ++i) {
      sims[i] = rng.next_double() * 2.0 - 1.0;
      shifted[i] = sims[i] + c;
    }
    auto w1 = fuzzy_weights(sims, 0.7);
    auto w2 = fuzzy_weights(shifted, 0.7);
    for (size_t i = 0; i < k; ++i) CHECK(w1[i] == doctest::Approx(w2[i]).epsilon(1e-12));
  }
}

TEST_CASE("huge temperature degrades to frequency voting") {
  VectorIndex idx = angle_index(
      {{0.1, kLlm0}, {0.4, kLlm0}, {0.7, kLlm1}, {1.0, kHuman}, {1.3, kCollab0}});
  FuzzyVote v = fuzzy_knn_classify(idx, unit2(0.0), 5, 1e6);
  CHECK(v.membership("llm") == doctest::Approx(3.0 / 5.0).epsilon(1e-6));
  CHECK(v.membership("human") == doctest::Approx(1.0 / 5.0).epsilon(1e-6));
  CHECK(v.membership("collab") == doctest::Approx(1.0 / 5.0).epsilon(1e-6));
}

TEST_CASE("prediction is invariant to duplicating the store when k doubles") {
  SplitMix64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<IndexEntry> entries;
    size_t n = 6 + rng.next_below(10);
    for (size_t i = 0; i < n; ++i) {
      IndexEntry e;
      e.id = "a" + std::to_string(i);
      double angle = rng.next_double() * 2.0 * M_PI;
      e.vector = unit2(angle);
      e.codes = oracle::random_codes(rng, 2);
      entries.push_back(e);
    }
    VectorIndex idx = VectorIndex::build(entries);

    std::vector<IndexEntry> doubled = entries;
    for (auto e : entries) {
      e.id = "b" + e.id.substr(1);
      doubled.push_back(e);
    }
    VectorIndex idx2 = VectorIndex::build(doubled);

    auto q = unit2(rng.next_double() * 2.0 * M_PI);
    size_t k = 3;
    FuzzyVote v1 = fuzzy_knn_classify(idx, q, k, 0.7);
    FuzzyVote v2 = fuzzy_knn_classify(idx2, q, 2 * k, 0.7);
    CHECK(v1.predicted == v2.predicted);
    for (size_t c = 0; c < v1.classes.size(); ++c)
      CHECK(v1.memberships[c] == doctest::Approx(v2.memberships[c]).epsilon(1e-9));
  }
}

TEST_CASE("family attribution") {
  FamilyTable names;
  names.add("GPT");
  names.add("Gemini");

  SUBCASE("all one family regardless of llm or collab") {
    VectorIndex idx = angle_index({{0.1, kLlm0}, {0.2, kCollab0}, {0.3, kLlm0}});
    FuzzyVote v = classify_family(idx, unit2(0.15), 3, 0.7, &names);
    CHECK(v.predicted == "GPT");
    CHECK(v.membership("GPT") == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("nearest human wins at k=1") {
    VectorIndex idx = angle_index({{0.0, kHuman}, {1.0, kLlm1}});
    FuzzyVote v = classify_family(idx, unit2(0.05), 1, 0.7, &names);
    CHECK(v.predicted == "human");
  }

  SUBCASE("mixed neighborhood equals the direct weight formula") {
    double a = std::acos(0.9), b = std::acos(0.8), c = std::acos(0.7);
    VectorIndex idx = angle_index({{a, kLlm0}, {-b, kHuman}, {c, kLlm1}});
    FuzzyVote v = classify_family(idx, unit2(0.0), 3, 0.7, &names);

    auto want = oracle::direct_memberships({{0.9, "GPT"}, {0.8, "human"}, {0.7, "Gemini"}}, 0.7);
    CHECK(v.membership("GPT") == doctest::Approx(want["GPT"]).epsilon(1e-6));
    CHECK(v.membership("human") == doctest::Approx(want["human"]).epsilon(1e-6));
    CHECK(v.membership("Gemini") == doctest::Approx(want["Gemini"]).epsilon(1e-6));
    CHECK(v.predicted == "GPT");
  }

  SUBCASE("unnamed codes fall back to f<code>") {
    VectorIndex idx = angle_index({{0.1, Codes{0, 1, 7}}, {0.2, Codes{0, 1, 7}}});
    FuzzyVote v = classify_family(idx, unit2(0.15), 2, 0.7, nullptr);
    CHECK(v.predicted == "f7");
  }
}

TEST_CASE("classify_direct delegates to the auxiliary head bit for bit") {
  ModelDims dims{8, 4, 3};
  ModelParams p = init_params(dims, 3);
  EmbeddingVector e{{0.6, -0.64, 0.48}};
  CHECK(classify_direct(p, e) == classify_prob(p, e.values));

  std::fill(p.wc.begin(), p.wc.end(), 0.0);
  p.bc = 0.0;
  CHECK(classify_direct(p, e) == 0.5);

  // thresholding at 0.5 yields a binary decision
  p.bc = 1.0;
  CHECK((classify_direct(p, e) > 0.5));
  p.bc = -1.0;
  CHECK((classify_direct(p, e) < 0.5));
}

TEST_CASE("argument validation") {
  VectorIndex idx = angle_index({{0.1, kLlm0}});
  CHECK_THROWS_WITH_AS(fuzzy_knn_classify(idx, unit2(0.0), 0, 0.7), doctest::Contains("BadK"),
                       Error);
  CHECK_THROWS_WITH_AS(fuzzy_knn_classify(idx, unit2(0.0), 1, 0.0),
                       doctest::Contains("ConfigInvalid"), Error);
}

TEST_CASE("vote serializes to the declared json shape") {
  VectorIndex idx = angle_index({{0.1, kLlm0}, {0.5, kHuman}});
  FuzzyVote v = fuzzy_knn_classify(idx, unit2(0.0), 2, 0.7);
  std::string j = v.to_json();
  CHECK(j.find("\"predicted\"") != std::string::npos);
  CHECK(j.find("\"memberships\"") != std::string::npos);
  CHECK(j.find("\"neighbors\"") != std::string::npos);
  CHECK(j.find("\"similarity\"") != std::string::npos);
  CHECK(j.find("\"weight\"") != std::string::npos);
}
