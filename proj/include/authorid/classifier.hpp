#pragma once

#include <span>
#include <string>
#include <vector>

#include "authorid/index.hpp"
#include "authorid/model.hpp"

namespace authorid {

// Soft membership distribution from similarity-weighted neighbor votes.
struct FuzzyVote {
  struct Neighbor {
    std::string id;
    double similarity = 0.0;
    double weight = 0.0;
  };

  // Class order is fixed: llm < collab < human for the 3-class vote; human
  // first then families by ascending code for the family vote. Argmax ties
  // resolve to the earlier class.
  std::vector<std::string> classes;
  std::vector<double> memberships;  // aligned with classes, sums to 1
  std::string predicted;
  std::vector<Neighbor> neighbors;

  double membership(const std::string& cls) const;
  std::string to_json() const;
};

// Temperature-softmax weights over the retrieved similarities:
// w_j = exp(s_j / tau) / sum_j' exp(s_j' / tau), computed stably. Exposed
// because its shift invariance is part of the contract.
std::vector<double> fuzzy_weights(std::span<const double> sims, double tau);

// Three-class vote over {llm, collab, human}; neighbor class from codes
// (x=0 -> llm; x=1,y=0 -> human; x=1,y=1 -> collab).
FuzzyVote fuzzy_knn_classify(const VectorIndex& index, std::span<const float> query, size_t k,
                             double tau);

// Family attribution: human when x=1,y=0, otherwise the neighbor's family
// (collaborative texts vote for their family). Classes are the families seen
// among the k neighbors; names resolved through the table when given, else
// "f<code>".
FuzzyVote classify_family(const VectorIndex& index, std::span<const float> query, size_t k,
                          double tau, const FamilyTable* names = nullptr);

// The retrieval-free path: the auxiliary head's probability that the text is
// fully LLM-generated. Kept so head-only and retrieval decisions can be
// compared on the same embedding.
double classify_direct(const ModelParams& params, const EmbeddingVector& query);

}  // namespace authorid
