#include "authorid/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

namespace authorid {

double FuzzyVote::membership(const std::string& cls) const {
  for (size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == cls) return memberships[i];
  return 0.0;
}

std::string FuzzyVote::to_json() const {
  nlohmann::json j;
  j["predicted"] = predicted;
  nlohmann::json m;
  for (size_t i = 0; i < classes.size(); ++i) m[classes[i]] = memberships[i];
  j["memberships"] = m;
  nlohmann::json ns = nlohmann::json::array();
  for (const auto& n : neighbors)
    ns.push_back({{"id", n.id}, {"similarity", n.similarity}, {"weight", n.weight}});
  j["neighbors"] = ns;
  return j.dump();
}

std::vector<double> fuzzy_weights(std::span<const double> sims, double tau) {
  if (!(tau > 0.0)) throw Error(errc::config_invalid, "tau must be positive");
  if (sims.empty()) throw Error(errc::empty_batch, "no similarities to weight");
  double m = -std::numeric_limits<double>::infinity();
  for (double s : sims) m = std::max(m, s / tau);
  std::vector<double> w(sims.size());
  double z = 0.0;
  for (size_t i = 0; i < sims.size(); ++i) {
    w[i] = std::exp(sims[i] / tau - m);
    z += w[i];
  }
  for (double& v : w) v /= z;
  return w;
}

namespace {

FuzzyVote vote_from_results(const std::vector<SearchResult>& results, double tau,
                            std::vector<std::string> classes,
                            const std::vector<size_t>& class_of_neighbor) {
  std::vector<double> sims(results.size());
  for (size_t i = 0; i < results.size(); ++i) sims[i] = results[i].similarity;
  std::vector<double> w = fuzzy_weights(sims, tau);

  FuzzyVote vote;
  vote.classes = std::move(classes);
  vote.memberships.assign(vote.classes.size(), 0.0);
  for (size_t i = 0; i < results.size(); ++i) {
    vote.memberships[class_of_neighbor[i]] += w[i];
    vote.neighbors.push_back({results[i].id, results[i].similarity, w[i]});
  }
  size_t best = 0;
  for (size_t c = 1; c < vote.memberships.size(); ++c)
    if (vote.memberships[c] > vote.memberships[best]) best = c;
  vote.predicted = vote.classes[best];
  return vote;
}

Source coarse_class(const Codes& c) {
  if (c.x == 0) return Source::llm;
  return c.y == 0 ? Source::human : Source::collab;
}

}  // namespace

FuzzyVote fuzzy_knn_classify(const VectorIndex& index, std::span<const float> query, size_t k,
                             double tau) {
  auto results = index.top_k(query, k);
  std::vector<size_t> cls(results.size());
  for (size_t i = 0; i < results.size(); ++i)
    cls[i] = static_cast<size_t>(coarse_class(results[i].codes));
  return vote_from_results(results, tau, {"llm", "collab", "human"}, cls);
}

FuzzyVote classify_family(const VectorIndex& index, std::span<const float> query, size_t k,
                          double tau, const FamilyTable* names) {
  auto results = index.top_k(query, k);

  auto family_name = [&](uint16_t code) -> std::string {
    if (names && code < names->size()) return names->name(code);
    return "f" + std::to_string(code);
  };

  // Class order: human first, then families by ascending code.
  bool any_human = false;
  std::map<uint16_t, size_t> family_slot;
  for (const auto& r : results) {
    if (r.codes.x == 1 && r.codes.y == 0)
      any_human = true;
    else
      family_slot.emplace(r.codes.z, 0);
  }
  std::vector<std::string> classes;
  if (any_human) classes.push_back("human");
  for (auto& [code, slot] : family_slot) {
    slot = classes.size();
    classes.push_back(family_name(code));
  }

  std::vector<size_t> cls(results.size());
  for (size_t i = 0; i < results.size(); ++i) {
    const Codes& c = results[i].codes;
    cls[i] = (c.x == 1 && c.y == 0) ? 0 : family_slot[c.z];
  }
  return vote_from_results(results, tau, std::move(classes), cls);
}

double classify_direct(const ModelParams& params, const EmbeddingVector& query) {
  return classify_prob(params, query.values);
}

}  // namespace authorid
