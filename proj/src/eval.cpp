#include "authorid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

namespace authorid {

using nlohmann::json;

namespace {

MetricsReport report_from_confusion(std::vector<std::string> classes,
                                    std::vector<std::vector<uint64_t>> confusion, size_t n) {
  MetricsReport r;
  r.classes = std::move(classes);
  r.confusion = std::move(confusion);
  r.n = n;

  const size_t c = r.classes.size();
  uint64_t correct = 0;
  double psum = 0.0, rsum = 0.0, fsum = 0.0;
  for (size_t k = 0; k < c; ++k) {
    uint64_t tp = r.confusion[k][k];
    correct += tp;
    uint64_t gold_total = 0, pred_total = 0;
    for (size_t j = 0; j < c; ++j) {
      gold_total += r.confusion[k][j];
      pred_total += r.confusion[j][k];
    }
    double prec = pred_total ? static_cast<double>(tp) / static_cast<double>(pred_total) : 0.0;
    double rec = gold_total ? static_cast<double>(tp) / static_cast<double>(gold_total) : 0.0;
    double f1 = (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    psum += prec;
    rsum += rec;
    fsum += f1;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  r.precision_macro = psum / static_cast<double>(c);
  r.recall_macro = rsum / static_cast<double>(c);
  r.f1_macro = fsum / static_cast<double>(c);
  return r;
}

}  // namespace

MetricsReport evaluate(std::span<const Source> predictions, std::span<const Source> gold) {
  if (predictions.size() != gold.size())
    throw Error(errc::length_mismatch, "predictions and gold have different lengths");
  if (predictions.empty()) throw Error(errc::empty, "nothing to evaluate");

  std::vector<std::vector<uint64_t>> conf(3, std::vector<uint64_t>(3, 0));
  double se = 0.0, ae = 0.0;
  for (size_t i = 0; i < gold.size(); ++i) {
    conf[static_cast<size_t>(gold[i])][static_cast<size_t>(predictions[i])]++;
    double diff = ordinal_code(predictions[i]) - ordinal_code(gold[i]);
    se += diff * diff;
    ae += std::abs(diff);
  }
  MetricsReport r =
      report_from_confusion({"llm", "collab", "human"}, std::move(conf), gold.size());
  r.mse = se / static_cast<double>(gold.size());
  r.mae = ae / static_cast<double>(gold.size());
  return r;
}

MetricsReport evaluate_classes(std::span<const std::string> predictions,
                               std::span<const std::string> gold) {
  if (predictions.size() != gold.size())
    throw Error(errc::length_mismatch, "predictions and gold have different lengths");
  if (predictions.empty()) throw Error(errc::empty, "nothing to evaluate");

  // Macro averages run over gold classes; stray predicted labels get a
  // catch-all column so the confusion matrix still sums to n.
  std::map<std::string, size_t> slot;
  for (const auto& g : gold) slot.emplace(g, 0);
  std::vector<std::string> classes;
  for (auto& [name, s] : slot) {
    s = classes.size();
    classes.push_back(name);
  }
  const size_t c_gold = classes.size();
  bool stray = false;
  for (const auto& p : predictions)
    if (!slot.count(p)) stray = true;
  size_t cols = c_gold + (stray ? 1 : 0);
  if (stray) classes.push_back("(other)");

  std::vector<std::vector<uint64_t>> conf(classes.size(), std::vector<uint64_t>(cols, 0));
  for (size_t i = 0; i < gold.size(); ++i) {
    size_t gi = slot[gold[i]];
    auto it = slot.find(predictions[i]);
    size_t pi = it != slot.end() ? it->second : c_gold;
    conf[gi][pi]++;
  }

  MetricsReport r;
  r.classes = classes;
  r.confusion = conf;
  r.n = gold.size();
  uint64_t correct = 0;
  double psum = 0.0, rsum = 0.0, fsum = 0.0;
  for (size_t k = 0; k < c_gold; ++k) {
    uint64_t tp = conf[k][k];
    correct += tp;
    uint64_t gold_total = 0, pred_total = 0;
    for (size_t j = 0; j < cols; ++j) gold_total += conf[k][j];
    for (size_t j = 0; j < classes.size(); ++j) pred_total += conf[j][k];
    double prec = pred_total ? static_cast<double>(tp) / static_cast<double>(pred_total) : 0.0;
    double rec = gold_total ? static_cast<double>(tp) / static_cast<double>(gold_total) : 0.0;
    double f1 = (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    psum += prec;
    rsum += rec;
    fsum += f1;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);
  r.precision_macro = psum / static_cast<double>(c_gold);
  r.recall_macro = rsum / static_cast<double>(c_gold);
  r.f1_macro = fsum / static_cast<double>(c_gold);
  return r;
}

std::string MetricsReport::to_json() const {
  json j;
  j["accuracy"] = accuracy;
  j["precision_macro"] = precision_macro;
  j["recall_macro"] = recall_macro;
  j["f1_macro"] = f1_macro;
  if (mse) j["mse"] = *mse;
  if (mae) j["mae"] = *mae;
  j["n"] = n;
  j["classes"] = classes;
  j["confusion"] = confusion;
  return j.dump();
}

std::string MetricsReport::confusion_csv() const {
  std::ostringstream out;
  out << "gold\\pred";
  for (const auto& c : classes) out << ',' << c;
  out << '\n';
  for (size_t g = 0; g < confusion.size(); ++g) {
    out << classes[g];
    for (uint64_t v : confusion[g]) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

OrderingReport ordering_diagnostic(const std::vector<EmbeddingVector>& embeddings,
                                   std::span<const Codes> codes) {
  if (embeddings.size() != codes.size())
    throw Error(errc::length_mismatch, "embeddings and codes length differ");
  if (embeddings.size() < 2)
    throw Error(errc::insufficient_pairs, "need at least 2 samples");

  std::array<double, 5> sums{};
  std::array<uint64_t, 5> counts{};
  const int n = static_cast<int>(codes.size());

  for (int i = 0; i < n; ++i) {
    if (codes[i].x != 0) continue;  // populations are anchored at fully-LLM records
    LevelSets sets = build_level_sets(codes, i);
    auto add = [&](int bucket, int j) {
      sums[bucket] += cosine_similarity(embeddings[i].values, embeddings[j].values);
      counts[bucket] += 1;
    };
    for (int j : sets.levels[1].pos) add(0, j);
    for (int j : sets.levels[1].neg) add(1, j);
    for (int j : sets.levels[0].neg) {
      if (codes[j].y == 1 && codes[j].z != kNoFamily)
        add(codes[j].z == codes[i].z ? 2 : 3, j);
      else
        add(4, j);
    }
  }

  OrderingReport report;
  for (int l = 0; l < 5; ++l) {
    report.levels[l].pairs = counts[l];
    report.levels[l].defined = counts[l] > 0;
    if (counts[l] > 0) report.levels[l].mean = sums[l] / static_cast<double>(counts[l]);
  }
  report.chain_ok = true;
  int prev = -1;
  for (int l = 0; l < 5; ++l) {
    if (!report.levels[l].defined) continue;
    if (prev >= 0) {
      bool ok = report.levels[prev].mean >= report.levels[l].mean;
      report.monotone.push_back({prev + 1, l + 1, ok});
      report.chain_ok = report.chain_ok && ok;
    }
    prev = l;
  }
  if (report.monotone.empty()) report.chain_ok = false;
  return report;
}

std::string OrderingReport::to_json() const {
  json j;
  json levels_json = json::array();
  for (int l = 0; l < 5; ++l) {
    json lj;
    lj["level"] = l + 1;
    lj["defined"] = levels[l].defined;
    lj["pairs"] = levels[l].pairs;
    if (levels[l].defined) lj["mean"] = levels[l].mean;
    levels_json.push_back(lj);
  }
  j["levels"] = levels_json;
  json flags = json::array();
  for (const auto& f : monotone)
    flags.push_back({{"upper", f.upper}, {"lower", f.lower}, {"ok", f.ok}});
  j["monotone"] = flags;
  j["chain_ok"] = chain_ok;
  return j.dump();
}

}  // namespace authorid
