#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "authorid/corpus.hpp"
#include "authorid/loss.hpp"
#include "authorid/model.hpp"

namespace authorid {

struct MetricsReport {
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
  std::optional<double> mse;  // present only when the label set is ordinal
  std::optional<double> mae;
  std::vector<std::string> classes;                // confusion axis order
  std::vector<std::vector<uint64_t>> confusion;    // rows gold, columns predicted
  size_t n = 0;

  std::string to_json() const;
  std::string confusion_csv() const;
};

// Three-class report over llm/collab/human. Macro averages run over the three
// fixed classes; a class with no predicted (or no gold) instances contributes
// precision (recall) 0. MSE/MAE use the ordinal codes llm=0, collab=1,
// human=2.
MetricsReport evaluate(std::span<const Source> predictions, std::span<const Source> gold);

// Generic string-class report (family attribution). Macro averages run over
// the classes present in gold; no ordinal metrics.
MetricsReport evaluate_classes(std::span<const std::string> predictions,
                               std::span<const std::string> gold);

struct OrderingReport {
  struct Level {
    bool defined = false;
    double mean = 0.0;
    uint64_t pairs = 0;
  };
  std::array<Level, 5> levels;

  struct Flag {
    int upper = 0;  // 1-based level index with expected larger mean
    int lower = 0;
    bool ok = false;
  };
  std::vector<Flag> monotone;  // between consecutive defined levels
  bool chain_ok = false;

  std::string to_json() const;
};

// Empirical means of the five similarity populations, anchored at fully-LLM
// records and derived from the same level-set machinery as the loss:
//   m1: (llm f, llm f)      - level-2 positives
//   m2: (llm f, llm g!=f)   - level-2 negatives
//   m3: (llm f, collab f)   - level-1 negatives with y=1, same family
//   m4: (llm f, collab g!=f)- level-1 negatives with y=1, other family
//   m5: (llm f, human)      - level-1 negatives with y=0
// Pair counts are anchor-ordered (each unordered llm/llm pair counts twice).
OrderingReport ordering_diagnostic(const std::vector<EmbeddingVector>& embeddings,
                                   std::span<const Codes> codes);

}  // namespace authorid
