#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "authorid/corpus.hpp"
#include "authorid/model.hpp"

namespace authorid {

struct LossConfig {
  double tau = 0.7;
  double alpha = 2.0;  // level 1
  double beta = 2.0;   // level 2
  double gamma = 1.0;  // level 3
  double delta = 1.0;  // level 4
  double zeta = 2.0;   // level 5

  void validate() const;  // tau > 0, coefficients >= 0
};

// Per-anchor positive/negative pools for the five constraint levels.
//
//   level 1 (anchor x=0): pos {x=0},            neg {x=1}
//   level 2 (anchor x=0): pos {x=0, same z},    neg {x=0, other z}
//   level 3 (anchor x=1): pos {x=1},            neg {x=0}
//   level 4 (anchor x=1): pos {x=1, same y},    neg {x=1, other y}
//   level 5 (anchor x=1, y=1): pos {x=1, y=1, same z}, neg {x=1, y=1, other z}
//
// The anchor is excluded from every pool. A level whose gate matches the
// anchor but whose positive pool is empty is inactive (skipped).
struct LevelSets {
  struct Level {
    bool gated = false;   // anchor satisfies the level's condition
    bool active = false;  // gated and positives non-empty
    std::vector<int> pos;
    std::vector<int> neg;
  };
  std::array<Level, 5> levels;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

LevelSets build_level_sets(std::span<const Codes> codes, int anchor);

// Averaged-positive contrastive loss from raw similarities:
//   A = exp(mean(pos)/tau), B = sum exp(neg/tau), loss = -log(A / (A + B)),
// evaluated in log-sum-exp form. Empty negatives give exactly 0.
double level_loss_from_sims(std::span<const double> pos_sims, std::span<const double> neg_sims,
                            double tau);

double level_loss(const EmbeddingVector& anchor, const std::vector<int>& pos,
                  const std::vector<int>& neg, const std::vector<EmbeddingVector>& all,
                  double tau);

struct MclResult {
  double total = 0.0;
  std::array<double, 5> level_sums{};  // coefficient-weighted contribution per level
  int skipped = 0;                     // gated levels dropped for lack of positives
};

MclResult mcl_loss(const std::vector<EmbeddingVector>& embeddings, std::span<const Codes> codes,
                   const LossConfig& config);

// Cross-entropy over p = P(fully LLM): mean of -[x==0] log p - [x==1] log(1-p)
// with p clamped to [1e-7, 1-1e-7].
double ce_loss(std::span<const double> probs, std::span<const Codes> codes);

struct LossBreakdown {
  double total = 0.0;
  double ce = 0.0;
  double mcl = 0.0;
  std::array<double, 5> level_sums{};
  int skipped = 0;
};

LossBreakdown total_loss(const std::vector<SparseVec>& bases, std::span<const Codes> codes,
                         const ModelParams& params, const LossConfig& config);

struct Gradients {
  std::vector<double> w1, b1, w2, b2, wc;
  double bc = 0.0;

  static Gradients zeros(const ModelDims& dims);
  double squared_norm() const;
  void scale(double s);
};

// Analytic gradients of total_loss with respect to every parameter array.
LossBreakdown loss_gradients(const std::vector<SparseVec>& bases, std::span<const Codes> codes,
                             const ModelParams& params, const LossConfig& config, Gradients& out);

}  // namespace authorid
