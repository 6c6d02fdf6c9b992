#pragma once

// Independent reference implementations the test suites check the library
// against. Everything here is written straight from the definitions and must
// not call into the implementation paths it verifies.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "authorid/corpus.hpp"
#include "authorid/index.hpp"
#include "authorid/loss.hpp"
#include "authorid/model.hpp"
#include "authorid/rng.hpp"

namespace oracle {

using authorid::Codes;
using authorid::EmbeddingVector;

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// Multi-level contrastive loss, brute force: loops every anchor/level/pair
// combination directly from the constraint table and evaluates the ratio form
// with plain exponentials.
// ---------------------------------------------------------------------------
inline double brute_mcl(const std::vector<EmbeddingVector>& emb, const std::vector<Codes>& codes,
                        const authorid::LossConfig& cfg) {
  const int n = static_cast<int>(codes.size());
  double total = 0.0;
  const double coeff[5] = {cfg.alpha, cfg.beta, cfg.gamma, cfg.delta, cfg.zeta};

  for (int i = 0; i < n; ++i) {
    const Codes a = codes[i];
    for (int lvl = 0; lvl < 5; ++lvl) {
      bool gated;
      switch (lvl) {
        case 0:
        case 1: gated = a.x == 0; break;
        case 2:
        case 3: gated = a.x == 1; break;
        default: gated = a.x == 1 && a.y == 1 && a.z != authorid::kNoFamily; break;
      }
      if (!gated) continue;

      std::vector<int> pos, neg;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const Codes c = codes[j];
        switch (lvl) {
          case 0:
            if (c.x == 0) pos.push_back(j);
            else neg.push_back(j);
            break;
          case 1:
            if (c.x == 0 && c.z == a.z) pos.push_back(j);
            else if (c.x == 0) neg.push_back(j);
            break;
          case 2:
            if (c.x == 1) pos.push_back(j);
            else neg.push_back(j);
            break;
          case 3:
            if (c.x == 1 && c.y == a.y) pos.push_back(j);
            else if (c.x == 1) neg.push_back(j);
            break;
          case 4:
            if (c.x == 1 && c.y == 1 && c.z == a.z) pos.push_back(j);
            else if (c.x == 1 && c.y == 1) neg.push_back(j);
            break;
        }
      }
      if (pos.empty()) continue;

      double mean = 0.0;
      for (int j : pos) mean += std::clamp(dot(emb[i].values, emb[j].values), -1.0, 1.0);
      mean /= static_cast<double>(pos.size());
      double A = std::exp(mean / cfg.tau);
      double B = 0.0;
      for (int j : neg)
        B += std::exp(std::clamp(dot(emb[i].values, emb[j].values), -1.0, 1.0) / cfg.tau);
      total += coeff[lvl] * -std::log(A / (A + B));
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Central finite differences of total_loss over every parameter entry.
// ---------------------------------------------------------------------------
struct FdGrads {
  std::vector<double> w1, b1, w2, b2, wc;
  double bc = 0.0;
};

inline FdGrads fd_gradients(const std::vector<authorid::SparseVec>& bases,
                            const std::vector<Codes>& codes, authorid::ModelParams params,
                            const authorid::LossConfig& cfg, double h) {
  auto eval = [&]() { return authorid::total_loss(bases, codes, params, cfg).total; };
  auto fd_array = [&](std::vector<double>& arr) {
    std::vector<double> g(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) {
      double keep = arr[i];
      arr[i] = keep + h;
      double up = eval();
      arr[i] = keep - h;
      double dn = eval();
      arr[i] = keep;
      g[i] = (up - dn) / (2.0 * h);
    }
    return g;
  };

  FdGrads g;
  g.w1 = fd_array(params.w1);
  g.b1 = fd_array(params.b1);
  g.w2 = fd_array(params.w2);
  g.b2 = fd_array(params.b2);
  g.wc = fd_array(params.wc);
  {
    double keep = params.bc;
    params.bc = keep + h;
    double up = eval();
    params.bc = keep - h;
    double dn = eval();
    params.bc = keep;
    g.bc = (up - dn) / (2.0 * h);
  }
  return g;
}

// Max relative error between analytic and finite-difference gradients, with a
// small absolute floor so near-zero entries do not blow up the ratio.
inline double max_rel_error(const authorid::Gradients& a, const FdGrads& f, double floor = 1e-3) {
  double worst = 0.0;
  auto cmp = [&](const std::vector<double>& x, const std::vector<double>& y) {
    for (size_t i = 0; i < x.size(); ++i) {
      double denom = std::max({std::fabs(x[i]), std::fabs(y[i]), floor});
      worst = std::max(worst, std::fabs(x[i] - y[i]) / denom);
    }
  };
  cmp(a.w1, f.w1);
  cmp(a.b1, f.b1);
  cmp(a.w2, f.w2);
  cmp(a.b2, f.b2);
  cmp(a.wc, f.wc);
  worst = std::max(worst, std::fabs(a.bc - f.bc) / std::max({std::fabs(a.bc), std::fabs(f.bc), floor}));
  return worst;
}

// ---------------------------------------------------------------------------
// Exact top-k by full sort (shares only the dot primitive with the index).
// ---------------------------------------------------------------------------
struct RankedHit {
  std::string id;
  double similarity;
};

inline std::vector<RankedHit> sort_top_k(const std::vector<authorid::IndexEntry>& entries,
                                         const std::vector<float>& query, size_t k) {
  std::vector<RankedHit> hits;
  hits.reserve(entries.size());
  for (const auto& e : entries)
    hits.push_back({e.id, std::clamp(authorid::dot_f32(e.vector, query), -1.0, 1.0)});
  std::sort(hits.begin(), hits.end(), [](const RankedHit& a, const RankedHit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.id < b.id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

// Direct evaluation of the softmax vote weights and memberships.
inline std::map<std::string, double> direct_memberships(
    const std::vector<std::pair<double, std::string>>& neighbors, double tau) {
  double z = 0.0;
  for (const auto& [s, cls] : neighbors) z += std::exp(s / tau);
  std::map<std::string, double> m;
  for (const auto& [s, cls] : neighbors) m[cls] += std::exp(s / tau) / z;
  return m;
}

// ---------------------------------------------------------------------------
// Plain AdamW written from the update rule, with the same float32 parameter
// storage contract as the trainer.
// ---------------------------------------------------------------------------
struct AdamwRef {
  std::vector<double> m, v;

  explicit AdamwRef(size_t n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::vector<double>& theta, const std::vector<double>& g, double lr, double wd,
            double b1, double b2, double eps, uint64_t warmup, uint64_t t) {
    double lr_t = lr;
    if (warmup > 0 && t < warmup) lr_t = lr * static_cast<double>(t) / static_cast<double>(warmup);
    for (size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      double mhat = m[i] / (1 - std::pow(b1, static_cast<double>(t)));
      double vhat = v[i] / (1 - std::pow(b2, static_cast<double>(t)));
      double next = theta[i] - lr_t * mhat / (std::sqrt(vhat) + eps) - lr_t * wd * theta[i];
      theta[i] = static_cast<double>(static_cast<float>(next));
    }
  }
};

// Random unit vector in d dimensions.
inline EmbeddingVector random_unit(authorid::SplitMix64& rng, size_t d) {
  EmbeddingVector e;
  e.values.resize(d);
  double norm_sq = 0.0;
  for (auto& v : e.values) {
    // Box-Muller from two uniform draws.
    double u1 = std::max(rng.next_double(), 1e-12);
    double u2 = rng.next_double();
    v = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    norm_sq += v * v;
  }
  double inv = 1.0 / std::sqrt(norm_sq);
  for (auto& v : e.values) v *= inv;
  return e;
}

inline Codes random_codes(authorid::SplitMix64& rng, uint16_t n_families) {
  uint64_t pick = rng.next_below(3);
  if (pick == 0) return {0, 1, static_cast<uint16_t>(rng.next_below(n_families))};
  if (pick == 1) return {1, 1, static_cast<uint16_t>(rng.next_below(n_families))};
  return {1, 0, authorid::kNoFamily};
}

}  // namespace oracle
