#include "authorid/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace authorid {

namespace {

constexpr double kProbClamp = 1e-7;

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double log_sum_exp(std::span<const double> xs) {
  double m = xs[0];
  for (double x : xs) m = std::max(m, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

void LossConfig::validate() const {
  if (!(tau > 0.0)) throw Error(errc::config_invalid, "tau must be positive");
  if (alpha < 0 || beta < 0 || gamma < 0 || delta < 0 || zeta < 0)
    throw Error(errc::config_invalid, "level coefficients must be non-negative");
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(errc::dim_mismatch, "cosine_similarity on vectors of different dims");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return std::clamp(s, -1.0, 1.0);
}

LevelSets build_level_sets(std::span<const Codes> codes, int anchor) {
  if (codes.size() < 2) throw Error(errc::batch_too_small, "need at least 2 samples");
  if (anchor < 0 || static_cast<size_t>(anchor) >= codes.size())
    throw Error(errc::config_invalid, "anchor index out of range");

  const Codes a = codes[anchor];
  LevelSets sets;
  auto& lv = sets.levels;

  lv[0].gated = lv[1].gated = a.x == 0;
  lv[2].gated = lv[3].gated = a.x == 1;
  lv[4].gated = a.x == 1 && a.y == 1 && a.z != kNoFamily;

  for (int j = 0; j < static_cast<int>(codes.size()); ++j) {
    if (j == anchor) continue;
    const Codes c = codes[j];
    if (a.x == 0) {
      (c.x == 0 ? lv[0].pos : lv[0].neg).push_back(j);
      if (c.x == 0) (c.z == a.z ? lv[1].pos : lv[1].neg).push_back(j);
    } else {
      (c.x == 1 ? lv[2].pos : lv[2].neg).push_back(j);
      if (c.x == 1) (c.y == a.y ? lv[3].pos : lv[3].neg).push_back(j);
      if (lv[4].gated && c.x == 1 && c.y == 1) (c.z == a.z ? lv[4].pos : lv[4].neg).push_back(j);
    }
  }
  for (auto& level : sets.levels) level.active = level.gated && !level.pos.empty();
  return sets;
}

double level_loss_from_sims(std::span<const double> pos_sims, std::span<const double> neg_sims,
                            double tau) {
  if (!(tau > 0.0)) throw Error(errc::config_invalid, "tau must be positive");
  if (pos_sims.empty()) throw Error(errc::empty_positives, "positive set is empty");
  if (neg_sims.empty()) return 0.0;

  double mean_pos = 0.0;
  for (double s : pos_sims) mean_pos += s;
  mean_pos /= static_cast<double>(pos_sims.size());

  std::vector<double> scaled(neg_sims.size());
  for (size_t i = 0; i < neg_sims.size(); ++i) scaled[i] = neg_sims[i] / tau;
  return softplus(log_sum_exp(scaled) - mean_pos / tau);
}

double level_loss(const EmbeddingVector& anchor, const std::vector<int>& pos,
                  const std::vector<int>& neg, const std::vector<EmbeddingVector>& all,
                  double tau) {
  std::vector<double> ps, ns;
  ps.reserve(pos.size());
  ns.reserve(neg.size());
  for (int j : pos) ps.push_back(cosine_similarity(anchor.values, all[j].values));
  for (int j : neg) ns.push_back(cosine_similarity(anchor.values, all[j].values));
  return level_loss_from_sims(ps, ns, tau);
}

namespace {

std::array<double, 5> level_coeffs(const LossConfig& c) {
  return {c.alpha, c.beta, c.gamma, c.delta, c.zeta};
}

// Shared core: accumulates the weighted multi-level loss and, when grad_s is
// non-null, the d(loss)/d(similarity) matrix entries at [anchor * n + k].
MclResult mcl_core(std::span<const Codes> codes,
                   const std::vector<std::vector<double>>& sims, const LossConfig& config,
                   std::vector<double>* grad_s) {
  const int n = static_cast<int>(codes.size());
  if (n < 2) throw Error(errc::batch_too_small, "need at least 2 samples");
  config.validate();

  const auto coeff = level_coeffs(config);
  const double tau = config.tau;
  MclResult result;

  for (int i = 0; i < n; ++i) {
    LevelSets sets = build_level_sets(codes, i);
    for (int lvl = 0; lvl < 5; ++lvl) {
      const auto& level = sets.levels[lvl];
      if (!level.gated) continue;
      if (!level.active) {
        ++result.skipped;
        continue;
      }
      if (coeff[lvl] == 0.0) continue;

      double mean_pos = 0.0;
      for (int j : level.pos) mean_pos += sims[i][j];
      mean_pos /= static_cast<double>(level.pos.size());

      double term = 0.0;
      if (!level.neg.empty()) {
        double m = -std::numeric_limits<double>::infinity();
        for (int j : level.neg) m = std::max(m, sims[i][j] / tau);
        double sum = 0.0;
        for (int j : level.neg) sum += std::exp(sims[i][j] / tau - m);
        double log_b = m + std::log(sum);
        double r = log_b - mean_pos / tau;
        term = softplus(r);

        if (grad_s) {
          double sr = sigmoid(r);
          double gpos = -sr / (static_cast<double>(level.pos.size()) * tau) * coeff[lvl];
          for (int j : level.pos) (*grad_s)[static_cast<size_t>(i) * n + j] += gpos;
          for (int j : level.neg) {
            double softmax_b = std::exp(sims[i][j] / tau - log_b);
            (*grad_s)[static_cast<size_t>(i) * n + j] += coeff[lvl] * sr * softmax_b / tau;
          }
        }
      }
      result.level_sums[lvl] += coeff[lvl] * term;
      result.total += coeff[lvl] * term;
    }
  }
  return result;
}

std::vector<std::vector<double>> sim_matrix(const std::vector<EmbeddingVector>& embeddings) {
  const size_t n = embeddings.size();
  std::vector<std::vector<double>> sims(n, std::vector<double>(n, 1.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double s = cosine_similarity(embeddings[i].values, embeddings[j].values);
      sims[i][j] = s;
      sims[j][i] = s;
    }
  return sims;
}

}  // namespace

MclResult mcl_loss(const std::vector<EmbeddingVector>& embeddings, std::span<const Codes> codes,
                   const LossConfig& config) {
  if (embeddings.size() != codes.size())
    throw Error(errc::length_mismatch, "embeddings and codes length differ");
  return mcl_core(codes, sim_matrix(embeddings), config, nullptr);
}

double ce_loss(std::span<const double> probs, std::span<const Codes> codes) {
  if (probs.empty()) throw Error(errc::empty_batch, "empty batch in ce_loss");
  if (probs.size() != codes.size())
    throw Error(errc::length_mismatch, "probs and codes length differ");
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    double p = std::clamp(probs[i], kProbClamp, 1.0 - kProbClamp);
    acc += codes[i].x == 0 ? std::log(p) : std::log(1.0 - p);
  }
  return -acc / static_cast<double>(probs.size());
}

Gradients Gradients::zeros(const ModelDims& dims) {
  Gradients g;
  g.w1.assign(static_cast<size_t>(dims.base_dim) * dims.hidden_dim, 0.0);
  g.b1.assign(dims.hidden_dim, 0.0);
  g.w2.assign(static_cast<size_t>(dims.embed_dim) * dims.hidden_dim, 0.0);
  g.b2.assign(dims.embed_dim, 0.0);
  g.wc.assign(dims.embed_dim, 0.0);
  g.bc = 0.0;
  return g;
}

double Gradients::squared_norm() const {
  double s = 0.0;
  for (const auto* arr : {&w1, &b1, &w2, &b2, &wc})
    for (double v : *arr) s += v * v;
  return s + bc * bc;
}

void Gradients::scale(double s) {
  for (auto* arr : {&w1, &b1, &w2, &b2, &wc})
    for (double& v : *arr) v *= s;
  bc *= s;
}

namespace {

struct Forward {
  std::vector<std::vector<double>> hidden;  // tanh activations
  std::vector<double> norms;                // pre-normalization |u|
  std::vector<EmbeddingVector> embeddings;
  std::vector<double> probs;
};

Forward forward_batch(const std::vector<SparseVec>& bases, const ModelParams& params) {
  Forward f;
  const uint32_t H = params.dims.hidden_dim, d = params.dims.embed_dim;
  f.hidden.reserve(bases.size());
  f.embeddings.reserve(bases.size());
  for (const auto& x : bases) {
    std::vector<double> a(params.b1.begin(), params.b1.end());
    for (size_t k = 0; k < x.idx.size(); ++k) {
      const double v = x.val[k];
      const double* col = params.w1.data() + static_cast<size_t>(x.idx[k]) * H;
      for (uint32_t j = 0; j < H; ++j) a[j] += v * col[j];
    }
    for (double& v : a) v = std::tanh(v);

    EmbeddingVector e;
    e.values.resize(d);
    double norm_sq = 0.0;
    for (uint32_t o = 0; o < d; ++o) {
      const double* row = params.w2.data() + static_cast<size_t>(o) * H;
      double u = params.b2[o];
      for (uint32_t j = 0; j < H; ++j) u += row[j] * a[j];
      e.values[o] = u;
      norm_sq += u * u;
    }
    double norm = std::sqrt(norm_sq);
    if (norm < 1e-12)
      throw Error(errc::degenerate_embedding, "projection collapsed to the zero vector");
    for (double& v : e.values) v /= norm;

    f.probs.push_back(classify_prob(params, e.values));
    f.norms.push_back(norm);
    f.hidden.push_back(std::move(a));
    f.embeddings.push_back(std::move(e));
  }
  return f;
}

}  // namespace

LossBreakdown total_loss(const std::vector<SparseVec>& bases, std::span<const Codes> codes,
                         const ModelParams& params, const LossConfig& config) {
  if (bases.size() != codes.size())
    throw Error(errc::length_mismatch, "bases and codes length differ");
  if (bases.size() < 2) throw Error(errc::batch_too_small, "need at least 2 samples");
  Forward f = forward_batch(bases, params);
  MclResult mcl = mcl_core(codes, sim_matrix(f.embeddings), config, nullptr);
  LossBreakdown out;
  out.ce = ce_loss(f.probs, codes);
  out.mcl = mcl.total;
  out.level_sums = mcl.level_sums;
  out.skipped = mcl.skipped;
  out.total = out.ce + out.mcl;
  return out;
}

LossBreakdown loss_gradients(const std::vector<SparseVec>& bases, std::span<const Codes> codes,
                             const ModelParams& params, const LossConfig& config, Gradients& out) {
  if (bases.size() != codes.size())
    throw Error(errc::length_mismatch, "bases and codes length differ");
  const int n = static_cast<int>(bases.size());
  if (n < 2) throw Error(errc::batch_too_small, "need at least 2 samples");
  const uint32_t H = params.dims.hidden_dim, d = params.dims.embed_dim;

  Forward f = forward_batch(bases, params);
  auto sims = sim_matrix(f.embeddings);

  std::vector<double> grad_s(static_cast<size_t>(n) * n, 0.0);
  MclResult mcl = mcl_core(codes, sims, config, &grad_s);

  LossBreakdown bd;
  bd.ce = ce_loss(f.probs, codes);
  bd.mcl = mcl.total;
  bd.level_sums = mcl.level_sums;
  bd.skipped = mcl.skipped;
  bd.total = bd.ce + bd.mcl;

  out = Gradients::zeros(params.dims);

  // d(ce)/d(logit_i); zero where the clamp is active.
  std::vector<double> logit_grad(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double p = f.probs[i];
    if (p > kProbClamp && p < 1.0 - kProbClamp) {
      double target = codes[i].x == 0 ? 1.0 : 0.0;
      logit_grad[i] = (p - target) / static_cast<double>(n);
    }
  }

  std::vector<double> ge(d);
  for (int i = 0; i < n; ++i) {
    const auto& e = f.embeddings[i].values;

    // Embedding gradient: similarity terms (anchor side and neighbor side)
    // plus the classifier head.
    std::fill(ge.begin(), ge.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double w = grad_s[static_cast<size_t>(i) * n + j] + grad_s[static_cast<size_t>(j) * n + i];
      if (w == 0.0) continue;
      const auto& ej = f.embeddings[j].values;
      for (uint32_t o = 0; o < d; ++o) ge[o] += w * ej[o];
    }
    if (logit_grad[i] != 0.0) {
      for (uint32_t o = 0; o < d; ++o) {
        ge[o] += logit_grad[i] * params.wc[o];
        out.wc[o] += logit_grad[i] * e[o];
      }
      out.bc += logit_grad[i];
    }

    // Through the normalization: gu = (ge - (ge . e) e) / |u|.
    double dot = 0.0;
    for (uint32_t o = 0; o < d; ++o) dot += ge[o] * e[o];
    std::vector<double> gu(d);
    for (uint32_t o = 0; o < d; ++o) gu[o] = (ge[o] - dot * e[o]) / f.norms[i];

    // Through the linear output layer.
    const auto& h = f.hidden[i];
    std::vector<double> gh(H, 0.0);
    for (uint32_t o = 0; o < d; ++o) {
      const double g = gu[o];
      if (g == 0.0) continue;
      double* w2row = out.w2.data() + static_cast<size_t>(o) * H;
      const double* prow = params.w2.data() + static_cast<size_t>(o) * H;
      for (uint32_t j = 0; j < H; ++j) {
        w2row[j] += g * h[j];
        gh[j] += g * prow[j];
      }
      out.b2[o] += g;
    }

    // Through tanh and the sparse first layer.
    for (uint32_t j = 0; j < H; ++j) gh[j] *= (1.0 - h[j] * h[j]);
    for (uint32_t j = 0; j < H; ++j) out.b1[j] += gh[j];
    const auto& x = bases[static_cast<size_t>(i)];
    for (size_t k = 0; k < x.idx.size(); ++k) {
      const double v = x.val[k];
      double* col = out.w1.data() + static_cast<size_t>(x.idx[k]) * H;
      for (uint32_t j = 0; j < H; ++j) col[j] += v * gh[j];
    }
  }
  return bd;
}

}  // namespace authorid
