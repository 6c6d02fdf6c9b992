#include "authorid/model.hpp"

#include <cmath>

#include "authorid/binio.hpp"
#include "authorid/rng.hpp"

namespace authorid {

SparseVec SparseVec::from_dense(std::span<const float> dense) {
  SparseVec s;
  for (uint32_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0f) {
      s.idx.push_back(i);
      s.val.push_back(dense[i]);
    }
  }
  return s;
}

bool ModelParams::all_finite() const {
  auto ok = [](const std::vector<double>& a) {
    for (double v : a)
      if (!std::isfinite(v)) return false;
    return true;
  };
  return ok(w1) && ok(b1) && ok(w2) && ok(b2) && ok(wc) && std::isfinite(bc);
}

ModelParams init_params(ModelDims dims, uint64_t seed) {
  if (dims.base_dim < 1 || dims.hidden_dim < 1 || dims.embed_dim < 1)
    throw Error(errc::dim_invalid, "all model dims must be >= 1");

  const uint32_t D = dims.base_dim, H = dims.hidden_dim, d = dims.embed_dim;
  ModelParams p;
  p.dims = dims;
  p.w1.assign(static_cast<size_t>(D) * H, 0.0);
  p.b1.assign(H, 0.0);
  p.w2.assign(static_cast<size_t>(d) * H, 0.0);
  p.b2.assign(d, 0.0);
  p.wc.assign(d, 0.0);
  p.bc = 0.0;

  SplitMix64 rng(seed);
  // The (1 - 1e-6) shrink keeps quantized values strictly inside the Glorot
  // bound after float32 rounding.
  auto draw = [&](double bound) {
    double u = 2.0 * rng.next_double() - 1.0;
    return quantize_f32(u * bound * (1.0 - 1e-6));
  };

  double bound1 = std::sqrt(6.0 / (static_cast<double>(D) + H));
  for (uint32_t r = 0; r < H; ++r)
    for (uint32_t c = 0; c < D; ++c) p.w1[static_cast<size_t>(c) * H + r] = draw(bound1);

  double bound2 = std::sqrt(6.0 / (static_cast<double>(H) + d));
  for (size_t i = 0; i < p.w2.size(); ++i) p.w2[i] = draw(bound2);

  double bound_c = std::sqrt(6.0 / (static_cast<double>(d) + 1.0));
  for (size_t i = 0; i < p.wc.size(); ++i) p.wc[i] = draw(bound_c);

  return p;
}

namespace {

EmbeddingVector project_impl(const ModelParams& p, const SparseVec& x) {
  const uint32_t H = p.dims.hidden_dim, d = p.dims.embed_dim;

  std::vector<double> a(p.b1.begin(), p.b1.end());
  for (size_t k = 0; k < x.idx.size(); ++k) {
    const double v = x.val[k];
    const double* col = p.w1.data() + static_cast<size_t>(x.idx[k]) * H;
    for (uint32_t j = 0; j < H; ++j) a[j] += v * col[j];
  }
  for (uint32_t j = 0; j < H; ++j) a[j] = std::tanh(a[j]);

  EmbeddingVector e;
  e.values.resize(d);
  double norm_sq = 0.0;
  for (uint32_t o = 0; o < d; ++o) {
    const double* row = p.w2.data() + static_cast<size_t>(o) * H;
    double u = p.b2[o];
    for (uint32_t j = 0; j < H; ++j) u += row[j] * a[j];
    e.values[o] = u;
    norm_sq += u * u;
  }
  double norm = std::sqrt(norm_sq);
  if (norm < 1e-12)
    throw Error(errc::degenerate_embedding, "projection collapsed to the zero vector");
  for (double& v : e.values) v /= norm;
  return e;
}

}  // namespace

EmbeddingVector project(const ModelParams& params, const SparseVec& base) {
  for (uint32_t i : base.idx)
    if (i >= params.dims.base_dim)
      throw Error(errc::dim_mismatch, "base index exceeds model base_dim");
  return project_impl(params, base);
}

EmbeddingVector project(const ModelParams& params, std::span<const float> base) {
  if (base.size() != params.dims.base_dim)
    throw Error(errc::dim_mismatch, "base embedding dim " + std::to_string(base.size()) +
                                        " != model base_dim " + std::to_string(params.dims.base_dim));
  return project_impl(params, SparseVec::from_dense(base));
}

double classify_prob(const ModelParams& params, std::span<const double> embedding) {
  if (embedding.size() != params.dims.embed_dim)
    throw Error(errc::dim_mismatch, "embedding dim mismatch in classify_prob");
  double t = params.bc;
  for (size_t i = 0; i < embedding.size(); ++i) t += params.wc[i] * embedding[i];
  return 1.0 / (1.0 + std::exp(-t));
}

void save_params(const ModelParams& p, const std::string& path) {
  const uint32_t D = p.dims.base_dim, H = p.dims.hidden_dim, d = p.dims.embed_dim;
  if (p.w1.size() != static_cast<size_t>(D) * H || p.b1.size() != H ||
      p.w2.size() != static_cast<size_t>(d) * H || p.b2.size() != d || p.wc.size() != d)
    throw Error(errc::shape_mismatch, "param array sizes inconsistent with dims");

  BinWriter w(path);
  w.magic("FMDL");
  w.u32(1);
  w.u32(D);
  w.u32(H);
  w.u32(d);
  // W1 leaves in row-major (hidden x D) order regardless of memory layout.
  for (uint32_t r = 0; r < H; ++r)
    for (uint32_t c = 0; c < D; ++c) w.f32(static_cast<float>(p.w1[static_cast<size_t>(c) * H + r]));
  for (double v : p.b1) w.f32(static_cast<float>(v));
  for (double v : p.w2) w.f32(static_cast<float>(v));
  for (double v : p.b2) w.f32(static_cast<float>(v));
  for (double v : p.wc) w.f32(static_cast<float>(v));
  w.f32(static_cast<float>(p.bc));
  w.close();
}

ModelParams load_params(const std::string& path) {
  BinReader r(path);
  r.expect_magic("FMDL");
  uint32_t version = r.u32();
  if (version != 1)
    throw Error(errc::unsupported_version, path + ": version " + std::to_string(version));

  ModelParams p;
  p.dims.base_dim = r.u32();
  p.dims.hidden_dim = r.u32();
  p.dims.embed_dim = r.u32();
  const uint64_t D = p.dims.base_dim, H = p.dims.hidden_dim, d = p.dims.embed_dim;
  if (D < 1 || H < 1 || d < 1) throw Error(errc::dim_invalid, path + ": zero dimension in header");

  uint64_t expect = 4 + 4 + 12 + 4 * (D * H + H + d * H + d + d + 1);
  if (r.file_size() < expect) throw Error(errc::truncated_file, path + ": payload shorter than header dims imply");
  if (r.file_size() > expect) throw Error(errc::shape_mismatch, path + ": payload larger than header dims imply");

  p.w1.resize(D * H);
  for (uint64_t row = 0; row < H; ++row)
    for (uint64_t c = 0; c < D; ++c) p.w1[c * H + row] = static_cast<double>(r.f32());
  auto read_array = [&](std::vector<double>& dst, uint64_t n) {
    dst.resize(n);
    for (uint64_t i = 0; i < n; ++i) dst[i] = static_cast<double>(r.f32());
  };
  read_array(p.b1, H);
  read_array(p.w2, d * H);
  read_array(p.b2, d);
  read_array(p.wc, d);
  p.bc = static_cast<double>(r.f32());
  r.expect_done();
  if (!p.all_finite()) throw Error(errc::malformed_record, path + ": non-finite parameter");
  return p;
}

}  // namespace authorid
