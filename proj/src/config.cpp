#include "authorid/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace authorid {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw Error(errc::config_invalid, "unknown config key '" + where + it.key() + "'");
}

template <typename T>
void get_if(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void apply_sections(const json& j, CliConfig& c) {
  reject_unknown(j, {"seed", "model", "encoder", "train", "loss", "knn", "synth"}, "");
  get_if(j, "seed", c.seed);

  if (j.contains("model")) {
    const auto& m = j["model"];
    reject_unknown(m, {"base_dim", "hidden_dim", "embed_dim"}, "model.");
    get_if(m, "base_dim", c.model.base_dim);
    get_if(m, "hidden_dim", c.model.hidden_dim);
    get_if(m, "embed_dim", c.model.embed_dim);
  }
  if (j.contains("encoder")) {
    const auto& e = j["encoder"];
    reject_unknown(e, {"dim", "ngram_min", "ngram_max"}, "encoder.");
    get_if(e, "dim", c.encoder.dim);
    get_if(e, "ngram_min", c.encoder.n_range.n_min);
    get_if(e, "ngram_max", c.encoder.n_range.n_max);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    reject_unknown(t,
                   {"batch_size", "epochs", "lr", "weight_decay", "warmup_steps", "beta1", "beta2",
                    "eps", "grad_clip"},
                   "train.");
    get_if(t, "batch_size", c.train.batch_size);
    get_if(t, "epochs", c.train.epochs);
    get_if(t, "lr", c.train.lr);
    get_if(t, "weight_decay", c.train.weight_decay);
    get_if(t, "warmup_steps", c.train.warmup_steps);
    get_if(t, "beta1", c.train.beta1);
    get_if(t, "beta2", c.train.beta2);
    get_if(t, "eps", c.train.eps);
    get_if(t, "grad_clip", c.train.grad_clip);
  }
  if (j.contains("loss")) {
    const auto& l = j["loss"];
    reject_unknown(l, {"tau", "alpha", "beta", "gamma", "delta", "zeta"}, "loss.");
    get_if(l, "tau", c.loss.tau);
    get_if(l, "alpha", c.loss.alpha);
    get_if(l, "beta", c.loss.beta);
    get_if(l, "gamma", c.loss.gamma);
    get_if(l, "delta", c.loss.delta);
    get_if(l, "zeta", c.loss.zeta);
  }
  if (j.contains("knn")) {
    const auto& k = j["knn"];
    reject_unknown(k, {"k", "tau"}, "knn.");
    get_if(k, "k", c.knn.k);
    get_if(k, "tau", c.knn.tau);
  }
  if (j.contains("synth")) {
    const auto& s = j["synth"];
    reject_unknown(s,
                   {"vocab_size", "n_families", "docs_per_class", "doc_len_min", "doc_len_max",
                    "style_strength", "collab_mix"},
                   "synth.");
    get_if(s, "vocab_size", c.synth.vocab_size);
    get_if(s, "n_families", c.synth.n_families);
    get_if(s, "docs_per_class", c.synth.docs_per_class);
    get_if(s, "doc_len_min", c.synth.doc_len_min);
    get_if(s, "doc_len_max", c.synth.doc_len_max);
    get_if(s, "style_strength", c.synth.style_strength);
    get_if(s, "collab_mix", c.synth.collab_mix);
  }
}

}  // namespace

std::string CliConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["model"] = {{"base_dim", model.base_dim},
                {"hidden_dim", model.hidden_dim},
                {"embed_dim", model.embed_dim}};
  j["encoder"] = {{"dim", encoder.dim},
                  {"ngram_min", encoder.n_range.n_min},
                  {"ngram_max", encoder.n_range.n_max}};
  j["train"] = {{"batch_size", train.batch_size},
                {"epochs", train.epochs},
                {"lr", train.lr},
                {"weight_decay", train.weight_decay},
                {"warmup_steps", train.warmup_steps},
                {"beta1", train.beta1},
                {"beta2", train.beta2},
                {"eps", train.eps},
                {"grad_clip", train.grad_clip}};
  j["loss"] = {{"tau", loss.tau}, {"alpha", loss.alpha}, {"beta", loss.beta},
               {"gamma", loss.gamma}, {"delta", loss.delta}, {"zeta", loss.zeta}};
  j["knn"] = {{"k", knn.k}, {"tau", knn.tau}};
  j["synth"] = {{"vocab_size", synth.vocab_size},
                {"n_families", synth.n_families},
                {"docs_per_class", synth.docs_per_class},
                {"doc_len_min", synth.doc_len_min},
                {"doc_len_max", synth.doc_len_max},
                {"style_strength", synth.style_strength},
                {"collab_mix", synth.collab_mix}};
  return j.dump(2);
}

CliConfig CliConfig::from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error(errc::config_invalid, "config must be a JSON object");

  CliConfig c;
  try {
    apply_sections(j, c);
  } catch (const json::exception& e) {
    throw Error(errc::config_invalid, std::string("bad config value: ") + e.what());
  }

  c.synth.seed = c.seed;
  c.train.seed = c.seed;
  return c;
}

CliConfig CliConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

void CliConfig::validate() const {
  if (encoder.dim != model.base_dim)
    throw Error(errc::dim_mismatch, "encoder.dim must equal model.base_dim");
  train.validate();
  loss.validate();
  if (knn.k < 1) throw Error(errc::bad_k, "knn.k must be >= 1");
  if (!(knn.tau > 0.0)) throw Error(errc::config_invalid, "knn.tau must be positive");
}

}  // namespace authorid
