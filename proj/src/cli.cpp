#include "authorid/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "authorid/pipeline.hpp"
#include "authorid/trainer.hpp"

namespace authorid {

using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<uint64_t> seed;
};

CliConfig resolve_config(const CommonOpts& common) {
  CliConfig cfg = common.config_path.empty() ? CliConfig{} : CliConfig::from_file(common.config_path);
  if (common.seed) {
    cfg.seed = *common.seed;
    cfg.synth.seed = *common.seed;
    cfg.train.seed = *common.seed;
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& common) {
  cmd->add_option("--config", common.config_path, "JSON configuration file");
  cmd->add_option("--seed", common.seed, "override the configured seed");
}

std::vector<SparseVec> resolve_bases(const CorpusDataset& dataset, const std::string& femb_path,
                                     uint32_t expect_dim, const EncoderConfig& encoder) {
  if (!femb_path.empty()) {
    ExternalEmbeddings ext = load_external_embeddings(femb_path);
    if (ext.dim != expect_dim)
      throw Error(errc::dim_mismatch, "embedding file dim " + std::to_string(ext.dim) +
                                          " != model base_dim " + std::to_string(expect_dim));
    return sparse_bases(dataset, ext);
  }
  EncoderConfig enc = encoder;
  enc.dim = expect_dim;
  return sparse_bases(dataset, enc);
}

FamilyTable index_family_table(const std::string& index_path, const CorpusDataset* corpus) {
  if (auto sidecar = load_family_sidecar(index_path)) return *sidecar;
  if (corpus) return corpus->family_table;
  return {};
}

std::vector<Split> parse_splits(const std::string& arg) {
  std::vector<Split> splits;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) splits.push_back(split_from_string(item));
  if (splits.empty()) throw Error(errc::usage, "no splits given");
  return splits;
}

struct SynthFlags {
  std::string out;
  std::optional<uint32_t> families, docs_per_class, vocab, len_min, len_max;
  std::optional<double> style, mix;
};

int cmd_synth(const CommonOpts& common, const SynthFlags& flags) {
  CliConfig cfg = resolve_config(common);
  SynthConfig sc = cfg.synth;
  if (flags.families) sc.n_families = *flags.families;
  if (flags.docs_per_class) sc.docs_per_class = *flags.docs_per_class;
  if (flags.vocab) sc.vocab_size = *flags.vocab;
  if (flags.len_min) sc.doc_len_min = *flags.len_min;
  if (flags.len_max) sc.doc_len_max = *flags.len_max;
  if (flags.style) sc.style_strength = *flags.style;
  if (flags.mix) sc.collab_mix = *flags.mix;
  CorpusDataset ds = generate_corpus(sc);
  save_corpus(ds, flags.out);
  write_meta(flags.out, "synth");
  return 0;
}

int cmd_embed(const CommonOpts& common, const std::string& corpus_path, const std::string& out_path) {
  CliConfig cfg = resolve_config(common);
  CorpusDataset ds = load_corpus(corpus_path);
  std::vector<BaseEmbedding> embeddings;
  embeddings.reserve(ds.records.size());
  for (const auto& r : ds.records)
    embeddings.push_back(hash_ngram_embed(r.text, cfg.encoder.dim, cfg.encoder.n_range, r.id));
  save_embeddings(embeddings, cfg.encoder.dim, out_path);
  write_meta(out_path, "embed");
  return 0;
}

struct TrainFlags {
  std::string corpus, model_out, femb, history, epoch_history;
  std::optional<uint32_t> epochs, batch;
  std::optional<double> lr;
};

int cmd_train(const CommonOpts& common, const TrainFlags& flags, std::ostream& out) {
  CliConfig cfg = resolve_config(common);
  if (flags.epochs) cfg.train.epochs = *flags.epochs;
  if (flags.batch) cfg.train.batch_size = *flags.batch;
  if (flags.lr) cfg.train.lr = *flags.lr;
  cfg.validate();

  CorpusDataset ds = load_corpus(flags.corpus);
  std::vector<SparseVec> bases = resolve_bases(ds, flags.femb, cfg.model.base_dim, cfg.encoder);

  TrainResult result = train(ds, bases, cfg.model, cfg.train, cfg.loss);
  save_params(result.params, flags.model_out);
  write_meta(flags.model_out, "train");

  if (!flags.history.empty()) {
    write_text_file(flags.history, history_to_csv(result.history));
    write_meta(flags.history, "train");
  }
  if (!flags.epoch_history.empty()) {
    write_text_file(flags.epoch_history, epochs_to_csv(result.history));
    write_meta(flags.epoch_history, "train");
  }

  json summary;
  summary["steps"] = result.history.steps.size();
  summary["final_loss"] =
      result.history.steps.empty() ? 0.0 : result.history.steps.back().total;
  summary["best_epoch"] = result.history.best_epoch;
  summary["best_val_macro_f1"] = result.history.best_val_f1;
  out << summary.dump() << "\n";
  return 0;
}

int cmd_index(const CommonOpts& common, const std::string& corpus_path,
              const std::string& model_path, const std::string& out_path,
              const std::string& femb_path, const std::string& splits_arg) {
  CliConfig cfg = resolve_config(common);
  CorpusDataset ds = load_corpus(corpus_path);
  ModelParams params = load_params(model_path);
  std::vector<SparseVec> bases = resolve_bases(ds, femb_path, params.dims.base_dim, cfg.encoder);

  std::vector<size_t> indices;
  for (Split s : parse_splits(splits_arg)) {
    auto part = split_indices(ds, s);
    indices.insert(indices.end(), part.begin(), part.end());
  }
  if (indices.empty()) throw Error(errc::empty, "selected splits hold no records");

  VectorIndex index =
      VectorIndex::build(index_entries(ds, bases, params, indices, ds.family_table, false));
  index.save(out_path);
  save_family_sidecar(ds.family_table, out_path);
  write_meta(out_path, "index");
  return 0;
}

int cmd_classify(const CommonOpts& common, const std::string& model_path,
                 const std::string& index_path, const std::string& input_path,
                 const std::string& out_path, std::optional<uint32_t> k_override,
                 std::optional<double> tau_override, std::ostream& out) {
  CliConfig cfg = resolve_config(common);
  KnnConfig knn = cfg.knn;
  if (k_override) knn.k = *k_override;
  if (tau_override) knn.tau = *tau_override;

  ModelParams params = load_params(model_path);
  VectorIndex index = VectorIndex::load(index_path);
  FamilyTable families = index_family_table(index_path, nullptr);
  if (params.dims.embed_dim != index.dim())
    throw Error(errc::dim_mismatch, "model embed_dim " + std::to_string(params.dims.embed_dim) +
                                        " != index dim " + std::to_string(index.dim()));

  std::ifstream in(input_path);
  if (!in) throw Error(errc::io_error, "cannot open input: " + input_path);

  std::ofstream file_out;
  std::ostream* sink = &out;
  if (!out_path.empty()) {
    file_out.open(out_path, std::ios::binary);
    if (!file_out) throw Error(errc::io_error, "cannot open for writing: " + out_path);
    sink = &file_out;
  }

  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string id = "line-" + std::to_string(line_no);
    std::string text = line;
    // Corpus-format lines are accepted with their labels ignored.
    if (!line.empty() && line.front() == '{') {
      json j = json::parse(line, nullptr, false);
      if (!j.is_discarded() && j.is_object() && j.contains("text") && j["text"].is_string()) {
        text = j["text"].get<std::string>();
        if (j.contains("id") && j["id"].is_string()) id = j["id"].get<std::string>();
      }
    }
    BaseEmbedding base = hash_ngram_embed(text, params.dims.base_dim, cfg.encoder.n_range, id);
    EmbeddingVector e = project(params, SparseVec::from_dense(base.values));
    ClassifyResult r = classify_embedding(id, e, params, index, knn, &families);
    (*sink) << r.to_json() << "\n";
  }
  if (!out_path.empty()) write_meta(out_path, "classify");
  return 0;
}

int cmd_adapt(const CommonOpts& common, const std::string& corpus_path,
              const std::string& model_path, const std::string& index_path,
              const std::string& femb_path, uint32_t max_per_class, std::ostream& out) {
  CliConfig cfg = resolve_config(common);
  CorpusDataset ds = load_corpus(corpus_path);
  ModelParams params = load_params(model_path);
  VectorIndex index = VectorIndex::load(index_path);
  if (params.dims.embed_dim != index.dim())
    throw Error(errc::dim_mismatch, "model embed_dim != index dim");

  // The index owns the family code space; new families get the next codes.
  FamilyTable families = index_family_table(index_path, &ds);
  for (const auto& r : ds.records)
    if (r.label.family) families.add(*r.label.family);

  std::vector<size_t> selected;
  std::map<std::string, uint32_t> taken;
  for (size_t i = 0; i < ds.records.size(); ++i) {
    const auto& label = ds.records[i].label;
    std::string key = to_string(label.source) + "/" + (label.family ? *label.family : "-");
    if (max_per_class > 0 && taken[key] >= max_per_class) continue;
    taken[key]++;
    selected.push_back(i);
  }

  std::vector<SparseVec> bases = resolve_bases(ds, femb_path, params.dims.base_dim, cfg.encoder);
  index.add_unseen(index_entries(ds, bases, params, selected, families, true));
  index.save(index_path);
  save_family_sidecar(families, index_path);
  write_meta(index_path, "adapt");

  json summary;
  summary["added"] = selected.size();
  summary["overlay_size"] = index.overlay_size();
  out << summary.dump() << "\n";
  return 0;
}

int cmd_eval(const CommonOpts& common, const std::string& corpus_path,
             const std::string& model_path, const std::string& index_path,
             const std::string& out_path, const std::string& femb_path,
             const std::string& split_arg, const std::string& family_mode, std::ostream& out) {
  CliConfig cfg = resolve_config(common);
  if (family_mode != "all" && family_mode != "llm-only")
    throw Error(errc::usage, "--family-mode must be 'all' or 'llm-only'");

  CorpusDataset ds = load_corpus(corpus_path);
  ModelParams params = load_params(model_path);
  VectorIndex index = VectorIndex::load(index_path);
  FamilyTable families = index_family_table(index_path, &ds);
  std::vector<SparseVec> bases = resolve_bases(ds, femb_path, params.dims.base_dim, cfg.encoder);

  EvalOutput result = evaluate_corpus(ds, bases, params, index, families, cfg.knn,
                                      split_from_string(split_arg), family_mode == "llm-only");

  json j;
  j["authorship"] = json::parse(result.authorship.to_json());
  j["family"] = json::parse(result.family.to_json());
  write_text_file(out_path, j.dump(2) + "\n");
  write_text_file(out_path + ".ordering.json", result.ordering.to_json() + "\n");
  write_text_file(out_path + ".confusion.csv", result.authorship.confusion_csv());
  write_text_file(out_path + ".family_confusion.csv", result.family.confusion_csv());
  write_meta(out_path, "eval");

  out << j["authorship"].dump() << "\n";
  return 0;
}

int cmd_diagnose(const CommonOpts& common, const std::string& corpus_path,
                 const std::string& model_path, const std::string& out_path,
                 const std::string& femb_path, const std::string& split_arg, std::ostream& out) {
  CliConfig cfg = resolve_config(common);
  CorpusDataset ds = load_corpus(corpus_path);
  ModelParams params = load_params(model_path);
  std::vector<SparseVec> bases = resolve_bases(ds, femb_path, params.dims.base_dim, cfg.encoder);

  auto idx = split_indices(ds, split_from_string(split_arg));
  if (idx.empty()) throw Error(errc::empty, "split '" + split_arg + "' is empty");
  std::vector<EmbeddingVector> embeddings;
  std::vector<Codes> codes;
  embeddings.reserve(idx.size());
  for (size_t i : idx) {
    embeddings.push_back(project(params, bases[i]));
    codes.push_back(label_to_codes(ds.records[i].label, ds.family_table));
  }
  OrderingReport report = ordering_diagnostic(embeddings, codes);
  write_text_file(out_path, report.to_json() + "\n");
  write_meta(out_path, "diagnose");
  out << report.to_json() << "\n";
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"authorid: fine-grained authorship detection (human / LLM / collaborative)"};
  app.require_subcommand(1);

  CommonOpts common;

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus");
  add_common(synth, common);
  SynthFlags synth_flags;
  synth->add_option("--out", synth_flags.out, "output corpus path")->required();
  synth->add_option("--families", synth_flags.families, "number of LLM families");
  synth->add_option("--docs-per-class", synth_flags.docs_per_class, "documents per class");
  synth->add_option("--vocab", synth_flags.vocab, "vocabulary size");
  synth->add_option("--style-strength", synth_flags.style, "family block mass in llm docs");
  synth->add_option("--collab-mix", synth_flags.mix, "family share of collab tokens");
  synth->add_option("--doc-len-min", synth_flags.len_min, "minimum tokens per doc");
  synth->add_option("--doc-len-max", synth_flags.len_max, "maximum tokens per doc");

  // embed
  auto* embed = app.add_subcommand("embed", "hash-encode a corpus into an embedding file");
  add_common(embed, common);
  std::string embed_corpus, embed_out;
  embed->add_option("--corpus", embed_corpus, "corpus path")->required();
  embed->add_option("--out", embed_out, "output embedding file")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "train the projection and classifier heads");
  add_common(train_cmd, common);
  TrainFlags train_flags;
  train_cmd->add_option("--corpus", train_flags.corpus, "corpus path")->required();
  train_cmd->add_option("--model-out", train_flags.model_out, "output model file")->required();
  train_cmd->add_option("--embeddings", train_flags.femb, "precomputed base embedding file");
  train_cmd->add_option("--history", train_flags.history, "write per-step loss CSV here");
  train_cmd->add_option("--epoch-history", train_flags.epoch_history,
                        "write per-epoch metrics CSV here");
  train_cmd->add_option("--epochs", train_flags.epochs, "override epochs");
  train_cmd->add_option("--batch-size", train_flags.batch, "override batch size");
  train_cmd->add_option("--lr", train_flags.lr, "override learning rate");

  // index
  auto* index_cmd = app.add_subcommand("index", "embed a corpus and build the vector index");
  add_common(index_cmd, common);
  std::string index_corpus, index_model, index_out, index_femb, index_splits = "train,val";
  index_cmd->add_option("--corpus", index_corpus, "corpus path")->required();
  index_cmd->add_option("--model", index_model, "trained model file")->required();
  index_cmd->add_option("--out", index_out, "output index file")->required();
  index_cmd->add_option("--embeddings", index_femb, "precomputed base embedding file");
  index_cmd->add_option("--splits", index_splits, "comma-separated splits to index");

  // classify
  auto* classify = app.add_subcommand("classify", "classify texts against a built index");
  add_common(classify, common);
  std::string cls_model, cls_index, cls_input, cls_out;
  std::optional<uint32_t> cls_k;
  std::optional<double> cls_tau;
  classify->add_option("--model", cls_model, "trained model file")->required();
  classify->add_option("--index", cls_index, "index file")->required();
  classify->add_option("--input", cls_input, "text lines or corpus-format file")->required();
  classify->add_option("--out", cls_out, "output NDJSON path (default stdout)");
  classify->add_option("--k", cls_k, "neighbors to retrieve");
  classify->add_option("--tau", cls_tau, "vote temperature");

  // adapt
  auto* adapt = app.add_subcommand("adapt", "append labeled unseen data to the index overlay");
  add_common(adapt, common);
  std::string adapt_corpus, adapt_model, adapt_index, adapt_femb;
  uint32_t adapt_max_per_class = 0;
  adapt->add_option("--corpus", adapt_corpus, "labeled corpus of unseen data")->required();
  adapt->add_option("--model", adapt_model, "trained model file")->required();
  adapt->add_option("--index", adapt_index, "index file to extend in place")->required();
  adapt->add_option("--embeddings", adapt_femb, "precomputed base embedding file");
  adapt->add_option("--max-per-class", adapt_max_per_class,
                    "cap records per (source, family) class; 0 = all");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a split against the index");
  add_common(eval_cmd, common);
  std::string eval_corpus, eval_model, eval_index, eval_out, eval_femb;
  std::string eval_split = "test", eval_family_mode = "all";
  eval_cmd->add_option("--corpus", eval_corpus, "corpus path")->required();
  eval_cmd->add_option("--model", eval_model, "trained model file")->required();
  eval_cmd->add_option("--index", eval_index, "index file")->required();
  eval_cmd->add_option("--out", eval_out, "metrics JSON output path")->required();
  eval_cmd->add_option("--embeddings", eval_femb, "precomputed base embedding file");
  eval_cmd->add_option("--split", eval_split, "split to evaluate (default test)");
  eval_cmd->add_option("--family-mode", eval_family_mode,
                       "family metrics over 'all' records or 'llm-only'");

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "similarity-ordering diagnostic for a split");
  add_common(diagnose, common);
  std::string diag_corpus, diag_model, diag_out, diag_femb;
  std::string diag_split = "test";
  diagnose->add_option("--corpus", diag_corpus, "corpus path")->required();
  diagnose->add_option("--model", diag_model, "trained model file")->required();
  diagnose->add_option("--out", diag_out, "ordering report JSON output path")->required();
  diagnose->add_option("--embeddings", diag_femb, "precomputed base embedding file");
  diagnose->add_option("--split", diag_split, "split to diagnose (default test)");

  std::vector<const char*> argv;
  argv.push_back("authorid");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);  // prints the right (sub)command help
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (app.got_subcommand(synth)) return cmd_synth(common, synth_flags);
    if (app.got_subcommand(embed)) return cmd_embed(common, embed_corpus, embed_out);
    if (app.got_subcommand(train_cmd)) return cmd_train(common, train_flags, out);
    if (app.got_subcommand(index_cmd))
      return cmd_index(common, index_corpus, index_model, index_out, index_femb, index_splits);
    if (app.got_subcommand(classify))
      return cmd_classify(common, cls_model, cls_index, cls_input, cls_out, cls_k, cls_tau, out);
    if (app.got_subcommand(adapt))
      return cmd_adapt(common, adapt_corpus, adapt_model, adapt_index, adapt_femb,
                       adapt_max_per_class, out);
    if (app.got_subcommand(eval_cmd))
      return cmd_eval(common, eval_corpus, eval_model, eval_index, eval_out, eval_femb, eval_split,
                      eval_family_mode, out);
    if (app.got_subcommand(diagnose))
      return cmd_diagnose(common, diag_corpus, diag_model, diag_out, diag_femb, diag_split, out);
    err << "no subcommand\n";
    return 1;
  } catch (const Error& e) {
    json j;
    j["error"] = e.code();
    j["detail"] = e.what();
    err << j.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    json j;
    j["error"] = "InternalError";
    j["detail"] = e.what();
    err << j.dump() << "\n";
    return 2;
  }
}

}  // namespace authorid
