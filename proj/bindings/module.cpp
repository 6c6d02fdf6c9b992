#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>
#include <memory>

#include "authorid/classifier.hpp"
#include "authorid/cli.hpp"
#include "authorid/eval.hpp"
#include "authorid/pipeline.hpp"

namespace py = pybind11;
using namespace authorid;

namespace {

py::dict vote_to_dict(const FuzzyVote& vote) {
  py::dict memberships;
  for (size_t i = 0; i < vote.classes.size(); ++i)
    memberships[py::str(vote.classes[i])] = vote.memberships[i];
  py::list neighbors;
  for (const auto& n : vote.neighbors) {
    py::dict d;
    d["id"] = n.id;
    d["similarity"] = n.similarity;
    d["weight"] = n.weight;
    neighbors.append(d);
  }
  py::dict out;
  out["predicted"] = vote.predicted;
  out["memberships"] = memberships;
  out["neighbors"] = neighbors;
  return out;
}

py::dict report_to_dict(const MetricsReport& r) {
  py::dict out;
  out["accuracy"] = r.accuracy;
  out["precision_macro"] = r.precision_macro;
  out["recall_macro"] = r.recall_macro;
  out["f1_macro"] = r.f1_macro;
  if (r.mse) out["mse"] = *r.mse;
  if (r.mae) out["mae"] = *r.mae;
  out["n"] = r.n;
  out["classes"] = r.classes;
  out["confusion"] = r.confusion;
  return out;
}

struct PyModel {
  ModelParams params;
};

struct PyIndex {
  std::unique_ptr<VectorIndex> index;
  FamilyTable families;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fine-grained authorship detection: embeddings, vector search and fuzzy-kNN voting";

  m.def(
      "run_command",
      [](const std::vector<std::string>& args) {
        return run_command(args, std::cout, std::cerr);
      },
      py::arg("args"), "Run a CLI command in-process; returns the exit code");

  m.def(
      "hash_embed",
      [](const std::string& text, uint32_t dim, uint32_t n_min, uint32_t n_max) {
        return hash_ngram_embed(text, dim, {n_min, n_max}).values;
      },
      py::arg("text"), py::arg("dim") = 16384, py::arg("n_min") = 2, py::arg("n_max") = 4,
      "Unit-norm hashed character n-gram embedding");

  m.def(
      "cosine_similarity",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return cosine_similarity(a, b);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "fuzzy_weights",
      [](const std::vector<double>& sims, double tau) { return fuzzy_weights(sims, tau); },
      py::arg("similarities"), py::arg("tau") = 0.7,
      "Temperature-softmax vote weights over neighbor similarities");

  m.def(
      "level_loss",
      [](const std::vector<double>& pos, const std::vector<double>& neg, double tau) {
        return level_loss_from_sims(pos, neg, tau);
      },
      py::arg("positive_similarities"), py::arg("negative_similarities"), py::arg("tau") = 0.7,
      "Averaged-positive contrastive loss from raw similarities");

  m.def(
      "evaluate",
      [](const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
        std::vector<Source> p, g;
        for (const auto& s : pred) p.push_back(source_from_string(s));
        for (const auto& s : gold) g.push_back(source_from_string(s));
        return report_to_dict(evaluate(p, g));
      },
      py::arg("predictions"), py::arg("gold"),
      "Three-class metrics (labels 'llm', 'collab', 'human')");

  py::class_<PyModel>(m, "Model")
      .def_static("load", [](const std::string& path) { return PyModel{load_params(path)}; })
      .def_property_readonly("base_dim", [](const PyModel& s) { return s.params.dims.base_dim; })
      .def_property_readonly("hidden_dim", [](const PyModel& s) { return s.params.dims.hidden_dim; })
      .def_property_readonly("embed_dim", [](const PyModel& s) { return s.params.dims.embed_dim; })
      .def("save", [](const PyModel& s, const std::string& path) { save_params(s.params, path); })
      .def(
          "project",
          [](const PyModel& s, const std::vector<float>& base) {
            return project(s.params, base).values;
          },
          py::arg("base"), "Project a base embedding to the unit-norm representation space")
      .def(
          "classify_prob",
          [](const PyModel& s, const std::vector<double>& e) {
            return classify_prob(s.params, e);
          },
          py::arg("embedding"), "Head-only probability that the text is fully LLM-generated")
      .def(
          "embed_text",
          [](const PyModel& s, const std::string& text, uint32_t n_min, uint32_t n_max) {
            BaseEmbedding base = hash_ngram_embed(text, s.params.dims.base_dim, {n_min, n_max});
            return project(s.params, SparseVec::from_dense(base.values)).values;
          },
          py::arg("text"), py::arg("n_min") = 2, py::arg("n_max") = 4,
          "Hash-encode and project a text in one step");

  py::class_<PyIndex>(m, "Index")
      .def_static("load",
                  [](const std::string& path) {
                    PyIndex s{std::make_unique<VectorIndex>(VectorIndex::load(path)), {}};
                    if (auto t = load_family_sidecar(path)) s.families = *t;
                    return s;
                  })
      .def_property_readonly("dim", [](const PyIndex& s) { return s.index->dim(); })
      .def("__len__", [](const PyIndex& s) { return s.index->size(); })
      .def_property_readonly("base_size", [](const PyIndex& s) { return s.index->base_size(); })
      .def_property_readonly("overlay_size",
                             [](const PyIndex& s) { return s.index->overlay_size(); })
      .def(
          "top_k",
          [](const PyIndex& s, const std::vector<float>& query, size_t k) {
            py::list out;
            for (const auto& r : s.index->top_k(query, k))
              out.append(py::make_tuple(r.id, r.similarity));
            return out;
          },
          py::arg("query"), py::arg("k") = 20)
      .def(
          "classify",
          [](const PyIndex& s, const std::vector<float>& query, size_t k, double tau) {
            return vote_to_dict(fuzzy_knn_classify(*s.index, query, k, tau));
          },
          py::arg("query"), py::arg("k") = 20, py::arg("tau") = 0.7,
          "Fuzzy-kNN vote over llm / collab / human")
      .def(
          "classify_family",
          [](const PyIndex& s, const std::vector<float>& query, size_t k, double tau) {
            return vote_to_dict(classify_family(*s.index, query, k, tau, &s.families));
          },
          py::arg("query"), py::arg("k") = 20, py::arg("tau") = 0.7,
          "Fuzzy-kNN family attribution");

  m.attr("__version__") = "0.1.0";
}
