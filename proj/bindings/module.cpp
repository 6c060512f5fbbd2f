// Python bindings for the main operations: corpus I/O, candidate generation,
// path inspection, training, prediction, evaluation and gradient checking.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <limits>
#include <sstream>

#include "idepnn/conllu.hpp"
#include "idepnn/errors.hpp"
#include "idepnn/evaluator.hpp"
#include "idepnn/fixtures.hpp"
#include "idepnn/graph.hpp"
#include "idepnn/jsonl.hpp"
#include "idepnn/model.hpp"
#include "idepnn/standoff.hpp"
#include "idepnn/trainer.hpp"

namespace py = pybind11;
using namespace idepnn;

namespace {

CandidatePair candidate_from_dict(const py::dict& d) {
  CandidatePair c;
  c.doc_id = d["doc"].cast<std::string>();
  c.e1 = d["e1"].cast<std::string>();
  c.e2 = d["e2"].cast<std::string>();
  c.label = d["label"].cast<std::string>();
  c.sentence_distance = d["sentence_distance"].cast<int>();
  return c;
}

py::dict candidate_to_dict(const CandidatePair& c) {
  py::dict d;
  d["doc"] = c.doc_id;
  d["e1"] = c.e1;
  d["e2"] = c.e2;
  d["label"] = c.label;
  d["sentence_distance"] = c.sentence_distance;
  return d;
}

std::vector<CandidatePair> candidates_from_list(const py::list& items) {
  std::vector<CandidatePair> out;
  for (const auto& item : items) out.push_back(candidate_from_dict(item.cast<py::dict>()));
  return out;
}

py::list candidates_to_list(const std::vector<CandidatePair>& cands) {
  py::list out;
  for (const CandidatePair& c : cands) out.append(candidate_to_dict(c));
  return out;
}

PredictionSet predictions_from_dict(const py::dict& d) {
  PredictionSet set;
  set.universe = d["universe"].cast<std::string>();
  set.labels = d["labels"].cast<std::vector<std::string>>();
  for (const auto& item : d["items"].cast<py::list>()) {
    const py::dict pd = item.cast<py::dict>();
    Prediction p;
    p.key = {pd["doc"].cast<std::string>(), pd["e1"].cast<std::string>(),
             pd["e2"].cast<std::string>()};
    p.label = pd["label"].cast<std::string>();
    p.probability = pd["prob"].cast<double>();
    p.sentence_distance = pd["sentence_distance"].cast<int>();
    if (pd.contains("dist")) p.distribution = pd["dist"].cast<std::vector<double>>();
    set.items.push_back(std::move(p));
  }
  return set;
}

py::dict predictions_to_dict(const PredictionSet& set) {
  py::dict d;
  d["universe"] = set.universe;
  d["labels"] = set.labels;
  py::list items;
  for (const Prediction& p : set.items) {
    py::dict pd;
    pd["doc"] = p.key.doc_id;
    pd["e1"] = p.key.e1;
    pd["e2"] = p.key.e2;
    pd["label"] = p.label;
    pd["prob"] = p.probability;
    pd["sentence_distance"] = p.sentence_distance;
    pd["dist"] = p.distribution;
    items.append(pd);
  }
  d["items"] = items;
  return d;
}

py::dict report_to_dict(const EvalReport& rep) {
  py::dict d;
  d["k_eval"] = rep.k_eval;
  d["pr"] = rep.positive_predictions;
  py::dict macro;
  macro["p"] = rep.macro_precision;
  macro["r"] = rep.macro_recall;
  macro["f1"] = rep.macro_f1;
  d["macro"] = macro;
  py::dict per_label;
  for (const auto& [label, c] : rep.per_label) {
    py::dict lc;
    lc["tp"] = c.tp;
    lc["fp"] = c.fp;
    lc["fn"] = c.fn;
    lc["p"] = c.precision;
    lc["r"] = c.recall;
    lc["f1"] = c.f1;
    per_label[py::str(label)] = lc;
  }
  d["per_label"] = per_label;
  return d;
}

ModelConfig config_from_kwargs(const py::kwargs& kwargs) {
  ModelConfig cfg;
  for (const auto& item : kwargs) {
    const std::string key = item.first.cast<std::string>();
    const py::handle value = item.second;
    if (key == "variant") cfg.variant = variant_from_name(value.cast<std::string>());
    else if (key == "word_dim") cfg.word_dim = value.cast<int>();
    else if (key == "subtree_dim") cfg.subtree_dim = value.cast<int>();
    else if (key == "hidden_dim") cfg.hidden_dim = value.cast<int>();
    else if (key == "k_train") cfg.k_train = value.cast<int>();
    else if (key == "subtree_depth") cfg.subtree_depth = value.cast<int>();
    else if (key == "min_freq") cfg.min_freq = value.cast<long>();
    else if (key == "learning_rate") cfg.learning_rate = value.cast<double>();
    else if (key == "clip_norm") cfg.clip_norm = value.cast<double>();
    else if (key == "max_epochs") cfg.max_epochs = value.cast<int>();
    else if (key == "patience") cfg.patience = value.cast<int>();
    else if (key == "train_word_embeddings") cfg.train_word_embeddings = value.cast<bool>();
    else if (key == "seed") cfg.seed = value.cast<std::uint64_t>();
    else if (key == "pos") cfg.features.pos = value.cast<bool>();
    else if (key == "pi") cfg.features.pi = value.cast<bool>();
    else if (key == "et") cfg.features.et = value.cast<bool>();
    else throw DataError("unknown config key '" + key + "'");
  }
  return cfg;
}

GradCheckSuite suite_from_name(const std::string& name) {
  if (name == "recursive") return GradCheckSuite::Recursive;
  if (name == "sequence") return GradCheckSuite::Sequence;
  if (name == "full") return GradCheckSuite::FullChain;
  throw DataError("unknown gradcheck suite '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_idepnn, m) {
  m.doc() = "Cross-sentence relation extraction over dependency paths";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

  py::class_<Corpus>(m, "Corpus")
      .def("__len__", [](const Corpus& c) { return c.docs.size(); })
      .def("doc_ids",
           [](const Corpus& c) {
             std::vector<std::string> ids;
             for (const Document& d : c.docs) ids.push_back(d.id);
             return ids;
           })
      .def("summary", [](const Corpus& c) {
        long sentences = 0, mentions = 0, relations = 0;
        for (const Document& d : c.docs) {
          sentences += static_cast<long>(d.sentences.size());
          mentions += static_cast<long>(d.mentions.size());
          relations += static_cast<long>(d.gold_relations.size());
        }
        py::dict out;
        out["documents"] = c.docs.size();
        out["sentences"] = sentences;
        out["mentions"] = mentions;
        out["relations"] = relations;
        return out;
      });

  py::class_<RelationSchema>(m, "RelationSchema")
      .def("labels", &RelationSchema::labels);

  py::class_<TrainedModel>(m, "Model")
      .def_property_readonly("labels", [](const TrainedModel& m) { return m.labels; })
      .def_property_readonly("variant",
                             [](const TrainedModel& m) { return variant_name(m.config.variant); })
      .def_property_readonly("best_dev_f1",
                             [](const TrainedModel& m) { return m.meta.best_dev_f1; })
      .def_property_readonly("epochs_run",
                             [](const TrainedModel& m) { return m.meta.epochs_run; })
      .def("config_json", [](const TrainedModel& m) { return m.config.to_json(); })
      .def("save", [](const TrainedModel& m, const std::string& path) {
        save_model_file(m, path);
      });

  m.def("load_jsonl", &load_jsonl_file, py::arg("path"));
  m.def("load_jsonl_text", &load_jsonl_text, py::arg("text"));
  m.def("save_jsonl", &save_jsonl_file, py::arg("corpus"), py::arg("path"));
  m.def("load_schema", &load_schema_file, py::arg("path"));
  m.def("schema_from_json", &schema_from_json_text, py::arg("text"));

  m.def(
      "parse_conllu_document",
      [](const std::string& doc_id, const std::string& text) {
        Corpus corpus;
        Document doc;
        doc.id = doc_id;
        doc.sentences = parse_conllu(text);
        validate_document(doc);
        corpus.docs.push_back(std::move(doc));
        return corpus;
      },
      py::arg("doc_id"), py::arg("conllu_text"),
      "Build a one-document corpus from CoNLL-U text (no mentions).");

  m.def(
      "import_standoff_document",
      [](const std::string& doc_id, const std::string& text, const std::string& a1,
         const std::string& a2, const std::string& conllu_text) {
        Corpus corpus;
        corpus.docs.push_back(import_standoff(doc_id, text, a1, a2, parse_conllu(conllu_text)));
        return corpus;
      },
      py::arg("doc_id"), py::arg("text"), py::arg("a1"), py::arg("a2"), py::arg("conllu_text"));

  m.def(
      "generate_fixture",
      [](int num_docs, std::uint64_t seed) {
        FixtureSpec spec;
        spec.num_docs = num_docs;
        spec.seed = seed;
        return generate_corpus(spec);
      },
      py::arg("num_docs") = 200, py::arg("seed") = 1,
      "Deterministic synthetic corpus with one typed entity pair per document.");
  m.def("fixture_schema", []() { return FixtureSpec{}.schema(); });

  m.def(
      "split_corpus",
      [](const Corpus& corpus, double train, double dev, double test, std::uint64_t seed) {
        auto parts = split_corpus(corpus, {train, dev, test}, seed);
        return py::make_tuple(parts[0], parts[1], parts[2]);
      },
      py::arg("corpus"), py::arg("train") = 0.6, py::arg("dev") = 0.2, py::arg("test") = 0.2,
      py::arg("seed") = 1);

  m.def(
      "generate_candidates",
      [](const Corpus& corpus, const RelationSchema& schema, int k_max) {
        std::vector<CandidatePair> all;
        for (const Document& doc : corpus.docs) {
          for (CandidatePair& c : generate_candidates(doc, k_max, schema)) {
            all.push_back(std::move(c));
          }
        }
        return candidates_to_list(all);
      },
      py::arg("corpus"), py::arg("schema"), py::arg("k_max"));

  m.def(
      "sample_negatives",
      [](const py::list& candidates, std::uint64_t seed) {
        return candidates_to_list(sample_negatives(candidates_from_list(candidates), seed));
      },
      py::arg("candidates"), py::arg("seed"));

  m.def(
      "shortest_path_info",
      [](const Corpus& corpus, const std::string& doc_id, const std::string& e1,
         const std::string& e2) {
        const Document* doc = corpus.find(doc_id);
        if (!doc) throw DataError("unknown document id " + doc_id);
        const EntityMention* m1 = doc->find_mention(e1);
        const EntityMention* m2 = doc->find_mention(e2);
        if (!m1 || !m2) throw DataError("unknown mention id");
        const DocumentGraph graph = build_document_graph(*doc);
        const ShortestPath path = shortest_path(
            graph, NodeRef{m1->sentence, entity_head(*m1, doc->sentences[m1->sentence])},
            NodeRef{m2->sentence, entity_head(*m2, doc->sentences[m2->sentence])});
        py::dict out;
        std::vector<std::string> surfaces;
        for (const NodeRef& n : path.nodes) {
          surfaces.push_back(doc->sentences[n.sentence].token(n.token).surface);
        }
        std::vector<std::string> sequence;
        for (const TokenUnit& u : path_token_sequence(*doc, path, *m1, *m2)) {
          sequence.push_back(u.surface);
        }
        out["tokens"] = surfaces;
        out["edge_labels"] = path.edge_labels;
        out["nexts_crossings"] = path.nexts_crossings();
        out["sequence"] = sequence;
        std::ostringstream dot;
        write_dot(dot, graph, &path);
        out["dot"] = dot.str();
        return out;
      },
      py::arg("corpus"), py::arg("doc_id"), py::arg("e1"), py::arg("e2"));

  m.def(
      "train",
      [](const Corpus& train_corpus, const py::list& train_candidates, const Corpus& dev_corpus,
         const py::list& dev_candidates, const RelationSchema& schema, const py::kwargs& kwargs) {
        const TrainResult result =
            train(train_corpus, candidates_from_list(train_candidates), dev_corpus,
                  candidates_from_list(dev_candidates), schema, config_from_kwargs(kwargs));
        py::list history;
        for (const EpochStat& s : result.history) {
          py::dict e;
          e["epoch"] = s.epoch;
          e["mean_loss"] = s.mean_loss;
          e["dev_macro_f1"] = s.dev_macro_f1;
          history.append(e);
        }
        return py::make_tuple(result.model, history);
      },
      py::arg("train_corpus"), py::arg("train_candidates"), py::arg("dev_corpus"),
      py::arg("dev_candidates"), py::arg("schema"),
      "Returns (model, history). Config keys: variant, word_dim, subtree_dim, hidden_dim, "
      "k_train, learning_rate, clip_norm, max_epochs, patience, seed, pos, pi, et, ...");

  m.def("load_model", &load_model_file, py::arg("path"));

  m.def(
      "predict",
      [](const TrainedModel& model, const Corpus& corpus, const py::list& candidates,
         const std::string& universe) {
        return predictions_to_dict(
            predict(model, corpus, candidates_from_list(candidates), universe));
      },
      py::arg("model"), py::arg("corpus"), py::arg("candidates"), py::arg("universe") = "");

  m.def(
      "evaluate",
      [](const py::dict& predictions, const py::list& gold, py::object k) {
        const int k_eval =
            k.is_none() ? std::numeric_limits<int>::max() : k.cast<int>();
        return report_to_dict(
            evaluate(predictions_from_dict(predictions), candidates_from_list(gold), k_eval));
      },
      py::arg("predictions"), py::arg("gold"), py::arg("k") = py::none());

  m.def(
      "ensemble",
      [](const py::list& sets) {
        std::vector<PredictionSet> native;
        for (const auto& s : sets) native.push_back(predictions_from_dict(s.cast<py::dict>()));
        return predictions_to_dict(ensemble(native));
      },
      py::arg("prediction_sets"));

  m.def(
      "threshold_filter",
      [](const py::dict& predictions, double p_min) {
        return predictions_to_dict(threshold_filter(predictions_from_dict(predictions), p_min));
      },
      py::arg("predictions"), py::arg("p_min"));

  m.def(
      "grad_check",
      [](const std::string& suite, int cases, double epsilon, std::uint64_t seed) {
        return grad_check(suite_from_name(suite), cases, epsilon, seed);
      },
      py::arg("suite") = "full", py::arg("cases") = 50, py::arg("epsilon") = 1e-4,
      py::arg("seed") = 46);
}
