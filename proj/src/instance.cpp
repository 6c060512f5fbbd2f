#include "idepnn/instance.hpp"

#include <unordered_map>

#include "idepnn/errors.hpp"

namespace idepnn {

namespace {

CompiledSubtree compile_subtree(const Subtree& sub, const Document& doc, const Vocab& words,
                                const RelVocab& rels) {
  CompiledSubtree out;
  out.word = words.lookup(doc.sentences[sub.root.sentence].token(sub.root.token).surface);
  out.children.reserve(sub.children.size());
  for (const auto& [deprel, child] : sub.children) {
    out.children.emplace_back(rels.lookup(deprel), compile_subtree(child, doc, words, rels));
  }
  return out;
}

}  // namespace

CompiledInstance compile_instance(const Document& doc, const DocumentGraph& graph,
                                  const CandidatePair& candidate, const TrainedModel& model) {
  const EntityMention* m1 = doc.find_mention(candidate.e1);
  const EntityMention* m2 = doc.find_mention(candidate.e2);
  if (!m1 || !m2) {
    throw DataError("doc " + doc.id + ": candidate references unknown mention " +
                    (m1 ? candidate.e2 : candidate.e1));
  }
  CompiledInstance inst;
  inst.doc_id = doc.id;
  inst.e1 = candidate.e1;
  inst.e2 = candidate.e2;
  inst.sentence_distance = candidate.sentence_distance;
  inst.gold_label = model.label_id(candidate.label);
  if (inst.gold_label < 0) {
    throw DataError("doc " + doc.id + ": gold label '" + candidate.label +
                    "' not in the model label list");
  }

  std::vector<TokenUnit> units;
  std::vector<Subtree> subtrees;
  if (model.config.variant == Variant::IBiRnn) {
    units = linear_token_sequence(doc, *m1, *m2);
  } else {
    const NodeRef h1{m1->sentence, entity_head(*m1, doc.sentences[m1->sentence])};
    const NodeRef h2{m2->sentence, entity_head(*m2, doc.sentences[m2->sentence])};
    const ShortestPath path = shortest_path(graph, h1, h2);
    units = path_token_sequence(doc, path, *m1, *m2);
    if (model.config.uses_recursive()) {
      const AugmentedPath adp = build_adp(graph, path, model.config.subtree_depth);
      // Align one subtree per unit; markers stand for leaves.
      std::size_t next = 0;
      for (const TokenUnit& u : units) {
        if (u.marker()) {
          Subtree leaf;
          subtrees.push_back(leaf);
        } else {
          subtrees.push_back(adp.subtrees[next++]);
        }
      }
    }
  }

  inst.units.reserve(units.size());
  for (const TokenUnit& u : units) {
    inst.units.push_back(resolve_unit(u, model.words, model.pos_tags, model.etypes));
  }
  if (model.config.uses_recursive()) {
    inst.subtrees.reserve(subtrees.size());
    for (std::size_t i = 0; i < subtrees.size(); ++i) {
      if (units[i].marker()) {
        CompiledSubtree leaf;
        leaf.word = inst.units[i].word;
        inst.subtrees.push_back(leaf);
      } else {
        inst.subtrees.push_back(compile_subtree(subtrees[i], doc, model.words, model.rels));
      }
    }
  }
  return inst;
}

CompiledBatch compile_candidates(const Corpus& corpus, const std::vector<CandidatePair>& candidates,
                                 const TrainedModel& model) {
  CompiledBatch batch;
  std::unordered_map<std::string, const Document*> docs;
  std::unordered_map<std::string, DocumentGraph> graphs;
  for (const Document& d : corpus.docs) docs.emplace(d.id, &d);

  for (const CandidatePair& c : candidates) {
    auto doc_it = docs.find(c.doc_id);
    if (doc_it == docs.end()) {
      ++batch.skipped;
      continue;
    }
    try {
      auto graph_it = graphs.find(c.doc_id);
      if (graph_it == graphs.end()) {
        graph_it = graphs.emplace(c.doc_id, build_document_graph(*doc_it->second)).first;
      }
      batch.instances.push_back(compile_instance(*doc_it->second, graph_it->second, c, model));
    } catch (const DataError&) {
      ++batch.skipped;
    }
  }
  return batch;
}

std::vector<Eigen::VectorXd> build_inputs(const CompiledInstance& inst, const TrainedModel& model,
                                          std::vector<SubtreeEncoding>* encodings) {
  const InputLayout layout = model.layout();
  const FeatureTables tables{&model.params.word, &model.params.pos, &model.params.pi,
                             &model.params.et};
  const EncoderMode mode = model.config.mode();
  std::vector<Eigen::VectorXd> inputs;
  inputs.reserve(inst.units.size());
  if (encodings) encodings->clear();

  for (std::size_t i = 0; i < inst.units.size(); ++i) {
    if (mode == EncoderMode::Adp) {
      SubtreeEncoding enc =
          encode_subtree(inst.subtrees[i], model.params.word.rows, model.params.rec);
      inputs.push_back(assemble_input(inst.units[i], mode, layout, tables, model.config.features,
                                      &enc.c));
      if (encodings) encodings->push_back(std::move(enc));
    } else {
      inputs.push_back(assemble_input(inst.units[i], mode, layout, tables, model.config.features,
                                      nullptr));
    }
  }
  return inputs;
}

}  // namespace idepnn
