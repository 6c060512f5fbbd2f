#ifndef IDEPNN_INSTANCE_HPP
#define IDEPNN_INSTANCE_HPP

#include <string>
#include <vector>

#include "idepnn/corpus.hpp"
#include "idepnn/features.hpp"
#include "idepnn/graph.hpp"
#include "idepnn/model.hpp"
#include "idepnn/recursive.hpp"

namespace idepnn {

// One candidate pair compiled against model vocabularies: the unit sequence
// (variant-dependent), resolved feature ids, and for ADP the per-unit
// dependency subtrees with word/relation ids. Building is independent of
// parameter values, so instances compile once per run.
struct CompiledInstance {
  std::string doc_id;
  std::string e1;
  std::string e2;
  int gold_label = -1;       // index into the model label list
  int sentence_distance = 0;
  std::vector<UnitIds> units;
  std::vector<CompiledSubtree> subtrees;  // one per unit in ADP mode, else empty
};

// Compiles one candidate. Throws DataError when the pair is unresolvable
// (unknown mention ids, gold label outside the label list).
CompiledInstance compile_instance(const Document& doc, const DocumentGraph& graph,
                                  const CandidatePair& candidate, const TrainedModel& model);

// Compiles a whole candidate list, caching one graph per document.
// Unresolvable candidates are skipped and counted instead of raised.
struct CompiledBatch {
  std::vector<CompiledInstance> instances;
  long skipped = 0;
};
CompiledBatch compile_candidates(const Corpus& corpus, const std::vector<CandidatePair>& candidates,
                                 const TrainedModel& model);

// Builds the input vectors for one instance under the current parameters.
// In ADP mode `encodings` receives the per-unit subtree caches for backprop;
// pass nullptr when only the forward value is needed.
std::vector<Eigen::VectorXd> build_inputs(const CompiledInstance& inst, const TrainedModel& model,
                                          std::vector<SubtreeEncoding>* encodings);

}  // namespace idepnn

#endif
