#ifndef IDEPNN_EVALUATOR_HPP
#define IDEPNN_EVALUATOR_HPP

#include <map>
#include <string>
#include <vector>

#include "idepnn/corpus.hpp"

namespace idepnn {

struct CandidateKey {
  std::string doc_id;
  std::string e1;
  std::string e2;

  friend bool operator==(const CandidateKey& a, const CandidateKey& b) {
    return a.doc_id == b.doc_id && a.e1 == b.e1 && a.e2 == b.e2;
  }
  friend bool operator<(const CandidateKey& a, const CandidateKey& b) {
    if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
    if (a.e1 != b.e1) return a.e1 < b.e1;
    return a.e2 < b.e2;
  }
};

struct Prediction {
  CandidateKey key;
  std::string label;
  double probability = 0.0;          // softmax mass of `label`
  std::vector<double> distribution;  // aligned with the set's label list
  int sentence_distance = 0;
};

struct PredictionSet {
  // Opaque tag identifying the candidate universe these predictions cover;
  // ensembling refuses to merge sets with different non-empty tags.
  std::string universe;
  std::vector<std::string> labels;
  std::vector<Prediction> items;
};

struct LabelCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  int k_eval = 0;
  std::map<std::string, LabelCounts> per_label;  // positive labels only
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  long positive_predictions = 0;  // pr: sum of TP+FP over positive labels
};

// Keeps candidates with sentence_distance <= k.
std::vector<CandidatePair> filter_by_k(const std::vector<CandidatePair>& candidates, int k);

// Scores predictions against the gold candidate universe filtered at k.
// Candidates without a prediction count as predicted NONE; NONE is excluded
// from macro averaging. A prediction whose key is not in the filtered
// universe is a DataError.
EvalReport evaluate(const PredictionSet& predictions, const std::vector<CandidatePair>& gold,
                    int k);

// Union of positively-labeled predictions: a candidate is positive if any
// member set predicts it positive. Conflicting positive labels resolve to the
// highest probability (ties to the earliest set); the kept probability is the
// maximum among members that agree on the winning label.
PredictionSet ensemble(const std::vector<PredictionSet>& sets);

// Keeps predictions with probability >= p_min.
PredictionSet threshold_filter(const PredictionSet& predictions, double p_min);

struct ReportCell {
  int train_k = 0;
  int eval_k = 0;
  EvalReport report;
};

// Aligned text table of a train-k x eval-k grid.
std::string format_report_grid(const std::vector<ReportCell>& grid);
// JSON array: {train_k, eval_k, pr, macro:{p,r,f1}, per_label:{...}}.
std::string report_grid_json(const std::vector<ReportCell>& grid);

}  // namespace idepnn

#endif
