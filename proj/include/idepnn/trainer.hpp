#ifndef IDEPNN_TRAINER_HPP
#define IDEPNN_TRAINER_HPP

#include <string>
#include <vector>

#include "idepnn/corpus.hpp"
#include "idepnn/evaluator.hpp"
#include "idepnn/instance.hpp"
#include "idepnn/model.hpp"

namespace idepnn {

// -ln y[gold]; probabilities below 1e-12 are clamped (counted by the caller
// via the `clamped` flag) so the loss stays finite.
double cross_entropy(const Eigen::VectorXd& distribution, int gold_label, bool* clamped = nullptr);

struct EpochStat {
  int epoch = 0;          // 1-based
  double mean_loss = 0.0;
  double dev_macro_f1 = 0.0;
};

struct TrainResult {
  TrainedModel model;     // best-dev snapshot
  std::vector<EpochStat> history;
};

// Trains one model: full pass per epoch in seeded shuffled order, one SGD
// step per instance with global-norm clipping, dev macro-F1 (NONE excluded)
// after every epoch, early stopping on `patience` stale epochs, best-dev
// snapshot returned. Fully deterministic given (seed, data, config).
// `pretrained` optionally supplies the word table + vocabulary; otherwise the
// vocabulary is built from the training corpus.
TrainResult train(const Corpus& train_corpus, const std::vector<CandidatePair>& train_candidates,
                  const Corpus& dev_corpus, const std::vector<CandidatePair>& dev_candidates,
                  const RelationSchema& schema, const ModelConfig& config,
                  const LoadedEmbeddings* pretrained = nullptr);

// Predictions for every candidate (NONE included), in candidate order.
// `universe` tags the resulting set for ensemble compatibility checks.
PredictionSet predict(const TrainedModel& model, const Corpus& corpus,
                      const std::vector<CandidatePair>& candidates, const std::string& universe);

enum class GradCheckSuite { Recursive, Sequence, FullChain };

// Compares every analytic parameter gradient against central finite
// differences over `num_cases` randomized instances; returns the worst
// relative error |ga - gn| / max(|ga|, |gn|, 1e-8).
double grad_check(GradCheckSuite suite, int num_cases, double epsilon, std::uint64_t seed);

}  // namespace idepnn

#endif
