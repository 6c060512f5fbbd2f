#include "idepnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "idepnn/errors.hpp"
#include "idepnn/rng.hpp"

namespace idepnn {

double cross_entropy(const Eigen::VectorXd& distribution, int gold_label, bool* clamped) {
  if (gold_label < 0 || gold_label >= distribution.size()) {
    throw DataError("cross_entropy: gold label out of range");
  }
  double p = distribution[gold_label];
  if (clamped) *clamped = false;
  if (p < 1e-12) {
    p = 1e-12;
    if (clamped) *clamped = true;
  }
  return -std::log(p);
}

namespace {

// All gradients of one SGD step.
struct StepGrads {
  SequenceGrads seq;
  RecursiveGrads rec;  // also carries the sparse word-table gradients
  Eigen::MatrixXd pos, pi, et;
};

StepGrads make_step_grads(const TrainedModel& model, int length) {
  StepGrads g;
  g.seq = SequenceGrads::zeros_like(model.params.seq, length);
  g.rec = RecursiveGrads::zeros_like(model.params.rec);
  g.pos = Eigen::MatrixXd::Zero(model.params.pos.rows.rows(), model.params.pos.rows.cols());
  g.pi = Eigen::MatrixXd::Zero(model.params.pi.rows.rows(), model.params.pi.rows.cols());
  g.et = Eigen::MatrixXd::Zero(model.params.et.rows.rows(), model.params.et.rows.cols());
  return g;
}

// Forward + backward for one instance; returns the loss.
double instance_gradients(const CompiledInstance& inst, const TrainedModel& model, StepGrads& g,
                          bool* clamped) {
  const bool adp = model.config.uses_recursive();
  std::vector<SubtreeEncoding> encodings;
  const std::vector<Eigen::VectorXd> inputs =
      build_inputs(inst, model, adp ? &encodings : nullptr);
  const EncoderStates states = sequence_forward(inputs, model.params.seq);
  const double loss = cross_entropy(states.distribution, inst.gold_label, clamped);

  g = make_step_grads(model, states.length());
  g.seq = sequence_backward(states, inst.gold_label, model.params.seq);

  const InputLayout layout = model.layout();
  const LexicalFeatureConfig& f = model.config.features;
  for (std::size_t t = 0; t < inst.units.size(); ++t) {
    const UnitIds& ids = inst.units[t];
    const Eigen::VectorXd& di = g.seq.inputs[t];
    g.rec.accumulate_word(ids.word, di.segment(layout.word_offset, layout.word_dim));
    if (adp) {
      backprop_subtree(encodings[t], di.segment(layout.subtree_offset, layout.subtree_dim),
                       model.params.word.rows, model.params.rec, g.rec);
    }
    if (f.pos) g.pos.row(ids.pos) += di.segment(layout.pos_offset, f.pos_dim).transpose();
    if (f.pi) g.pi.row(ids.pi) += di.segment(layout.pi_offset, f.pi_dim).transpose();
    if (f.et) g.et.row(ids.et) += di.segment(layout.et_offset, f.et_dim).transpose();
  }
  return loss;
}

// Zeroes gradients of frozen rows, rescales everything so the global norm
// stays within clip_norm, then takes one SGD step.
void apply_sgd(TrainedModel& model, StepGrads& g) {
  ModelParams& p = model.params;
  double sq = g.seq.input_transform.squaredNorm() + g.seq.recurrent.squaredNorm() +
              g.seq.output_transform.squaredNorm() + g.seq.output_bias.squaredNorm();
  for (const Eigen::MatrixXd& m : g.rec.rel_transform) sq += m.squaredNorm();
  sq += g.rec.bias.squaredNorm() + g.rec.c_leaf.squaredNorm();
  for (auto& [row, grad] : g.rec.word) {
    if (p.word.row_is_trainable(row)) {
      sq += grad.squaredNorm();
    } else {
      grad.setZero();
    }
  }
  auto mask_table = [&sq](Eigen::MatrixXd& grad, const EmbeddingTable& table) {
    for (Eigen::Index r = 0; r < grad.rows(); ++r) {
      if (table.row_is_trainable(static_cast<int>(r))) {
        sq += grad.row(r).squaredNorm();
      } else {
        grad.row(r).setZero();
      }
    }
  };
  mask_table(g.pos, p.pos);
  mask_table(g.pi, p.pi);
  mask_table(g.et, p.et);

  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw InternalError("non-finite gradient norm");
  const double clip = model.config.clip_norm;
  const double step = model.config.learning_rate * (clip > 0 && norm > clip ? clip / norm : 1.0);

  p.seq.input_transform -= step * g.seq.input_transform;
  p.seq.recurrent -= step * g.seq.recurrent;
  p.seq.output_transform -= step * g.seq.output_transform;
  p.seq.output_bias -= step * g.seq.output_bias;
  for (std::size_t i = 0; i < g.rec.rel_transform.size(); ++i) {
    p.rec.rel_transform[i] -= step * g.rec.rel_transform[i];
  }
  if (p.rec.bias.size() > 0) p.rec.bias -= step * g.rec.bias;
  if (p.rec.c_leaf.size() > 0) p.rec.c_leaf -= step * g.rec.c_leaf;
  for (const auto& [row, grad] : g.rec.word) {
    p.word.rows.row(row) -= step * grad.transpose();
  }
  p.pos.rows -= step * g.pos;
  p.pi.rows -= step * g.pi;
  p.et.rows -= step * g.et;
}

std::vector<std::string> collect_deprels(const Corpus& corpus) {
  std::vector<std::string> rels;
  for (const Document& doc : corpus.docs) {
    for (const Sentence& s : doc.sentences) {
      for (const Token& t : s.tokens) {
        if (t.head > 0) rels.push_back(t.deprel);
      }
    }
  }
  std::sort(rels.begin(), rels.end());
  rels.erase(std::unique(rels.begin(), rels.end()), rels.end());
  return rels;
}

PredictionSet predict_compiled(const TrainedModel& model, const CompiledBatch& batch,
                               const std::string& universe) {
  PredictionSet set;
  set.universe = universe;
  set.labels = model.labels;
  set.items.reserve(batch.instances.size());
  for (const CompiledInstance& inst : batch.instances) {
    const std::vector<Eigen::VectorXd> inputs = build_inputs(inst, model, nullptr);
    const EncoderStates states = sequence_forward(inputs, model.params.seq);
    const int best = argmax_label(states.distribution);
    Prediction pred;
    pred.key = {inst.doc_id, inst.e1, inst.e2};
    pred.label = model.labels[best];
    pred.probability = states.distribution[best];
    pred.distribution.assign(states.distribution.data(),
                             states.distribution.data() + states.distribution.size());
    pred.sentence_distance = inst.sentence_distance;
    set.items.push_back(std::move(pred));
  }
  return set;
}

}  // namespace

TrainResult train(const Corpus& train_corpus, const std::vector<CandidatePair>& train_candidates,
                  const Corpus& dev_corpus, const std::vector<CandidatePair>& dev_candidates,
                  const RelationSchema& schema, const ModelConfig& config,
                  const LoadedEmbeddings* pretrained) {
  if (train_candidates.empty()) throw DataError("train: empty training set");
  if (std::none_of(train_candidates.begin(), train_candidates.end(),
                   [](const CandidatePair& c) { return c.positive(); })) {
    throw DataError("train: degenerate labels (no positive candidates)");
  }
  schema.validate();

  TrainedModel model;
  model.config = config;
  model.schema = schema;
  model.labels = schema.labels();
  model.labels.push_back(kNoneLabel);

  const std::uint64_t seed = config.seed;
  if (pretrained) {
    model.words = pretrained->vocab;
    model.params.word = pretrained->table;
    if (config.train_word_embeddings) {
      model.params.word.trainable = true;
      model.params.word.row_trainable.assign(model.words.size(), 1);
    }
  } else {
    model.words = build_vocab(train_corpus, config.min_freq);
    model.params.word = random_table(model.words.size(), config.word_dim, 0.1, seed + 1);
  }
  if (model.params.word.dim() != config.word_dim) {
    throw DataError("train: embedding dimension " + std::to_string(model.params.word.dim()) +
                    " does not match configured word_dim " + std::to_string(config.word_dim));
  }
  model.pos_tags = collect_pos_tags(train_corpus);
  model.etypes = collect_entity_types(train_corpus, schema);
  for (const std::string& rel : collect_deprels(train_corpus)) model.rels.add(rel);

  const InputLayout layout = model.layout();
  model.params.seq = init_sequence_params(layout.total, config.hidden_dim,
                                          static_cast<int>(model.labels.size()), seed + 2);
  if (config.uses_recursive()) {
    model.params.rec =
        init_recursive_params(model.rels.size(), config.word_dim, config.subtree_dim, seed + 3);
  } else {
    model.params.rec.bias = Eigen::VectorXd::Zero(0);
    model.params.rec.c_leaf = Eigen::VectorXd::Zero(0);
  }
  model.params.pos = random_table(model.pos_tags.size(), config.features.pos_dim, 0.1, seed + 4,
                                  {TagVocab::kNull});
  model.params.pi = random_table(kPiZoneCount, config.features.pi_dim, 0.1, seed + 5);
  model.params.et = random_table(model.etypes.size(), config.features.et_dim, 0.1, seed + 6,
                                 {TagVocab::kNull});

  const CompiledBatch train_batch = compile_candidates(train_corpus, train_candidates, model);
  const CompiledBatch dev_batch = compile_candidates(dev_corpus, dev_candidates, model);
  model.meta.skipped_candidates = train_batch.skipped + dev_batch.skipped;
  if (train_batch.instances.empty()) {
    throw DataError("train: no candidate could be compiled into an instance");
  }

  TrainResult result;
  Rng shuffle_rng(seed + 7);
  std::vector<std::size_t> order(train_batch.instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  ModelParams best_params = model.params;
  double best_f1 = -1.0;
  int best_epoch = 0;
  int stale = 0;
  const bool have_dev = !dev_candidates.empty();

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double total_loss = 0.0;
    for (std::size_t idx : order) {
      StepGrads grads;
      bool clamped = false;
      total_loss += instance_gradients(train_batch.instances[idx], model, grads, &clamped);
      if (clamped) ++model.meta.clamped_losses;
      apply_sgd(model, grads);
    }

    EpochStat stat;
    stat.epoch = epoch;
    stat.mean_loss = total_loss / static_cast<double>(train_batch.instances.size());
    if (have_dev) {
      const PredictionSet dev_preds = predict_compiled(model, dev_batch, "");
      stat.dev_macro_f1 =
          evaluate(dev_preds, dev_candidates, std::numeric_limits<int>::max()).macro_f1;
    }
    result.history.push_back(stat);
    model.meta.epochs_run = epoch;

    if (!have_dev || stat.dev_macro_f1 > best_f1) {
      best_f1 = have_dev ? stat.dev_macro_f1 : 0.0;
      best_epoch = epoch;
      best_params = model.params;
      stale = 0;
    } else {
      ++stale;
      if (stale >= config.patience) break;
    }
  }

  model.params = std::move(best_params);
  model.meta.best_epoch = best_epoch;
  model.meta.best_dev_f1 = std::max(best_f1, 0.0);
  result.model = std::move(model);
  return result;
}

PredictionSet predict(const TrainedModel& model, const Corpus& corpus,
                      const std::vector<CandidatePair>& candidates, const std::string& universe) {
  const CompiledBatch batch = compile_candidates(corpus, candidates, model);
  return predict_compiled(model, batch, universe);
}

// ---------------------------------------------------------------------------
// Finite-difference gradient verification.
// ---------------------------------------------------------------------------

namespace {

struct ParamView {
  const char* name = "";
  double* data = nullptr;
  const double* grad = nullptr;
  Eigen::Index size = 0;
};

void add_view(std::vector<ParamView>& views, const char* name, Eigen::MatrixXd& param,
              const Eigen::MatrixXd& grad) {
  views.push_back({name, param.data(), grad.data(), param.size()});
}

void add_view(std::vector<ParamView>& views, const char* name, Eigen::VectorXd& param,
              const Eigen::VectorXd& grad) {
  views.push_back({name, param.data(), grad.data(), param.size()});
}

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
}

// Worst relative error between analytic gradients and central differences of
// `loss` over every component of every view.
template <typename LossFn>
double check_views(const std::vector<ParamView>& views, const LossFn& loss, double epsilon) {
  double worst = 0.0;
  for (const ParamView& view : views) {
    for (Eigen::Index i = 0; i < view.size; ++i) {
      const double saved = view.data[i];
      view.data[i] = saved + epsilon;
      const double up = loss();
      view.data[i] = saved - epsilon;
      const double down = loss();
      view.data[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw InternalError("grad_check: non-finite loss");
      }
      const double numeric = (up - down) / (2.0 * epsilon);
      const double err = relative_error(view.grad[i], numeric);
      if (err > worst) worst = err;
      if (err > 5e-5 && std::getenv("IDEPNN_GRADCHECK_DEBUG")) {
        std::fprintf(stderr, "err %.3e at %s[%ld]: ga=%.6e gn=%.6e\n", err, view.name,
                     static_cast<long>(i), view.grad[i], numeric);
      }
    }
  }
  return worst;
}

CompiledSubtree random_compiled_subtree(Rng& rng, int vocab, int rels, int depth, int max_fanout) {
  CompiledSubtree tree;
  tree.word = static_cast<int>(rng.below(vocab));
  if (depth <= 0) return tree;
  const int fanout = static_cast<int>(rng.below(max_fanout + 1));
  for (int i = 0; i < fanout; ++i) {
    tree.children.emplace_back(static_cast<int>(rng.below(rels + 1)),
                               random_compiled_subtree(rng, vocab, rels, depth - 1, max_fanout));
  }
  return tree;
}

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double scale) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-scale, scale);
  }
  return m;
}

Eigen::VectorXd random_vector(Rng& rng, int n, double scale) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-scale, scale);
  return v;
}

double check_recursive_case(Rng& rng, double epsilon) {
  const int word_dim = 1 + static_cast<int>(rng.below(5));
  const int sub_dim = 1 + static_cast<int>(rng.below(5));
  const int rels = 1 + static_cast<int>(rng.below(3));
  const int vocab = 4 + static_cast<int>(rng.below(5));

  RecursiveParams params;
  params.rel_transform.resize(rels + 1);
  for (Eigen::MatrixXd& w : params.rel_transform) {
    w = random_matrix(rng, sub_dim, word_dim + sub_dim, 0.7);
  }
  params.bias = random_vector(rng, sub_dim, 0.5);
  params.c_leaf = random_vector(rng, sub_dim, 0.5);
  Eigen::MatrixXd words = random_matrix(rng, vocab, word_dim, 0.8);
  const CompiledSubtree tree = random_compiled_subtree(rng, vocab, rels, 4, 3);
  const Eigen::VectorXd probe = random_vector(rng, sub_dim, 1.0);

  // Scalar objective: probe . c_root.
  auto loss = [&]() {
    return probe.dot(encode_subtree(tree, words, params).c);
  };

  const SubtreeEncoding enc = encode_subtree(tree, words, params);
  RecursiveGrads grads = RecursiveGrads::zeros_like(params);
  backprop_subtree(enc, probe, words, params, grads);
  Eigen::MatrixXd word_grads = Eigen::MatrixXd::Zero(vocab, word_dim);
  for (const auto& [row, g] : grads.word) word_grads.row(row) = g.transpose();

  std::vector<ParamView> views;
  for (std::size_t i = 0; i < params.rel_transform.size(); ++i) {
    add_view(views, "W_rel", params.rel_transform[i], grads.rel_transform[i]);
  }
  add_view(views, "rec_bias", params.bias, grads.bias);
  add_view(views, "c_leaf", params.c_leaf, grads.c_leaf);
  add_view(views, "words", words, word_grads);
  return check_views(views, loss, epsilon);
}

double check_sequence_case(Rng& rng, double epsilon) {
  const int hidden = 1 + static_cast<int>(rng.below(5));
  const int in_dim = 1 + static_cast<int>(rng.below(7));
  const int labels = 2 + static_cast<int>(rng.below(3));
  const int length = 1 + static_cast<int>(rng.below(6));

  SequenceParams params;
  params.input_transform = random_matrix(rng, hidden, in_dim, 0.7);
  params.recurrent = random_matrix(rng, hidden, hidden, 0.7);
  params.output_transform = random_matrix(rng, labels, hidden, 0.7);
  params.output_bias = random_vector(rng, labels, 0.5);
  std::vector<Eigen::VectorXd> inputs;
  for (int t = 0; t < length; ++t) inputs.push_back(random_vector(rng, in_dim, 0.8));
  const int gold = static_cast<int>(rng.below(labels));

  auto loss = [&]() {
    return cross_entropy(sequence_forward(inputs, params).distribution, gold);
  };

  const EncoderStates states = sequence_forward(inputs, params);
  const SequenceGrads grads = sequence_backward(states, gold, params);

  std::vector<ParamView> views;
  add_view(views, "V", params.input_transform, grads.input_transform);
  add_view(views, "W", params.recurrent, grads.recurrent);
  add_view(views, "U", params.output_transform, grads.output_transform);
  add_view(views, "b_y", params.output_bias, grads.output_bias);
  for (int t = 0; t < length; ++t) add_view(views, "inputs", inputs[t], grads.inputs[t]);
  return check_views(views, loss, epsilon);
}

TrainedModel random_micro_model(Rng& rng) {
  TrainedModel model;
  model.config.variant = Variant::IDepNnAdp;
  model.config.word_dim = 1 + static_cast<int>(rng.below(4));
  model.config.subtree_dim = 1 + static_cast<int>(rng.below(4));
  model.config.hidden_dim = 1 + static_cast<int>(rng.below(4));
  model.config.features.pos_dim = 1 + static_cast<int>(rng.below(2));
  model.config.features.pi_dim = 1 + static_cast<int>(rng.below(2));
  model.config.features.et_dim = 1 + static_cast<int>(rng.below(2));
  model.labels = {"REL_A", "REL_B", kNoneLabel};

  const int vocab = Vocab::kSpecialCount + 3;
  const int rels = 2;
  for (int i = 0; i < rels; ++i) model.rels.add("rel" + std::to_string(i));

  model.params.word.rows = random_matrix(rng, vocab, model.config.word_dim, 0.8);
  model.params.pos.rows = random_matrix(rng, 4, model.config.features.pos_dim, 0.8);
  model.params.pi.rows = random_matrix(rng, kPiZoneCount, model.config.features.pi_dim, 0.8);
  model.params.et.rows = random_matrix(rng, 4, model.config.features.et_dim, 0.8);

  model.params.rec.rel_transform.resize(rels + 1);
  for (Eigen::MatrixXd& w : model.params.rec.rel_transform) {
    w = random_matrix(rng, model.config.subtree_dim,
                      model.config.word_dim + model.config.subtree_dim, 0.7);
  }
  model.params.rec.bias = random_vector(rng, model.config.subtree_dim, 0.5);
  model.params.rec.c_leaf = random_vector(rng, model.config.subtree_dim, 0.5);

  const InputLayout layout = model.layout();
  model.params.seq.input_transform = random_matrix(rng, model.config.hidden_dim, layout.total, 0.7);
  model.params.seq.recurrent =
      random_matrix(rng, model.config.hidden_dim, model.config.hidden_dim, 0.7);
  model.params.seq.output_transform =
      random_matrix(rng, static_cast<int>(model.labels.size()), model.config.hidden_dim, 0.7);
  model.params.seq.output_bias = random_vector(rng, static_cast<int>(model.labels.size()), 0.5);
  return model;
}

CompiledInstance random_micro_instance(Rng& rng, const TrainedModel& model) {
  CompiledInstance inst;
  inst.doc_id = "synthetic";
  inst.e1 = "T1";
  inst.e2 = "T2";
  inst.gold_label = static_cast<int>(rng.below(model.labels.size()));
  const int vocab = static_cast<int>(model.params.word.rows.rows());
  const int length = 2 + static_cast<int>(rng.below(4));
  for (int t = 0; t < length; ++t) {
    UnitIds ids;
    ids.word = static_cast<int>(rng.below(vocab));
    ids.pos = static_cast<int>(rng.below(model.params.pos.rows.rows()));
    ids.pi = static_cast<int>(rng.below(kPiZoneCount));
    ids.et = static_cast<int>(rng.below(model.params.et.rows.rows()));
    inst.units.push_back(ids);
    inst.subtrees.push_back(random_compiled_subtree(rng, vocab, model.rels.size(), 2, 2));
  }
  return inst;
}

double check_full_chain_case(Rng& rng, double epsilon) {
  TrainedModel model = random_micro_model(rng);
  const CompiledInstance inst = random_micro_instance(rng, model);

  auto loss = [&]() {
    const std::vector<Eigen::VectorXd> inputs = build_inputs(inst, model, nullptr);
    return cross_entropy(sequence_forward(inputs, model.params.seq).distribution,
                         inst.gold_label);
  };

  StepGrads grads;
  instance_gradients(inst, model, grads, nullptr);
  Eigen::MatrixXd word_grads =
      Eigen::MatrixXd::Zero(model.params.word.rows.rows(), model.params.word.rows.cols());
  for (const auto& [row, g] : grads.rec.word) word_grads.row(row) = g.transpose();

  std::vector<ParamView> views;
  add_view(views, "V", model.params.seq.input_transform, grads.seq.input_transform);
  add_view(views, "W", model.params.seq.recurrent, grads.seq.recurrent);
  add_view(views, "U", model.params.seq.output_transform, grads.seq.output_transform);
  add_view(views, "b_y", model.params.seq.output_bias, grads.seq.output_bias);
  for (std::size_t i = 0; i < model.params.rec.rel_transform.size(); ++i) {
    add_view(views, "W_rel", model.params.rec.rel_transform[i], grads.rec.rel_transform[i]);
  }
  add_view(views, "rec_bias", model.params.rec.bias, grads.rec.bias);
  add_view(views, "c_leaf", model.params.rec.c_leaf, grads.rec.c_leaf);
  add_view(views, "word_table", model.params.word.rows, word_grads);
  add_view(views, "pos_table", model.params.pos.rows, grads.pos);
  add_view(views, "pi_table", model.params.pi.rows, grads.pi);
  add_view(views, "et_table", model.params.et.rows, grads.et);
  return check_views(views, loss, epsilon);
}

}  // namespace

double grad_check(GradCheckSuite suite, int num_cases, double epsilon, std::uint64_t seed) {
  if (epsilon <= 0.0) throw DataError("grad_check: epsilon must be positive");
  if (num_cases < 1) throw DataError("grad_check: num_cases must be >= 1");
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < num_cases; ++i) {
    double err = 0.0;
    switch (suite) {
      case GradCheckSuite::Recursive: err = check_recursive_case(rng, epsilon); break;
      case GradCheckSuite::Sequence: err = check_sequence_case(rng, epsilon); break;
      case GradCheckSuite::FullChain: err = check_full_chain_case(rng, epsilon); break;
    }
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace idepnn
