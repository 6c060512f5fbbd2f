// Command-line front end: ingest, candidates, train, eval, predict, ensemble,
// gradcheck, inspect, synth. Exit codes: 0 success, 2 usage/config/data error,
// 3 internal invariant failure.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "idepnn/conllu.hpp"
#include "idepnn/errors.hpp"
#include "idepnn/evaluator.hpp"
#include "idepnn/fixtures.hpp"
#include "idepnn/graph.hpp"
#include "idepnn/jsonl.hpp"
#include "idepnn/model.hpp"
#include "idepnn/standoff.hpp"
#include "idepnn/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace idepnn;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
}

struct RelationStats {
  long intra = 0;
  long inter = 0;
};

void print_corpus_summary(const Corpus& corpus, std::ostream& out) {
  long sentences = 0, tokens = 0, mentions = 0, relations = 0;
  std::map<std::string, RelationStats> by_label;
  for (const Document& doc : corpus.docs) {
    sentences += static_cast<long>(doc.sentences.size());
    for (const Sentence& s : doc.sentences) tokens += s.size();
    mentions += static_cast<long>(doc.mentions.size());
    relations += static_cast<long>(doc.gold_relations.size());
    for (const RelationInstance& rel : doc.gold_relations) {
      const EntityMention* a = doc.find_mention(rel.e1);
      const EntityMention* b = doc.find_mention(rel.e2);
      if (!a || !b) continue;
      if (a->sentence == b->sentence) {
        ++by_label[rel.label].intra;
      } else {
        ++by_label[rel.label].inter;
      }
    }
  }
  out << "documents: " << corpus.docs.size() << "  sentences: " << sentences
      << "  tokens: " << tokens << "  mentions: " << mentions << "  relations: " << relations
      << '\n';
  for (const auto& [label, stats] : by_label) {
    out << "  " << label << ": intra " << stats.intra << ", inter " << stats.inter << '\n';
  }
}

std::vector<Sentence> read_conllu_file(const std::string& path) {
  try {
    return parse_conllu(slurp(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

Document document_from_files(const std::string& doc_id, const std::string& conllu_path,
                             const std::string& txt_path, const std::string& a1_path,
                             const std::string& a2_path) {
  std::vector<Sentence> sentences = read_conllu_file(conllu_path);
  if (a1_path.empty()) {
    Document doc;
    doc.id = doc_id;
    if (!txt_path.empty()) doc.text = slurp(txt_path);
    doc.sentences = std::move(sentences);
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
      doc.sentences[i].doc_index = static_cast<int>(i);
    }
    validate_document(doc);
    return doc;
  }
  const std::string text = txt_path.empty() ? std::string() : slurp(txt_path);
  const std::string a2 = a2_path.empty() ? std::string() : slurp(a2_path);
  try {
    return import_standoff(doc_id, text, slurp(a1_path), a2, std::move(sentences));
  } catch (const DataError& e) {
    throw DataError(conllu_path + ": " + e.what());
  }
}

// ---- prediction file format: one JSON object per line, "#" header line ----

void save_predictions(const PredictionSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  json header;
  header["universe"] = set.universe;
  header["labels"] = set.labels;
  out << "#" << header.dump() << '\n';
  for (const Prediction& p : set.items) {
    json j;
    j["doc"] = p.key.doc_id;
    j["e1"] = p.key.e1;
    j["e2"] = p.key.e2;
    j["label"] = p.label;
    j["prob"] = p.probability;
    j["sentence_distance"] = p.sentence_distance;
    j["dist"] = p.distribution;
    out << j.dump() << '\n';
  }
}

PredictionSet load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  PredictionSet set;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      if (line[0] == '#') {
        const json header = json::parse(line.substr(1));
        set.universe = header.at("universe").get<std::string>();
        set.labels = header.at("labels").get<std::vector<std::string>>();
        continue;
      }
      const json j = json::parse(line);
      Prediction p;
      p.key = {j.at("doc").get<std::string>(), j.at("e1").get<std::string>(),
               j.at("e2").get<std::string>()};
      p.label = j.at("label").get<std::string>();
      p.probability = j.at("prob").get<double>();
      p.sentence_distance = j.at("sentence_distance").get<int>();
      if (j.contains("dist")) p.distribution = j.at("dist").get<std::vector<double>>();
      set.items.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw DataError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return set;
}

std::vector<CandidatePair> gold_candidates(const Corpus& corpus, const RelationSchema& schema,
                                           int k_max) {
  std::vector<CandidatePair> out;
  for (const Document& doc : corpus.docs) {
    for (CandidatePair& c : generate_candidates(doc, k_max, schema)) {
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::string universe_tag(const std::string& corpus_path, int k) {
  return fs::path(corpus_path).filename().string() + "@k" + std::to_string(k);
}

// FP/TP/FN counts by sentence distance, for bar-style plots.
std::string counts_by_k_tsv(const PredictionSet& preds, const std::vector<CandidatePair>& gold,
                            int k_max) {
  std::map<CandidateKey, std::string> gold_label;
  for (const CandidatePair& c : gold) gold_label[{c.doc_id, c.e1, c.e2}] = c.label;
  std::map<CandidateKey, const Prediction*> by_key;
  for (const Prediction& p : preds.items) by_key[p.key] = &p;

  std::ostringstream out;
  out << "k\ttp\tfp\tfn\n";
  for (int k = 0; k <= k_max; ++k) {
    long tp = 0, fp = 0, fn = 0;
    for (const CandidatePair& c : gold) {
      if (c.sentence_distance != k) continue;
      auto it = by_key.find({c.doc_id, c.e1, c.e2});
      const std::string pred = it == by_key.end() ? kNoneLabel : it->second->label;
      if (pred != kNoneLabel && pred == c.label) ++tp;
      if (pred != kNoneLabel && pred != c.label) ++fp;
      if (pred == kNoneLabel && c.label != kNoneLabel) ++fn;
    }
    out << k << '\t' << tp << '\t' << fp << '\t' << fn << '\n';
  }
  return out.str();
}

std::vector<int> parse_k_list(const std::string& csv) {
  std::vector<int> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw DataError("empty k list");
  for (int k : out) {
    if (k < 0) throw DataError("k values must be >= 0");
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_synth(int num_docs, std::uint64_t seed, const std::string& out_path,
              const std::string& schema_out) {
  FixtureSpec spec;
  spec.num_docs = num_docs;
  spec.seed = seed;
  const Corpus corpus = generate_corpus(spec);
  save_jsonl_file(corpus, out_path);
  if (!schema_out.empty()) {
    json j;
    j["labels"] = json::array();
    j["labels"].push_back(
        {{"label", spec.relation_label}, {"role1", spec.role1}, {"role2", spec.role2}});
    write_text(schema_out, j.dump(2) + "\n");
  }
  print_corpus_summary(corpus, std::cout);
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

int cmd_ingest(const std::vector<std::string>& conllu_files, const std::string& standoff_dir,
               const std::string& txt, const std::string& a1, const std::string& a2,
               const std::string& doc_id, const std::string& out_path) {
  Corpus corpus;
  if (!standoff_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(standoff_dir)) {
      if (entry.path().extension() == ".conllu") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no .conllu files under " + standoff_dir);
    for (const fs::path& parse_file : files) {
      const std::string stem = parse_file.stem().string();
      auto sibling = [&](const char* ext) {
        fs::path p = parse_file;
        p.replace_extension(ext);
        return fs::exists(p) ? p.string() : std::string();
      };
      corpus.docs.push_back(document_from_files(stem, parse_file.string(), sibling(".txt"),
                                                sibling(".a1"), sibling(".a2")));
    }
  } else {
    if (conllu_files.empty()) throw DataError("ingest needs --conllu or --standoff-dir");
    for (const std::string& path : conllu_files) {
      const std::string id = doc_id.empty() || conllu_files.size() > 1
                                 ? fs::path(path).stem().string()
                                 : doc_id;
      corpus.docs.push_back(document_from_files(id, path, txt, a1, a2));
    }
  }
  save_jsonl_file(corpus, out_path);
  print_corpus_summary(corpus, std::cout);
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

int cmd_candidates(const std::string& corpus_path, const std::string& schema_path, int k_max,
                   bool balance, std::uint64_t seed, const std::string& out_path) {
  const Corpus corpus = load_jsonl_file(corpus_path);
  const RelationSchema schema = load_schema_file(schema_path);
  std::vector<CandidatePair> cands = gold_candidates(corpus, schema, k_max);
  if (balance) cands = sample_negatives(cands, seed);

  long positives = 0;
  std::map<int, long> by_distance;
  for (const CandidatePair& c : cands) {
    if (c.positive()) ++positives;
    ++by_distance[c.sentence_distance];
  }
  std::cout << "candidates: " << cands.size() << " (" << positives << " positive, "
            << cands.size() - positives << " " << kNoneLabel << ")\n";
  for (const auto& [dist, count] : by_distance) {
    std::cout << "  distance " << dist << ": " << count << '\n';
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write " + out_path);
    save_candidates_jsonl(cands, out);
    std::cout << "wrote " << out_path << '\n';
  }
  return 0;
}

int cmd_train(const std::string& corpus_path, const std::string& dev_path, double dev_ratio,
              const std::string& schema_path, const std::string& embeddings_path,
              const ModelConfig& config, const std::string& model_path,
              const std::string& log_path) {
  const RelationSchema schema = load_schema_file(schema_path);
  Corpus train_corpus, dev_corpus;
  if (!dev_path.empty()) {
    train_corpus = load_jsonl_file(corpus_path);
    dev_corpus = load_jsonl_file(dev_path);
  } else {
    const Corpus all = load_jsonl_file(corpus_path);
    if (dev_ratio <= 0.0 || dev_ratio >= 1.0) {
      throw DataError("--dev-ratio must lie in (0, 1) when no --dev-corpus is given");
    }
    const auto splits = split_corpus(all, {1.0 - dev_ratio, dev_ratio, 0.0}, config.seed);
    train_corpus = splits[0];
    dev_corpus = splits[1];
  }

  std::vector<CandidatePair> train_cands =
      gold_candidates(train_corpus, schema, config.k_train);
  train_cands = sample_negatives(train_cands, config.seed);
  const std::vector<CandidatePair> dev_cands =
      gold_candidates(dev_corpus, schema, config.k_train);

  TrainResult result;
  if (!embeddings_path.empty()) {
    std::ifstream in(embeddings_path);
    if (!in) throw DataError("cannot open " + embeddings_path);
    const LoadedEmbeddings emb = load_embeddings(in, config.word_dim, config.seed);
    result = train(train_corpus, train_cands, dev_corpus, dev_cands, schema, config, &emb);
  } else {
    result = train(train_corpus, train_cands, dev_corpus, dev_cands, schema, config, nullptr);
  }

  std::ostringstream log;
  log << "epoch\tmean_loss\tdev_macro_f1\n";
  for (const EpochStat& s : result.history) {
    log << s.epoch << '\t' << s.mean_loss << '\t' << s.dev_macro_f1 << '\n';
  }
  if (!log_path.empty()) write_text(log_path, log.str());
  std::cout << log.str();
  std::cout << "best epoch " << result.model.meta.best_epoch << " (dev macro-F1 "
            << result.model.meta.best_dev_f1 << "), "
            << result.model.meta.skipped_candidates << " candidates skipped\n";

  save_model_file(result.model, model_path);
  std::cout << "wrote " << model_path << '\n';
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& corpus_path, int k,
                const std::string& out_path) {
  const TrainedModel model = load_model_file(model_path);
  const Corpus corpus = load_jsonl_file(corpus_path);
  const std::vector<CandidatePair> cands = gold_candidates(corpus, model.schema, k);
  const PredictionSet preds = predict(model, corpus, cands, universe_tag(corpus_path, k));
  save_predictions(preds, out_path);
  std::cout << "wrote " << preds.items.size() << " predictions to " << out_path << '\n';
  return 0;
}

int cmd_eval(const std::vector<std::string>& model_paths, const std::string& corpus_path,
             const std::string& k_list, bool with_ensemble, const std::string& threshold_list,
             const std::string& out_dir) {
  if (model_paths.empty()) throw DataError("eval needs at least one --model");
  const Corpus corpus = load_jsonl_file(corpus_path);
  const std::vector<int> ks = parse_k_list(k_list);
  std::vector<TrainedModel> models;
  for (const std::string& path : model_paths) models.push_back(load_model_file(path));
  for (std::size_t i = 1; i < models.size(); ++i) {
    if (models[i].labels != models[0].labels) {
      throw DataError("models disagree on the label list; cannot share a candidate universe");
    }
  }
  if (!out_dir.empty()) fs::create_directories(out_dir);

  auto emit = [&](const std::string& name, const std::vector<ReportCell>& grid) {
    const std::string text = format_report_grid(grid);
    std::cout << "== " << name << " ==\n" << text;
    if (!out_dir.empty()) {
      write_text(out_dir + "/" + name + ".txt", text);
      write_text(out_dir + "/" + name + ".json", report_grid_json(grid) + "\n");
    }
  };

  std::vector<std::vector<PredictionSet>> per_model_preds(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    std::vector<ReportCell> grid;
    for (int k : ks) {
      const std::vector<CandidatePair> universe = gold_candidates(corpus, models[m].schema, k);
      const PredictionSet preds =
          predict(models[m], corpus, universe, universe_tag(corpus_path, k));
      per_model_preds[m].push_back(preds);
      ReportCell cell;
      cell.train_k = models[m].config.k_train;
      cell.eval_k = k;
      cell.report = evaluate(preds, universe, k);
      grid.push_back(std::move(cell));
      if (!out_dir.empty()) {
        write_text(out_dir + "/model" + std::to_string(m) + "_k" + std::to_string(k) +
                       "_counts.tsv",
                   counts_by_k_tsv(preds, universe, k));
      }
    }
    emit("model" + std::to_string(m), grid);
  }

  if (with_ensemble || !threshold_list.empty()) {
    std::vector<ReportCell> grid;
    std::vector<PredictionSet> merged_by_k;
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      std::vector<PredictionSet> sets;
      for (std::size_t m = 0; m < models.size(); ++m) sets.push_back(per_model_preds[m][ki]);
      const std::vector<CandidatePair> universe =
          gold_candidates(corpus, models[0].schema, ks[ki]);
      PredictionSet merged = ensemble(sets);
      ReportCell cell;
      cell.train_k = models[0].config.k_train;
      cell.eval_k = ks[ki];
      cell.report = evaluate(merged, universe, ks[ki]);
      grid.push_back(std::move(cell));
      merged_by_k.push_back(std::move(merged));
    }
    emit("ensemble", grid);

    if (!threshold_list.empty()) {
      std::istringstream in(threshold_list);
      std::string item;
      while (std::getline(in, item, ',')) {
        const double p_min = std::stod(item);
        std::vector<ReportCell> tgrid;
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
          const std::vector<CandidatePair> universe =
              gold_candidates(corpus, models[0].schema, ks[ki]);
          ReportCell cell;
          cell.train_k = models[0].config.k_train;
          cell.eval_k = ks[ki];
          cell.report = evaluate(threshold_filter(merged_by_k[ki], p_min), universe, ks[ki]);
          tgrid.push_back(std::move(cell));
        }
        std::ostringstream name;
        name << "threshold_" << item;
        emit(name.str(), tgrid);
      }
    }
  }
  return 0;
}

int cmd_ensemble(const std::vector<std::string>& inputs, const std::string& out_path) {
  std::vector<PredictionSet> sets;
  for (const std::string& path : inputs) sets.push_back(load_predictions(path));
  const PredictionSet merged = ensemble(sets);
  save_predictions(merged, out_path);
  std::cout << "wrote " << merged.items.size() << " predictions to " << out_path << '\n';
  return 0;
}

int cmd_gradcheck(const std::string& suite, int cases, double epsilon, std::uint64_t seed) {
  const std::map<std::string, GradCheckSuite> suites{
      {"recursive", GradCheckSuite::Recursive},
      {"sequence", GradCheckSuite::Sequence},
      {"full", GradCheckSuite::FullChain}};
  std::vector<std::pair<std::string, GradCheckSuite>> todo;
  if (suite == "all") {
    todo.assign(suites.begin(), suites.end());
  } else {
    auto it = suites.find(suite);
    if (it == suites.end()) throw DataError("unknown suite '" + suite + "'");
    todo.push_back(*it);
  }
  for (const auto& [name, s] : todo) {
    const double worst = grad_check(s, cases, epsilon, seed);
    std::cout << name << ": max relative error " << worst << " over " << cases
              << " cases (epsilon " << epsilon << ")\n";
  }
  return 0;
}

int cmd_inspect(const std::string& corpus_path, const std::string& doc_id, const std::string& e1,
                const std::string& e2, const std::string& dot_path) {
  const Corpus corpus = load_jsonl_file(corpus_path);
  const Document* doc = corpus.find(doc_id);
  if (!doc) throw DataError("unknown document id " + doc_id);
  const EntityMention* m1 = doc->find_mention(e1);
  const EntityMention* m2 = doc->find_mention(e2);
  if (!m1) throw DataError("unknown mention id " + e1);
  if (!m2) throw DataError("unknown mention id " + e2);

  const DocumentGraph graph = build_document_graph(*doc);
  const NodeRef h1{m1->sentence, entity_head(*m1, doc->sentences[m1->sentence])};
  const NodeRef h2{m2->sentence, entity_head(*m2, doc->sentences[m2->sentence])};
  const ShortestPath path = shortest_path(graph, h1, h2);

  std::cout << "path (" << path.nodes.size() << " nodes, " << path.nexts_crossings()
            << " NEXTS crossings):\n";
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const NodeRef& n = path.nodes[i];
    std::cout << "  s" << n.sentence << ":" << n.token << "/"
              << doc->sentences[n.sentence].token(n.token).surface;
    if (i < path.edge_labels.size()) std::cout << "  --" << path.edge_labels[i] << "--";
    std::cout << '\n';
  }
  const auto units = path_token_sequence(*doc, path, *m1, *m2);
  std::cout << "sequence:";
  for (const TokenUnit& u : units) std::cout << ' ' << u.surface;
  std::cout << '\n';

  if (!dot_path.empty()) {
    std::ofstream out(dot_path);
    if (!out) throw DataError("cannot write " + dot_path);
    write_dot(out, graph, &path);
    std::cout << "wrote " << dot_path << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-sentence relation extraction over dependency paths"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style key=value config file; flags override it");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus (canonical JSONL)");
  int synth_docs = 200;
  std::uint64_t synth_seed = 1;
  std::string synth_out = "corpus.jsonl", synth_schema;
  synth->add_option("--num-docs", synth_docs);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--out", synth_out)->required();
  synth->add_option("--schema-out", synth_schema, "Also write the fixture schema JSON");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Convert CoNLL-U (+ standoff) into JSONL");
  std::vector<std::string> ingest_conllu;
  std::string ingest_dir, ingest_txt, ingest_a1, ingest_a2, ingest_id, ingest_out;
  ingest->add_option("--conllu", ingest_conllu)->check(CLI::ExistingFile);
  ingest->add_option("--standoff-dir", ingest_dir, "Directory of <doc>.conllu/.txt/.a1/.a2")
      ->check(CLI::ExistingDirectory);
  ingest->add_option("--txt", ingest_txt)->check(CLI::ExistingFile);
  ingest->add_option("--a1", ingest_a1)->check(CLI::ExistingFile);
  ingest->add_option("--a2", ingest_a2)->check(CLI::ExistingFile);
  ingest->add_option("--doc-id", ingest_id);
  ingest->add_option("--out", ingest_out)->required();

  // candidates
  auto* candidates = app.add_subcommand("candidates", "Enumerate typed candidate pairs");
  std::string cand_corpus, cand_schema, cand_out;
  int cand_k = 3;
  bool cand_balance = false;
  std::uint64_t cand_seed = 1;
  candidates->add_option("--corpus", cand_corpus)->required()->check(CLI::ExistingFile);
  candidates->add_option("--schema", cand_schema)->required()->check(CLI::ExistingFile);
  candidates->add_option("--k-max", cand_k);
  candidates->add_flag("--sample-negatives", cand_balance,
                       "Down-sample NONE pairs to the positive count");
  candidates->add_option("--seed", cand_seed);
  candidates->add_option("--out", cand_out);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train one model variant");
  std::string train_corpus, train_dev, train_schema, train_embeddings, train_model;
  std::string train_log, train_variant = "iDepNN-SDP";
  double train_dev_ratio = 0.2;
  ModelConfig cfg;
  train_cmd->add_option("--corpus", train_corpus)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--dev-corpus", train_dev)->check(CLI::ExistingFile);
  train_cmd->add_option("--dev-ratio", train_dev_ratio, "Held-out share when no --dev-corpus");
  train_cmd->add_option("--schema", train_schema)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--embeddings", train_embeddings, "Pretrained word vectors (text)")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--variant", train_variant, "iDepNN-ADP | iDepNN-SDP | i-biRNN");
  train_cmd->add_option("--k-train", cfg.k_train);
  train_cmd->add_option("--word-dim", cfg.word_dim);
  train_cmd->add_option("--subtree-dim", cfg.subtree_dim);
  train_cmd->add_option("--hidden-dim", cfg.hidden_dim);
  train_cmd->add_option("--subtree-depth", cfg.subtree_depth, "-1 for unlimited");
  train_cmd->add_option("--min-freq", cfg.min_freq);
  train_cmd->add_option("--learning-rate", cfg.learning_rate);
  train_cmd->add_option("--clip-norm", cfg.clip_norm);
  train_cmd->add_option("--max-epochs", cfg.max_epochs);
  train_cmd->add_option("--patience", cfg.patience);
  train_cmd->add_flag("--train-embeddings", cfg.train_word_embeddings,
                      "Fine-tune pretrained rows");
  bool no_pos = false, no_pi = false, no_et = false;
  train_cmd->add_flag("--no-pos", no_pos);
  train_cmd->add_flag("--no-pi", no_pi);
  train_cmd->add_flag("--no-et", no_et);
  train_cmd->add_option("--seed", cfg.seed);
  train_cmd->add_option("--model", train_model, "Model output path")->required();
  train_cmd->add_option("--log", train_log, "Per-epoch TSV log path");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Score candidates with a trained model");
  std::string pred_model, pred_corpus, pred_out;
  int pred_k = 1;
  predict_cmd->add_option("--model", pred_model)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--corpus", pred_corpus)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--k-eval", pred_k);
  predict_cmd->add_option("--out", pred_out)->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate models over a sentence-range grid");
  std::vector<std::string> eval_models;
  std::string eval_corpus, eval_k = "0,1,2,3", eval_thresholds, eval_out_dir;
  bool eval_ensemble = false;
  eval_cmd->add_option("--model", eval_models)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--corpus", eval_corpus)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--k-eval", eval_k, "Comma-separated k caps");
  eval_cmd->add_flag("--ensemble", eval_ensemble, "Also score the union of all models");
  eval_cmd->add_option("--threshold", eval_thresholds,
                       "Comma-separated probability cutoffs applied to the ensemble");
  eval_cmd->add_option("--out-dir", eval_out_dir);

  // ensemble
  auto* ens_cmd = app.add_subcommand("ensemble", "Union-merge prediction files");
  std::vector<std::string> ens_inputs;
  std::string ens_out;
  ens_cmd->add_option("--in", ens_inputs)->required()->check(CLI::ExistingFile);
  ens_cmd->add_option("--out", ens_out)->required();

  // gradcheck
  auto* grad_cmd = app.add_subcommand("gradcheck", "Verify gradients against finite differences");
  std::string grad_suite = "all";
  int grad_cases = 50;
  double grad_eps = 1e-4;
  std::uint64_t grad_seed = 46;
  grad_cmd->add_option("--suite", grad_suite, "recursive | sequence | full | all");
  grad_cmd->add_option("--cases", grad_cases);
  grad_cmd->add_option("--epsilon", grad_eps);
  grad_cmd->add_option("--seed", grad_seed);

  // inspect
  auto* inspect_cmd = app.add_subcommand("inspect", "Show the path between two mentions");
  std::string ins_corpus, ins_doc, ins_e1, ins_e2, ins_dot;
  inspect_cmd->add_option("--corpus", ins_corpus)->required()->check(CLI::ExistingFile);
  inspect_cmd->add_option("--doc", ins_doc)->required();
  inspect_cmd->add_option("--e1", ins_e1)->required();
  inspect_cmd->add_option("--e2", ins_e2)->required();
  inspect_cmd->add_option("--dot", ins_dot, "Write the document graph as DOT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) return cmd_synth(synth_docs, synth_seed, synth_out, synth_schema);
    if (*ingest) {
      return cmd_ingest(ingest_conllu, ingest_dir, ingest_txt, ingest_a1, ingest_a2, ingest_id,
                        ingest_out);
    }
    if (*candidates) {
      return cmd_candidates(cand_corpus, cand_schema, cand_k, cand_balance, cand_seed, cand_out);
    }
    if (*train_cmd) {
      cfg.variant = variant_from_name(train_variant);
      cfg.features.pos = !no_pos;
      cfg.features.pi = !no_pi;
      cfg.features.et = !no_et;
      return cmd_train(train_corpus, train_dev, train_dev_ratio, train_schema, train_embeddings,
                       cfg, train_model, train_log);
    }
    if (*predict_cmd) return cmd_predict(pred_model, pred_corpus, pred_k, pred_out);
    if (*eval_cmd) {
      return cmd_eval(eval_models, eval_corpus, eval_k, eval_ensemble, eval_thresholds,
                      eval_out_dir);
    }
    if (*ens_cmd) return cmd_ensemble(ens_inputs, ens_out);
    if (*grad_cmd) return cmd_gradcheck(grad_suite, grad_cases, grad_eps, grad_seed);
    if (*inspect_cmd) return cmd_inspect(ins_corpus, ins_doc, ins_e1, ins_e2, ins_dot);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
