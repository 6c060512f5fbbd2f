#include "idepnn/model.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "idepnn/errors.hpp"

namespace idepnn {

using nlohmann::json;

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::IDepNnAdp: return "iDepNN-ADP";
    case Variant::IDepNnSdp: return "iDepNN-SDP";
    case Variant::IBiRnn: return "i-biRNN";
  }
  throw InternalError("unknown variant");
}

Variant variant_from_name(const std::string& name) {
  std::string low = name;
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (low == "idepnn-adp" || low == "adp") return Variant::IDepNnAdp;
  if (low == "idepnn-sdp" || low == "sdp") return Variant::IDepNnSdp;
  if (low == "i-birnn" || low == "birnn") return Variant::IBiRnn;
  throw DataError("unknown variant '" + name +
                  "' (expected iDepNN-ADP, iDepNN-SDP or i-biRNN)");
}

std::string ModelConfig::to_json() const {
  json j;
  j["variant"] = variant_name(variant);
  j["word_dim"] = word_dim;
  j["subtree_dim"] = subtree_dim;
  j["hidden_dim"] = hidden_dim;
  j["features"] = {{"pos", features.pos},     {"pi", features.pi},
                   {"et", features.et},       {"pos_dim", features.pos_dim},
                   {"pi_dim", features.pi_dim}, {"et_dim", features.et_dim}};
  j["k_train"] = k_train;
  j["subtree_depth"] = subtree_depth;
  j["min_freq"] = min_freq;
  j["learning_rate"] = learning_rate;
  j["clip_norm"] = clip_norm;
  j["max_epochs"] = max_epochs;
  j["patience"] = patience;
  j["train_word_embeddings"] = train_word_embeddings;
  j["seed"] = seed;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  ModelConfig c;
  try {
    const json j = json::parse(text);
    c.variant = variant_from_name(j.at("variant").get<std::string>());
    c.word_dim = j.at("word_dim").get<int>();
    c.subtree_dim = j.at("subtree_dim").get<int>();
    c.hidden_dim = j.at("hidden_dim").get<int>();
    const json& f = j.at("features");
    c.features.pos = f.at("pos").get<bool>();
    c.features.pi = f.at("pi").get<bool>();
    c.features.et = f.at("et").get<bool>();
    c.features.pos_dim = f.at("pos_dim").get<int>();
    c.features.pi_dim = f.at("pi_dim").get<int>();
    c.features.et_dim = f.at("et_dim").get<int>();
    c.k_train = j.at("k_train").get<int>();
    c.subtree_depth = j.at("subtree_depth").get<int>();
    c.min_freq = j.at("min_freq").get<long>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.clip_norm = j.at("clip_norm").get<double>();
    c.max_epochs = j.at("max_epochs").get<int>();
    c.patience = j.at("patience").get<int>();
    c.train_word_embeddings = j.at("train_word_embeddings").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw DataError(std::string("model config: ") + e.what());
  }
  return c;
}

int TrainedModel::label_id(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

InputLayout TrainedModel::layout() const {
  return input_layout(config.mode(), config.word_dim, config.subtree_dim, config.features);
}

namespace {

constexpr char kMagic[4] = {'I', 'D', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  write_u64(out, bits);
}

void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("model file truncated");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw DataError("model file truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double read_f64(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

std::string read_string(std::istream& in) {
  const std::uint64_t n = read_u64(in);
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw DataError("model file truncated");
  }
  return s;
}

void write_tensor(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m) {
  write_string(out, name);
  write_u64(out, static_cast<std::uint64_t>(m.rows()));
  write_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) write_f64(out, m(r, c));
  }
}

Eigen::MatrixXd read_tensor(std::istream& in, const std::string& expected_name) {
  const std::string name = read_string(in);
  if (name != expected_name) {
    throw DataError("model file: expected tensor '" + expected_name + "', found '" + name + "'");
  }
  const auto rows = static_cast<Eigen::Index>(read_u64(in));
  const auto cols = static_cast<Eigen::Index>(read_u64(in));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = read_f64(in);
  }
  return m;
}

void write_vector_tensor(std::ostream& out, const std::string& name, const Eigen::VectorXd& v) {
  write_tensor(out, name, Eigen::MatrixXd(v));
}

Eigen::VectorXd read_vector_tensor(std::istream& in, const std::string& name) {
  const Eigen::MatrixXd m = read_tensor(in, name);
  return Eigen::VectorXd(m.col(0));
}

void write_table(std::ostream& out, const std::string& name, const EmbeddingTable& t) {
  write_tensor(out, name, t.rows);
  write_u32(out, t.trainable ? 1 : 0);
  write_u64(out, t.row_trainable.size());
  for (std::uint8_t b : t.row_trainable) out.put(static_cast<char>(b));
}

EmbeddingTable read_table(std::istream& in, const std::string& name) {
  EmbeddingTable t;
  t.rows = read_tensor(in, name);
  t.trainable = read_u32(in) != 0;
  const std::uint64_t n = read_u64(in);
  t.row_trainable.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    int c = in.get();
    if (c == EOF) throw DataError("model file truncated");
    t.row_trainable[i] = static_cast<std::uint8_t>(c);
  }
  return t;
}

}  // namespace

void save_model(const TrainedModel& model, std::ostream& out) {
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_string(out, model.config.to_json());

  json meta;
  meta["schema"] = json::array();
  for (const RelationSchema::Entry& e : model.schema.entries) {
    meta["schema"].push_back({{"label", e.label}, {"role1", e.role1}, {"role2", e.role2}});
  }
  meta["labels"] = model.labels;
  meta["epochs_run"] = model.meta.epochs_run;
  meta["best_epoch"] = model.meta.best_epoch;
  meta["best_dev_f1"] = model.meta.best_dev_f1;
  meta["skipped_candidates"] = model.meta.skipped_candidates;
  meta["clamped_losses"] = model.meta.clamped_losses;
  write_string(out, meta.dump());

  write_u64(out, static_cast<std::uint64_t>(model.words.size()));
  for (int id = 0; id < model.words.size(); ++id) {
    write_string(out, model.words.token(id));
    write_u64(out, static_cast<std::uint64_t>(model.words.freq(id)));
  }
  write_u64(out, static_cast<std::uint64_t>(model.pos_tags.size()));
  for (int id = 0; id < model.pos_tags.size(); ++id) write_string(out, model.pos_tags.tag(id));
  write_u64(out, static_cast<std::uint64_t>(model.etypes.size()));
  for (int id = 0; id < model.etypes.size(); ++id) write_string(out, model.etypes.tag(id));
  write_u64(out, static_cast<std::uint64_t>(model.rels.size()));
  for (int id = 0; id < model.rels.size(); ++id) write_string(out, model.rels.label(id));

  write_tensor(out, "V", model.params.seq.input_transform);
  write_tensor(out, "W", model.params.seq.recurrent);
  write_tensor(out, "U", model.params.seq.output_transform);
  write_vector_tensor(out, "b_y", model.params.seq.output_bias);

  write_u64(out, model.params.rec.rel_transform.size());
  for (std::size_t i = 0; i < model.params.rec.rel_transform.size(); ++i) {
    write_tensor(out, "W_rel." + std::to_string(i), model.params.rec.rel_transform[i]);
  }
  write_vector_tensor(out, "rec_bias", model.params.rec.bias);
  write_vector_tensor(out, "c_leaf", model.params.rec.c_leaf);

  write_table(out, "emb.word", model.params.word);
  write_table(out, "emb.pos", model.params.pos);
  write_table(out, "emb.pi", model.params.pi);
  write_table(out, "emb.et", model.params.et);
  if (!out) throw DataError("model write failed");
}

TrainedModel load_model(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("not a model file (bad magic bytes)");
  }
  const std::uint32_t version = read_u32(in);
  if (version != kVersion) {
    throw DataError("unsupported model file version " + std::to_string(version) +
                    " (this build reads version " + std::to_string(kVersion) + ")");
  }
  TrainedModel model;
  model.config = ModelConfig::from_json(read_string(in));

  try {
    const json meta = json::parse(read_string(in));
    for (const json& je : meta.at("schema")) {
      model.schema.entries.push_back({je.at("label").get<std::string>(),
                                      je.at("role1").get<std::string>(),
                                      je.at("role2").get<std::string>()});
    }
    model.labels = meta.at("labels").get<std::vector<std::string>>();
    model.meta.epochs_run = meta.at("epochs_run").get<int>();
    model.meta.best_epoch = meta.at("best_epoch").get<int>();
    model.meta.best_dev_f1 = meta.at("best_dev_f1").get<double>();
    model.meta.skipped_candidates = meta.at("skipped_candidates").get<long>();
    model.meta.clamped_losses = meta.at("clamped_losses").get<long>();
  } catch (const json::exception& e) {
    throw DataError(std::string("model metadata: ") + e.what());
  }

  const std::uint64_t vocab_size = read_u64(in);
  for (std::uint64_t id = 0; id < vocab_size; ++id) {
    const std::string token = read_string(in);
    const long freq = static_cast<long>(read_u64(in));
    if (id < Vocab::kSpecialCount) {
      model.words.bump_freq(static_cast<int>(id), freq);
    } else {
      model.words.add(token, freq);
    }
  }
  const std::uint64_t pos_size = read_u64(in);
  for (std::uint64_t id = 0; id < pos_size; ++id) {
    const std::string tag = read_string(in);
    if (id >= 2) model.pos_tags.add(tag);
  }
  const std::uint64_t et_size = read_u64(in);
  for (std::uint64_t id = 0; id < et_size; ++id) {
    const std::string tag = read_string(in);
    if (id >= 2) model.etypes.add(tag);
  }
  const std::uint64_t rel_size = read_u64(in);
  for (std::uint64_t id = 0; id < rel_size; ++id) model.rels.add(read_string(in));

  model.params.seq.input_transform = read_tensor(in, "V");
  model.params.seq.recurrent = read_tensor(in, "W");
  model.params.seq.output_transform = read_tensor(in, "U");
  model.params.seq.output_bias = read_vector_tensor(in, "b_y");

  const std::uint64_t rel_tensors = read_u64(in);
  model.params.rec.rel_transform.resize(rel_tensors);
  for (std::uint64_t i = 0; i < rel_tensors; ++i) {
    model.params.rec.rel_transform[i] = read_tensor(in, "W_rel." + std::to_string(i));
  }
  model.params.rec.bias = read_vector_tensor(in, "rec_bias");
  model.params.rec.c_leaf = read_vector_tensor(in, "c_leaf");

  model.params.word = read_table(in, "emb.word");
  model.params.pos = read_table(in, "emb.pos");
  model.params.pi = read_table(in, "emb.pi");
  model.params.et = read_table(in, "emb.et");
  return model;
}

void save_model_file(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  save_model(model, out);
}

TrainedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return load_model(in);
}

}  // namespace idepnn
