#include "idepnn/evaluator.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "idepnn/errors.hpp"

namespace idepnn {

using nlohmann::json;

namespace {

double safe_ratio(long num, long den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

void finish_counts(LabelCounts& c) {
  c.precision = safe_ratio(c.tp, c.tp + c.fp);
  c.recall = safe_ratio(c.tp, c.tp + c.fn);
  const double pr = c.precision + c.recall;
  c.f1 = pr == 0.0 ? 0.0 : 2.0 * c.precision * c.recall / pr;
}

}  // namespace

std::vector<CandidatePair> filter_by_k(const std::vector<CandidatePair>& candidates, int k) {
  if (k < 0) throw DataError("filter_by_k: k must be >= 0");
  std::vector<CandidatePair> out;
  for (const CandidatePair& c : candidates) {
    if (c.sentence_distance <= k) out.push_back(c);
  }
  return out;
}

EvalReport evaluate(const PredictionSet& predictions, const std::vector<CandidatePair>& gold,
                    int k) {
  const std::vector<CandidatePair> universe = filter_by_k(gold, k);
  std::map<CandidateKey, std::string> gold_label;
  for (const CandidatePair& c : universe) {
    gold_label[CandidateKey{c.doc_id, c.e1, c.e2}] = c.label;
  }

  std::map<CandidateKey, std::string> predicted;
  for (const Prediction& p : predictions.items) {
    if (!gold_label.count(p.key)) {
      throw DataError("prediction references unknown candidate (" + p.key.doc_id + ", " +
                      p.key.e1 + ", " + p.key.e2 + ")");
    }
    predicted[p.key] = p.label;
  }

  EvalReport report;
  report.k_eval = k;
  for (const auto& [key, gold_lab] : gold_label) {
    auto it = predicted.find(key);
    const std::string& pred_lab = it == predicted.end() ? kNoneLabel : it->second;
    if (pred_lab != kNoneLabel) {
      if (pred_lab == gold_lab) {
        ++report.per_label[pred_lab].tp;
      } else {
        ++report.per_label[pred_lab].fp;
        if (gold_lab != kNoneLabel) ++report.per_label[gold_lab].fn;
      }
    } else if (gold_lab != kNoneLabel) {
      ++report.per_label[gold_lab].fn;
    }
  }

  double sum_p = 0.0, sum_r = 0.0, sum_f1 = 0.0;
  for (auto& [label, counts] : report.per_label) {
    finish_counts(counts);
    sum_p += counts.precision;
    sum_r += counts.recall;
    sum_f1 += counts.f1;
    report.positive_predictions += counts.tp + counts.fp;
  }
  const std::size_t n = report.per_label.size();
  if (n > 0) {
    report.macro_precision = sum_p / n;
    report.macro_recall = sum_r / n;
    report.macro_f1 = sum_f1 / n;
  }
  return report;
}

PredictionSet ensemble(const std::vector<PredictionSet>& sets) {
  PredictionSet out;
  std::string universe;
  for (const PredictionSet& s : sets) {
    if (s.universe.empty()) continue;
    if (universe.empty()) {
      universe = s.universe;
    } else if (universe != s.universe) {
      throw DataError("ensemble: prediction sets cover different candidate universes ('" +
                      universe + "' vs '" + s.universe + "')");
    }
  }
  out.universe = universe;
  if (!sets.empty()) out.labels = sets.front().labels;

  std::map<CandidateKey, Prediction> merged;
  for (const PredictionSet& s : sets) {
    for (const Prediction& p : s.items) {
      if (p.label == kNoneLabel) continue;
      auto [it, inserted] = merged.try_emplace(p.key, p);
      if (inserted) continue;
      Prediction& kept = it->second;
      if (p.label == kept.label) {
        // Agreeing models: keep the strongest vote.
        if (p.probability > kept.probability) kept = p;
      } else if (p.probability > kept.probability) {
        kept = p;
      }
    }
  }
  out.items.reserve(merged.size());
  for (auto& [key, p] : merged) out.items.push_back(std::move(p));
  return out;
}

PredictionSet threshold_filter(const PredictionSet& predictions, double p_min) {
  if (p_min < 0.0 || p_min > 1.0) throw DataError("threshold_filter: p_min must be in [0, 1]");
  PredictionSet out;
  out.universe = predictions.universe;
  out.labels = predictions.labels;
  for (const Prediction& p : predictions.items) {
    if (p.probability >= p_min) out.items.push_back(p);
  }
  return out;
}

namespace {

std::string k_label(int k) { return k == 0 ? "k=0" : "k<=" + std::to_string(k); }

}  // namespace

std::string format_report_grid(const std::vector<ReportCell>& grid) {
  std::ostringstream out;
  out << std::left << std::setw(9) << "train_k" << std::setw(9) << "eval_k" << std::right
      << std::setw(7) << "pr" << std::setw(8) << "P" << std::setw(8) << "R" << std::setw(8)
      << "F1" << '\n';
  out << std::fixed << std::setprecision(3);
  for (const ReportCell& cell : grid) {
    out << std::left << std::setw(9) << k_label(cell.train_k) << std::setw(9)
        << k_label(cell.eval_k) << std::right << std::setw(7) << cell.report.positive_predictions
        << std::setw(8) << cell.report.macro_precision << std::setw(8)
        << cell.report.macro_recall << std::setw(8) << cell.report.macro_f1 << '\n';
  }
  return out.str();
}

std::string report_grid_json(const std::vector<ReportCell>& grid) {
  json arr = json::array();
  for (const ReportCell& cell : grid) {
    json j;
    j["train_k"] = cell.train_k;
    j["eval_k"] = cell.eval_k;
    j["pr"] = cell.report.positive_predictions;
    j["macro"] = {{"p", cell.report.macro_precision},
                  {"r", cell.report.macro_recall},
                  {"f1", cell.report.macro_f1}};
    json per_label = json::object();
    for (const auto& [label, c] : cell.report.per_label) {
      per_label[label] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn},
                          {"p", c.precision}, {"r", c.recall}, {"f1", c.f1}};
    }
    j["per_label"] = std::move(per_label);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace idepnn
