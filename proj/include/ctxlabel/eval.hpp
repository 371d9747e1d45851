#ifndef CTXLABEL_EVAL_HPP
#define CTXLABEL_EVAL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctxlabel/error.hpp"
#include "ctxlabel/pipeline.hpp"
#include "ctxlabel/scene.hpp"

namespace ctxlabel {

/// Region-level accuracy with a confusion table (rows: truth, columns: prediction).
class EvalReport {
 public:
  EvalReport() = default;
  explicit EvalReport(std::vector<std::string> vocabulary)
      : vocabulary_(std::move(vocabulary)),
        confusion_(vocabulary_.size() * vocabulary_.size(), 0) {}

  void record(int truth, int predicted) {
    const std::size_t n = vocabulary_.size();
    if (truth < 0 || predicted < 0 || truth >= static_cast<int>(n) || predicted >= static_cast<int>(n))
      throw Error(ErrorKind::UnknownConcept, "label outside evaluation vocabulary");
    ++confusion_[static_cast<std::size_t>(truth) * n + static_cast<std::size_t>(predicted)];
  }

  /// Adds a scene: every region needs ground truth and exactly one prediction.
  void add(const Scene& truth, const Predictions& predictions) {
    if (truth.vocabulary() != vocabulary_) throw Error(ErrorKind::UnknownConcept, "scene vocabulary differs from the report's");
    std::set<int> predicted_ids;
    for (const Prediction& p : predictions)
      if (!predicted_ids.insert(p.region_id).second)
        throw Error(ErrorKind::DuplicateId, "region " + std::to_string(p.region_id) + " predicted twice");
    std::set<int> truth_ids;
    for (const Region& r : truth.regions()) truth_ids.insert(r.id);
    if (predicted_ids != truth_ids) throw Error(ErrorKind::UnknownRegion, "prediction region ids do not match the scene's");
    for (const Prediction& p : predictions) {
      const Region& r = truth.region(p.region_id);
      if (!r.truth) throw Error(ErrorKind::MissingInput, "region " + std::to_string(r.id) + " has no ground truth");
      record(*r.truth, truth.concept_index(p.label));
    }
  }

  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }

  std::size_t count(int truth, int predicted) const {
    return confusion_.at(static_cast<std::size_t>(truth) * vocabulary_.size() + static_cast<std::size_t>(predicted));
  }

  std::size_t concept_total(int c) const {
    std::size_t s = 0;
    for (std::size_t m = 0; m < vocabulary_.size(); ++m) s += count(c, static_cast<int>(m));
    return s;
  }

  std::size_t total() const {
    std::size_t s = 0;
    for (std::size_t x : confusion_) s += x;
    return s;
  }

  std::size_t correct() const {
    std::size_t s = 0;
    for (std::size_t c = 0; c < vocabulary_.size(); ++c) s += count(static_cast<int>(c), static_cast<int>(c));
    return s;
  }

  double accuracy() const { return total() == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(total()); }

  /// Absent when no region of the concept was evaluated.
  std::optional<double> concept_accuracy(int c) const {
    const std::size_t n = concept_total(c);
    if (n == 0) return std::nullopt;
    return static_cast<double>(count(c, c)) / static_cast<double>(n);
  }

  /// Per-concept table followed by the confusion matrix.
  std::string to_csv() const {
    std::string out = "concept,regions,correct,accuracy\n";
    char buf[64];
    for (std::size_t c = 0; c < vocabulary_.size(); ++c) {
      const auto acc = concept_accuracy(static_cast<int>(c));
      std::snprintf(buf, sizeof buf, "%.6f", acc.value_or(0.0));
      out += vocabulary_[c] + "," + std::to_string(concept_total(static_cast<int>(c))) + "," +
             std::to_string(count(static_cast<int>(c), static_cast<int>(c))) + "," + (acc ? buf : "") + "\n";
    }
    std::snprintf(buf, sizeof buf, "%.6f", accuracy());
    out += "overall," + std::to_string(total()) + "," + std::to_string(correct()) + "," + buf + "\n\n";
    out += "truth\\predicted";
    for (const std::string& name : vocabulary_) out += "," + name;
    out += "\n";
    for (std::size_t l = 0; l < vocabulary_.size(); ++l) {
      out += vocabulary_[l];
      for (std::size_t m = 0; m < vocabulary_.size(); ++m) out += "," + std::to_string(count(static_cast<int>(l), static_cast<int>(m)));
      out += "\n";
    }
    return out;
  }

 private:
  std::vector<std::string> vocabulary_;
  std::vector<std::size_t> confusion_;
};

inline EvalReport evaluate(const Predictions& predictions, const Scene& truth) {
  EvalReport report(truth.vocabulary());
  report.add(truth, predictions);
  return report;
}

}  // namespace ctxlabel

#endif
