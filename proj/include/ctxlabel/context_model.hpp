#ifndef CTXLABEL_CONTEXT_MODEL_HPP
#define CTXLABEL_CONTEXT_MODEL_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxlabel/error.hpp"
#include "ctxlabel/fuzzy_spatial.hpp"
#include "ctxlabel/geometry.hpp"
#include "ctxlabel/scene.hpp"

namespace ctxlabel {

/// Mean relation vector of an ordered concept pair.
struct MeanRelation {
  std::size_t count = 0;
  Memberships mu{};
  friend bool operator==(const MeanRelation&, const MeanRelation&) = default;
};

struct ContextEntry {
  double cooc = 0.0;
  std::optional<Memberships> mean;  // absent when the ordered pair was never observed
};

/// Concept priors, symmetric co-occurrence table and mean relation vectors
/// per ordered concept pair.
class ContextModel {
 public:
  ContextModel() = default;

  explicit ContextModel(std::vector<std::string> vocabulary)
      : vocabulary_(std::move(vocabulary)),
        prior_(vocabulary_.size(), 0.0),
        cooc_(vocabulary_.size() * vocabulary_.size(), 0.0),
        relations_(vocabulary_.size() * vocabulary_.size()) {}

  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
  std::size_t size() const noexcept { return vocabulary_.size(); }

  double prior(int c) const { return prior_.at(checked(c)); }
  double cooc(int l, int m) const { return cooc_.at(checked(l) * size() + checked(m)); }
  const MeanRelation& relation(int l, int m) const { return relations_.at(checked(l) * size() + checked(m)); }

  /// Mean relation vector, or nullptr for an unseen ordered pair.
  const Memberships* mean_relation(int l, int m) const {
    const MeanRelation& r = relation(l, m);
    return r.count == 0 ? nullptr : &r.mu;
  }

  void set_prior(int c, double p) { prior_.at(checked(c)) = p; }
  void set_cooc(int l, int m, double p) {
    cooc_.at(checked(l) * size() + checked(m)) = p;
    cooc_.at(checked(m) * size() + checked(l)) = p;
  }
  void set_relation(int l, int m, MeanRelation r) { relations_.at(checked(l) * size() + checked(m)) = r; }

  int concept_index(std::string_view name) const {
    auto it = std::find(vocabulary_.begin(), vocabulary_.end(), name);
    if (it == vocabulary_.end()) throw Error(ErrorKind::UnknownConcept, "concept '" + std::string(name) + "' not in context model");
    return static_cast<int>(it - vocabulary_.begin());
  }

  friend bool operator==(const ContextModel&, const ContextModel&) = default;

 private:
  std::size_t checked(int c) const {
    if (c < 0 || c >= static_cast<int>(size())) throw Error(ErrorKind::UnknownConcept, "concept index " + std::to_string(c) + " outside vocabulary");
    return static_cast<std::size_t>(c);
  }

  std::vector<std::string> vocabulary_;
  std::vector<double> prior_;
  std::vector<double> cooc_;  // row-major, symmetric
  std::vector<MeanRelation> relations_;
};

inline ContextEntry lookup(const ContextModel& model, std::string_view l, std::string_view m) {
  const int li = model.concept_index(l), mi = model.concept_index(m);
  ContextEntry e;
  e.cooc = model.cooc(li, mi);
  if (const Memberships* mu = model.mean_relation(li, mi)) e.mean = *mu;
  return e;
}

/// Estimates the context statistics from ground-truth scenes.
///
/// Priors count regions. Co-occurrence counts each unordered concept pair once
/// per scene in which both are present (a concept pairs with itself when at
/// least two regions carry it). Mean relations average over all ordered region
/// pairs; samples are summed in sorted order so the result does not depend on
/// the order of `scenes`.
inline ContextModel train_context(const std::vector<Scene>& scenes, const FuzzyParams& params) {
  if (scenes.empty()) throw Error(ErrorKind::MissingInput, "no training scenes");
  params.validate();
  const std::vector<std::string>& vocabulary = scenes.front().vocabulary();
  const std::size_t n = vocabulary.size();
  std::vector<std::size_t> concept_count(n, 0);
  std::vector<std::size_t> pair_count(n * n, 0);  // upper triangle used
  std::vector<std::vector<Memberships>> samples(n * n);
  std::size_t regions_total = 0;

  for (const Scene& scene : scenes) {
    if (scene.vocabulary() != vocabulary) throw Error(ErrorKind::UnknownConcept, "training scenes use different vocabularies");
    std::vector<int> truth;
    std::vector<std::size_t> present(n, 0);
    for (const Region& r : scene.regions()) {
      if (!r.truth) throw Error(ErrorKind::MissingInput, "region " + std::to_string(r.id) + " has no ground truth");
      truth.push_back(*r.truth);
      ++present[static_cast<std::size_t>(*r.truth)];
      ++concept_count[static_cast<std::size_t>(*r.truth)];
      ++regions_total;
    }
    for (std::size_t l = 0; l < n; ++l) {
      if (present[l] >= 2) ++pair_count[l * n + l];
      if (present[l] == 0) continue;
      for (std::size_t m = l + 1; m < n; ++m)
        if (present[m] > 0) ++pair_count[l * n + m];
    }
    if (scene.size() < 2) continue;
    const SceneGeometry geometry(scene);
    for (std::size_t i = 0; i < scene.size(); ++i)
      for (std::size_t j = 0; j < scene.size(); ++j) {
        if (i == j) continue;
        const RelationVector r = relation_vector(geometry.descriptors(i, j), params);
        samples[static_cast<std::size_t>(truth[i]) * n + static_cast<std::size_t>(truth[j])].push_back(r.mu);
      }
  }

  ContextModel model(vocabulary);
  for (std::size_t c = 0; c < n; ++c)
    model.set_prior(static_cast<int>(c), static_cast<double>(concept_count[c]) / static_cast<double>(regions_total));

  std::size_t pairs_total = 0;
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t m = l; m < n; ++m) pairs_total += pair_count[l * n + m];
  if (pairs_total > 0)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t m = l; m < n; ++m)
        model.set_cooc(static_cast<int>(l), static_cast<int>(m),
                       static_cast<double>(pair_count[l * n + m]) / static_cast<double>(pairs_total));

  for (std::size_t p = 0; p < n * n; ++p) {
    auto& s = samples[p];
    if (s.empty()) continue;
    std::sort(s.begin(), s.end());
    MeanRelation mean;
    mean.count = s.size();
    for (std::size_t c = 0; c < kRelationSize; ++c) {
      double sum = 0.0, lo = s.front()[c], hi = s.front()[c];
      for (const Memberships& mu : s) {
        sum += mu[c];
        lo = std::min(lo, mu[c]);
        hi = std::max(hi, mu[c]);
      }
      // Rounding in the sum can push the quotient one ulp past the sample range.
      mean.mu[c] = std::clamp(sum / static_cast<double>(s.size()), lo, hi);
    }
    model.set_relation(static_cast<int>(p / n), static_cast<int>(p % n), mean);
  }
  return model;
}

/// `{vocabulary, prior:{name: p}, cooc:[[...]], mean_relation:{"l|m": {count, mu:[5]}}}`
inline std::string serialize_context_model(const ContextModel& model) {
  const std::size_t n = model.size();
  Json prior = Json::object();
  for (std::size_t c = 0; c < n; ++c) prior[model.vocabulary()[c]] = model.prior(static_cast<int>(c));
  std::string out = "{\n";
  out += "  \"vocabulary\": " + Json(model.vocabulary()).dump() + ",\n";
  out += "  \"prior\": " + prior.dump() + ",\n";
  out += "  \"cooc\": [";
  for (std::size_t l = 0; l < n; ++l) {
    Json row = Json::array();
    for (std::size_t m = 0; m < n; ++m) row.push_back(model.cooc(static_cast<int>(l), static_cast<int>(m)));
    out += (l == 0 ? "\n    " : ",\n    ") + row.dump();
  }
  out += n == 0 ? "],\n" : "\n  ],\n";
  out += "  \"mean_relation\": {";
  bool first = true;
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t m = 0; m < n; ++m) {
      const MeanRelation& r = model.relation(static_cast<int>(l), static_cast<int>(m));
      if (r.count == 0) continue;
      Json entry;
      entry["count"] = r.count;
      entry["mu"] = r.mu;
      out += first ? "\n    " : ",\n    ";
      out += Json(model.vocabulary()[l] + "|" + model.vocabulary()[m]).dump() + ": " + entry.dump();
      first = false;
    }
  out += first ? "}\n}\n" : "\n  }\n}\n";
  return out;
}

inline ContextModel parse_context_model(std::string_view text) {
  const Json doc = detail::parse_json(text, "context model");
  ContextModel model(detail::get_field<std::vector<std::string>>(doc, "vocabulary", "context model"));
  const std::size_t n = model.size();
  if (!doc.contains("prior") || !doc["prior"].is_object()) throw Error(ErrorKind::Malformed, "context model lacks 'prior' object");
  for (const auto& [name, p] : doc["prior"].items()) {
    if (!p.is_number()) throw Error(ErrorKind::Malformed, "prior of '" + name + "' is not a number");
    model.set_prior(model.concept_index(name), p.get<double>());
  }
  const auto cooc = detail::get_field<std::vector<std::vector<double>>>(doc, "cooc", "context model");
  if (cooc.size() != n) throw Error(ErrorKind::Malformed, "cooc must be a square table over the vocabulary");
  for (std::size_t l = 0; l < n; ++l) {
    if (cooc[l].size() != n) throw Error(ErrorKind::Malformed, "cooc must be a square table over the vocabulary");
    for (std::size_t m = 0; m < n; ++m)
      if (cooc[l][m] != cooc[m][l]) throw Error(ErrorKind::Malformed, "cooc must be symmetric");
  }
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t m = l; m < n; ++m) model.set_cooc(static_cast<int>(l), static_cast<int>(m), cooc[l][m]);

  if (!doc.contains("mean_relation") || !doc["mean_relation"].is_object())
    throw Error(ErrorKind::Malformed, "context model lacks 'mean_relation' object");
  for (const auto& [key, entry] : doc["mean_relation"].items()) {
    const auto bar = key.find('|');
    if (bar == std::string::npos) throw Error(ErrorKind::Malformed, "mean_relation key '" + key + "' is not 'l|m'");
    MeanRelation r;
    r.count = detail::get_field<std::size_t>(entry, "count", "mean_relation");
    r.mu = detail::get_field<Memberships>(entry, "mu", "mean_relation");
    if (r.count == 0) throw Error(ErrorKind::Malformed, "mean_relation entries must have a positive count");
    model.set_relation(model.concept_index(key.substr(0, bar)), model.concept_index(key.substr(bar + 1)), r);
  }
  return model;
}

}  // namespace ctxlabel

#endif
