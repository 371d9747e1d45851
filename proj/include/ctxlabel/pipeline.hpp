#ifndef CTXLABEL_PIPELINE_HPP
#define CTXLABEL_PIPELINE_HPP

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ctxlabel/appearance.hpp"
#include "ctxlabel/context_model.hpp"
#include "ctxlabel/energy.hpp"
#include "ctxlabel/error.hpp"
#include "ctxlabel/fuzzy_spatial.hpp"
#include "ctxlabel/geometry.hpp"
#include "ctxlabel/params.hpp"
#include "ctxlabel/scene.hpp"

namespace ctxlabel {

enum class Method { Icm, Exhaustive, AppearanceOnly };

inline Method parse_method(std::string_view name) {
  if (name == "icm") return Method::Icm;
  if (name == "exhaustive") return Method::Exhaustive;
  if (name == "appearance-only") return Method::AppearanceOnly;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

/// Full fuzzy label sets of every region (no top-n cut). Stored decision
/// values take precedence; otherwise stored features are scored by `model`.
inline std::vector<FuzzyLabelSet> region_labels(const Scene& scene, const AppearanceModel* model) {
  if (model != nullptr && model->vocabulary != scene.vocabulary())
    throw Error(ErrorKind::UnknownConcept, "appearance model vocabulary differs from the scene's");
  std::vector<FuzzyLabelSet> out;
  out.reserve(scene.size());
  for (const Region& r : scene.regions()) {
    if (r.decisions) {
      out.push_back(fuzzy_memberships(*r.decisions));
    } else if (model != nullptr) {
      out.push_back(fuzzy_memberships(decision_values(*model, extract_features(scene, r.id))));
    } else {
      throw Error(ErrorKind::MissingInput, "region " + std::to_string(r.id) + " has no decision values and no appearance model was given");
    }
  }
  return out;
}

/// Labeling instance for `scene` with candidate sets cut to `params.top_n`.
inline LabelingInstance build_instance(const Scene& scene, const std::vector<FuzzyLabelSet>& labels,
                                       std::shared_ptr<const ContextModel> context, const Params& params) {
  params.validate();
  if (!context) throw Error(ErrorKind::MissingInput, "no context model");
  if (context->vocabulary() != scene.vocabulary())
    throw Error(ErrorKind::UnknownConcept, "context model vocabulary differs from the scene's");
  std::vector<FuzzyLabelSet> cut;
  for (const FuzzyLabelSet& ls : labels) cut.push_back(candidates(ls, params.top_n));
  const SceneGeometry geometry(scene);
  return LabelingInstance(std::move(cut), scene_relations(geometry, params.fuzzy), std::move(context), params.energy);
}

inline Assignment solve(const LabelingInstance& instance, Method method, int max_sweeps = kDefaultMaxSweeps) {
  switch (method) {
    case Method::Icm: return icm(instance, max_sweeps);
    case Method::Exhaustive: return exhaustive_min(instance);
    case Method::AppearanceOnly: return appearance_labeling(instance);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown method");
}

// ---------------------------------------------------------------------------
// Predictions file: {"<region id>": {"concept", "belief", "final_energy"}, ...}
// ---------------------------------------------------------------------------

struct Prediction {
  int region_id = 0;
  std::string label;
  double belief = 0.0;
  double final_energy = 0.0;  // energy of the whole assignment
  friend bool operator==(const Prediction&, const Prediction&) = default;
};

using Predictions = std::vector<Prediction>;

inline Predictions make_predictions(const Scene& scene, const LabelingInstance& instance, const Assignment& assignment) {
  Predictions out;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const int c = assignment.labels.at(i);
    out.push_back({scene.regions()[i].id, scene.vocabulary().at(static_cast<std::size_t>(c)), instance.labels(i).belief(c),
                   assignment.energy});
  }
  return out;
}

inline Predictions infer(const Scene& scene, const AppearanceModel* appearance, std::shared_ptr<const ContextModel> context,
                         const Params& params, Method method) {
  const LabelingInstance instance = build_instance(scene, region_labels(scene, appearance), std::move(context), params);
  return make_predictions(scene, instance, solve(instance, method, params.max_sweeps));
}

inline std::string serialize_predictions(const Predictions& predictions) {
  std::string out = "{";
  bool first = true;
  for (const Prediction& p : predictions) {
    Json entry;
    entry["concept"] = p.label;
    entry["belief"] = p.belief;
    entry["final_energy"] = p.final_energy;
    out += first ? "\n  " : ",\n  ";
    out += Json(std::to_string(p.region_id)).dump() + ": " + entry.dump();
    first = false;
  }
  out += first ? "}\n" : "\n}\n";
  return out;
}

inline Predictions parse_predictions(std::string_view text) {
  const Json doc = detail::parse_json(text, "predictions");
  if (!doc.is_object()) throw Error(ErrorKind::Malformed, "predictions document must be an object");
  Predictions out;
  for (const auto& [key, entry] : doc.items()) {
    Prediction p;
    std::size_t used = 0;
    try {
      p.region_id = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || key.empty()) throw Error(ErrorKind::Malformed, "prediction key '" + key + "' is not a region id");
    p.label = detail::get_field<std::string>(entry, "concept", "prediction " + key);
    p.belief = detail::get_field<double>(entry, "belief", "prediction " + key);
    p.final_energy = detail::get_field<double>(entry, "final_energy", "prediction " + key);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace ctxlabel

#endif
