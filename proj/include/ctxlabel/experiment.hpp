#ifndef CTXLABEL_EXPERIMENT_HPP
#define CTXLABEL_EXPERIMENT_HPP

#include <cstddef>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ctxlabel/appearance.hpp"
#include "ctxlabel/context_model.hpp"
#include "ctxlabel/energy.hpp"
#include "ctxlabel/eval.hpp"
#include "ctxlabel/params.hpp"
#include "ctxlabel/pipeline.hpp"
#include "ctxlabel/synth.hpp"

namespace ctxlabel {

struct ExperimentConfig {
  GeneratorConfig generator;
  Params params;
  double sigma = 2.0;
  double cost = 10.0;
  bool sweep_top_n = true;                // icm at every n in 1..|vocabulary|
  std::size_t exhaustive_subsample = 0;   // test scenes also solved exactly
};

/// Experiment config file: params keys plus seed, count, width, height,
/// ambiguity, sigma, cost, sweep_top_n (0/1) and exhaustive_subsample.
inline ExperimentConfig parse_experiment_config(std::string_view text) {
  using detail::parse_number;
  ExperimentConfig cfg;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "seed") cfg.generator.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "count") cfg.generator.scene_count = parse_number<int>(key, value);
    else if (key == "width") cfg.generator.width = parse_number<int>(key, value);
    else if (key == "height") cfg.generator.height = parse_number<int>(key, value);
    else if (key == "ambiguity") cfg.generator.ambiguity = parse_number<double>(key, value);
    else if (key == "sigma") cfg.sigma = parse_number<double>(key, value);
    else if (key == "cost") cfg.cost = parse_number<double>(key, value);
    else if (key == "sweep_top_n") cfg.sweep_top_n = parse_number<int>(key, value) != 0;
    else if (key == "exhaustive_subsample") cfg.exhaustive_subsample = parse_number<std::size_t>(key, value);
    else if (!apply_param(cfg.params, key, value)) throw Error(ErrorKind::Malformed, "unknown experiment key '" + key + "'");
  }
  cfg.params.validate();
  cfg.generator.validate();
  return cfg;
}

struct ExperimentRow {
  std::string method;
  std::size_t top_n = 0;  // 0: not applicable
  EvalReport report;
};

struct ExperimentReport {
  std::vector<std::string> vocabulary;
  std::size_t train_scenes = 0;
  std::size_t test_scenes = 0;
  std::vector<ExperimentRow> rows;

  const ExperimentRow* find(std::string_view method, std::size_t top_n) const {
    for (const ExperimentRow& r : rows)
      if (r.method == method && r.top_n == top_n) return &r;
    return nullptr;
  }
};

/// Models trained on one corpus split.
struct TrainedModels {
  AppearanceModel appearance;
  std::shared_ptr<const ContextModel> context;
};

inline TrainedModels train_models(const std::vector<Scene>& train, const FuzzyParams& fuzzy, double sigma, double cost) {
  if (train.empty()) throw Error(ErrorKind::MissingInput, "no training scenes");
  std::vector<TrainingExample> examples;
  for (const Scene& s : train)
    for (const Region& r : s.regions()) {
      if (!r.truth) throw Error(ErrorKind::MissingInput, "region " + std::to_string(r.id) + " has no ground truth");
      examples.push_back({extract_features(s, r.id), *r.truth});
    }
  TrainedModels out;
  out.appearance = train_classifier(examples, train.front().vocabulary(), sigma, cost);
  out.context = std::make_shared<const ContextModel>(train_context(train, fuzzy));
  return out;
}

/// Generates the corpus, trains on even-indexed scenes and evaluates the
/// appearance-only and contextual labelings on odd-indexed ones.
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.params.validate();
  const std::vector<SyntheticScene> corpus = generate_corpus(config.generator);
  std::vector<Scene> train, test;
  for (std::size_t i = 0; i < corpus.size(); ++i) (i % 2 == 0 ? train : test).push_back(corpus[i].scene);
  if (train.empty() || test.empty()) throw Error(ErrorKind::InvalidArgument, "train/test split leaves one side empty; need at least 2 scenes");

  const TrainedModels models = train_models(train, config.params.fuzzy, config.sigma, config.cost);
  const std::vector<std::string>& vocabulary = config.generator.vocabulary;

  ExperimentReport report;
  report.vocabulary = vocabulary;
  report.train_scenes = train.size();
  report.test_scenes = test.size();

  std::vector<std::size_t> sweep;
  if (config.sweep_top_n)
    for (std::size_t n = 1; n <= vocabulary.size(); ++n) sweep.push_back(n);
  else
    sweep.push_back(config.params.top_n);

  const std::size_t subsample = std::min(config.exhaustive_subsample, test.size());
  ExperimentRow appearance{"appearance-only", 0, EvalReport(vocabulary)};
  std::vector<ExperimentRow> icm_rows;
  for (std::size_t n : sweep) icm_rows.push_back({"icm", n, EvalReport(vocabulary)});
  ExperimentRow sub_appearance{"appearance-only@subsample", 0, EvalReport(vocabulary)};
  ExperimentRow sub_icm{"icm@subsample", config.params.top_n, EvalReport(vocabulary)};
  ExperimentRow sub_exhaustive{"exhaustive@subsample", config.params.top_n, EvalReport(vocabulary)};

  for (std::size_t t = 0; t < test.size(); ++t) {
    const Scene& scene = test[t];
    const std::vector<FuzzyLabelSet> labels = region_labels(scene, &models.appearance);
    Params full = config.params;
    full.top_n = vocabulary.size();
    const LabelingInstance instance = build_instance(scene, labels, models.context, full);

    const LabelingInstance top1 = instance.with_top_n(1);
    const Predictions app = make_predictions(scene, top1, appearance_labeling(top1));
    appearance.report.add(scene, app);
    for (ExperimentRow& row : icm_rows) {
      const LabelingInstance cut = instance.with_top_n(row.top_n);
      row.report.add(scene, make_predictions(scene, cut, icm(cut, config.params.max_sweeps)));
    }
    if (t < subsample) {
      const LabelingInstance cut = instance.with_top_n(config.params.top_n);
      sub_appearance.report.add(scene, app);
      sub_icm.report.add(scene, make_predictions(scene, cut, icm(cut, config.params.max_sweeps)));
      sub_exhaustive.report.add(scene, make_predictions(scene, cut, exhaustive_min(cut)));
    }
  }

  report.rows.push_back(std::move(appearance));
  for (ExperimentRow& row : icm_rows) report.rows.push_back(std::move(row));
  if (subsample > 0) {
    report.rows.push_back(std::move(sub_appearance));
    report.rows.push_back(std::move(sub_icm));
    report.rows.push_back(std::move(sub_exhaustive));
  }
  return report;
}

namespace detail {

inline std::string fixed6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace detail

/// `method,top_n,accuracy,<concept>...`; empty cells for n/a values.
inline std::string comparison_csv(const ExperimentReport& report) {
  std::string out = "method,top_n,accuracy";
  for (const std::string& name : report.vocabulary) out += "," + name;
  out += "\n";
  for (const ExperimentRow& row : report.rows) {
    out += row.method + "," + (row.top_n == 0 ? std::string() : std::to_string(row.top_n)) + "," +
           detail::fixed6(row.report.accuracy());
    for (std::size_t c = 0; c < report.vocabulary.size(); ++c) {
      const auto acc = row.report.concept_accuracy(static_cast<int>(c));
      out += "," + (acc ? detail::fixed6(*acc) : std::string());
    }
    out += "\n";
  }
  return out;
}

/// Accuracy of the contextual labeling against the candidate count n.
inline std::string topn_curve_csv(const ExperimentReport& report) {
  std::string out = "top_n,accuracy\n";
  for (const ExperimentRow& row : report.rows)
    if (row.method == "icm") out += std::to_string(row.top_n) + "," + detail::fixed6(row.report.accuracy()) + "\n";
  return out;
}

}  // namespace ctxlabel

#endif
