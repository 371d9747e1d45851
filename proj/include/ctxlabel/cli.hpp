#ifndef CTXLABEL_CLI_HPP
#define CTXLABEL_CLI_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxlabel/appearance.hpp"
#include "ctxlabel/context_model.hpp"
#include "ctxlabel/error.hpp"
#include "ctxlabel/eval.hpp"
#include "ctxlabel/experiment.hpp"
#include "ctxlabel/fuzzy_spatial.hpp"
#include "ctxlabel/geometry.hpp"
#include "ctxlabel/params.hpp"
#include "ctxlabel/pipeline.hpp"
#include "ctxlabel/raster.hpp"
#include "ctxlabel/render.hpp"
#include "ctxlabel/scene.hpp"
#include "ctxlabel/synth.hpp"

namespace ctxlabel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "short write to '" + path.string() + "'");
}

/// Writes to `path`, or to `out` when no path was given.
inline void emit(const std::string& path, std::string_view bytes, std::ostream& out) {
  if (path.empty()) out << bytes;
  else write_file(path, bytes);
}

inline Scene load_scene(const std::string& path) {
  try {
    return parse_scene(read_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

/// Defaults, overlaid by the params file when given.
inline Params load_params(const std::string& path) {
  if (path.empty()) return Params{};
  return parse_params(read_file(path));
}

inline std::string relate_csv(const Scene& scene, const FuzzyParams& params) {
  auto num = [](double x) { return Json(x).dump(); };
  const SceneGeometry geometry(scene);
  std::string out = "i,j,theta,d,rho,mu_above,mu_below,mu_beside,mu_near,mu_sur,dominant\n";
  for (std::size_t i = 0; i < scene.size(); ++i)
    for (std::size_t j = 0; j < scene.size(); ++j) {
      if (i == j) continue;
      const RelationVector r = relation_vector(geometry.descriptors(i, j), params);
      out += std::to_string(scene.regions()[i].id) + "," + std::to_string(scene.regions()[j].id) + "," +
             num(r.descriptors.theta) + "," + num(r.descriptors.d) + "," + num(r.descriptors.rho);
      for (double mu : r.mu) out += "," + num(mu);
      out += "," + std::string(to_string(r.dominant)) + "\n";
    }
  return out;
}

/// Runs one command line; diagnostics go to `err`, data to files or `out`.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Contextual region labeling with fuzzy spatial relations", "ctxlabel"};
  app.require_subcommand(1);

  // synth
  GeneratorConfig gen;
  std::string out_dir;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled scene corpus");
  synth->add_option("--seed", gen.seed, "Corpus seed");
  synth->add_option("--count", gen.scene_count, "Number of scenes")->check(CLI::PositiveNumber);
  synth->add_option("--ambiguity", gen.ambiguity, "Color overlap of confusable concepts")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--width", gen.width, "Frame width");
  synth->add_option("--height", gen.height, "Frame height");
  synth->add_option("--out-dir", out_dir, "Output directory")->required();

  // features
  std::string scene_path, raster_path, out_path;
  auto* features = app.add_subcommand("features", "Compute region features from a raster");
  features->add_option("scene", scene_path, "Scene file")->required();
  features->add_option("--raster", raster_path, "Binary PPM of the scene")->required();
  features->add_option("--out", out_path, "Scene file with features (default: stdout)");

  // train-appearance
  std::vector<std::string> scene_paths;
  double sigma = 2.0, cost = 10.0;
  auto* train_app = app.add_subcommand("train-appearance", "Train the appearance classifier");
  train_app->add_option("scenes", scene_paths, "Training scene files")->required();
  train_app->add_option("--sigma", sigma, "RBF kernel width")->check(CLI::PositiveNumber);
  train_app->add_option("--cost", cost, "Regularization cost")->check(CLI::PositiveNumber);
  train_app->add_option("--out", out_path, "Model file")->required();

  // train-context
  std::string params_path;
  auto* train_ctx = app.add_subcommand("train-context", "Estimate the context model");
  train_ctx->add_option("scenes", scene_paths, "Training scene files")->required();
  train_ctx->add_option("--params", params_path, "Params file");
  train_ctx->add_option("--out", out_path, "Context model file")->required();

  // relate
  auto* relate = app.add_subcommand("relate", "Dump pairwise descriptors and fuzzy relations as CSV");
  relate->add_option("scene", scene_path, "Scene file")->required();
  relate->add_option("--params", params_path, "Params file");
  relate->add_option("--out", out_path, "CSV file (default: stdout)");

  // infer
  std::string appearance_path, context_path, method_name = "icm";
  std::optional<std::size_t> top_n;
  auto* infer_cmd = app.add_subcommand("infer", "Label the regions of a scene");
  infer_cmd->add_option("scene", scene_path, "Scene file")->required();
  infer_cmd->add_option("--appearance-model", appearance_path, "Appearance model (optional when regions carry decisions)");
  infer_cmd->add_option("--context-model", context_path, "Context model")->required();
  infer_cmd->add_option("--params", params_path, "Params file");
  infer_cmd->add_option("--top-n", top_n, "Candidates per region")->check(CLI::PositiveNumber);
  infer_cmd->add_option("--method", method_name, "icm | exhaustive | appearance-only")
      ->check(CLI::IsMember({"icm", "exhaustive", "appearance-only"}));
  infer_cmd->add_option("--out", out_path, "Predictions file (default: stdout)");

  // eval
  std::vector<std::string> pred_paths;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  eval_cmd->add_option("truth", scene_paths, "Ground-truth scene files")->required();
  eval_cmd->add_option("--pred", pred_paths, "Prediction files, same order")->required();
  eval_cmd->add_option("--out", out_path, "Report CSV (default: stdout)");

  // experiment
  std::string config_path;
  auto* experiment = app.add_subcommand("experiment", "Synthetic appearance-only vs contextual comparison");
  experiment->add_option("--config", config_path, "Experiment config file")->required();
  experiment->add_option("--out-dir", out_dir, "Directory for comparison.csv and topn_curve.csv");

  // render
  std::string pred_path;
  bool use_truth = false;
  auto* render_cmd = app.add_subcommand("render", "Paint a labeling as a PPM image");
  render_cmd->add_option("scene", scene_path, "Scene file")->required();
  auto* pred_opt = render_cmd->add_option("--pred", pred_path, "Predictions file");
  auto* truth_flag = render_cmd->add_flag("--truth", use_truth, "Use the scene's ground truth");
  pred_opt->excludes(truth_flag);
  render_cmd->add_option("--out", out_path, "PPM file")->required();

  if (argc <= 1) {
    err << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front()) err << sub->help();
    return kExitUsage;
  }

  try {
    if (synth->parsed()) {
      const std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      for (int i = 0; i < gen.scene_count; ++i) {
        const SyntheticScene s = generate_scene(gen, i);
        char stem[32];
        std::snprintf(stem, sizeof stem, "scene_%04d", i);
        write_file(dir / (std::string(stem) + ".json"), serialize_scene(s.scene));
        write_file(dir / (std::string(stem) + ".ppm"), encode_ppm(s.raster));
      }
    } else if (features->parsed()) {
      const Scene scene = load_scene(scene_path);
      const Raster raster = decode_ppm(read_file(raster_path));
      const Scene bare = scene.with_regions([](Region& r) { r.features.reset(); });
      const Scene with = scene.with_regions([&](Region& r) { r.features = extract_features(bare, r.id, &raster); });
      emit(out_path, serialize_scene(with), out);
    } else if (train_app->parsed()) {
      std::vector<Scene> scenes;
      for (const std::string& p : scene_paths) scenes.push_back(load_scene(p));
      std::vector<TrainingExample> examples;
      for (const Scene& s : scenes) {
        if (s.vocabulary() != scenes.front().vocabulary()) throw Error(ErrorKind::UnknownConcept, "training scenes use different vocabularies");
        for (const Region& r : s.regions()) {
          if (!r.truth) throw Error(ErrorKind::MissingInput, "region " + std::to_string(r.id) + " has no ground truth");
          examples.push_back({extract_features(s, r.id), *r.truth});
        }
      }
      write_file(out_path, serialize_appearance_model(train_classifier(examples, scenes.front().vocabulary(), sigma, cost)));
    } else if (train_ctx->parsed()) {
      const Params params = load_params(params_path);
      std::vector<Scene> scenes;
      for (const std::string& p : scene_paths) scenes.push_back(load_scene(p));
      write_file(out_path, serialize_context_model(train_context(scenes, params.fuzzy)));
    } else if (relate->parsed()) {
      const Params params = load_params(params_path);
      emit(out_path, relate_csv(load_scene(scene_path), params.fuzzy), out);
    } else if (infer_cmd->parsed()) {
      Params params = load_params(params_path);
      if (top_n) params.top_n = *top_n;
      const Scene scene = load_scene(scene_path);
      std::optional<AppearanceModel> appearance;
      if (!appearance_path.empty()) appearance = parse_appearance_model(read_file(appearance_path));
      auto context = std::make_shared<const ContextModel>(parse_context_model(read_file(context_path)));
      const Predictions predictions =
          infer(scene, appearance ? &*appearance : nullptr, std::move(context), params, parse_method(method_name));
      emit(out_path, serialize_predictions(predictions), out);
    } else if (eval_cmd->parsed()) {
      if (pred_paths.size() != scene_paths.size())
        throw Error(ErrorKind::InvalidArgument, "need one predictions file per truth scene");
      std::optional<EvalReport> report;
      for (std::size_t i = 0; i < scene_paths.size(); ++i) {
        const Scene truth = load_scene(scene_paths[i]);
        if (!report) report.emplace(truth.vocabulary());
        report->add(truth, parse_predictions(read_file(pred_paths[i])));
      }
      emit(out_path, report->to_csv(), out);
    } else if (experiment->parsed()) {
      const ExperimentReport report = run_experiment(parse_experiment_config(read_file(config_path)));
      const std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
      std::filesystem::create_directories(dir);
      write_file(dir / "comparison.csv", comparison_csv(report));
      write_file(dir / "topn_curve.csv", topn_curve_csv(report));
    } else if (render_cmd->parsed()) {
      const Scene scene = load_scene(scene_path);
      if (pred_path.empty() && !use_truth) throw Error(ErrorKind::MissingInput, "render needs --pred or --truth");
      const auto labels = use_truth ? labels_from_truth(scene) : labels_from_predictions(scene, parse_predictions(read_file(pred_path)));
      write_file(out_path, encode_ppm(render(scene, labels)));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace ctxlabel::cli

#endif
