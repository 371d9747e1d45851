#ifndef CTXLABEL_APPEARANCE_HPP
#define CTXLABEL_APPEARANCE_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ctxlabel/error.hpp"
#include "ctxlabel/raster.hpp"
#include "ctxlabel/scene.hpp"

namespace ctxlabel {

// ---------------------------------------------------------------------------
// Features: 54-bin HSV histogram (6 hue x 3 saturation x 3 value, linear bins)
// followed by an 8-bin Sobel edge-direction histogram. Each block is
// L1-normalized on its own; a block with no samples stays all-zero.
// ---------------------------------------------------------------------------

inline constexpr int kHueBins = 6;
inline constexpr int kSatBins = 3;
inline constexpr int kValBins = 3;
inline constexpr std::size_t kColorBins = kHueBins * kSatBins * kValBins;
inline constexpr std::size_t kEdgeBins = 8;
inline constexpr std::size_t kFeatureSize = kColorBins + kEdgeBins;

/// Largest Sobel magnitude an 8-bit image can produce (255 * sqrt(20)).
inline const double kMaxSobelMagnitude = 255.0 * std::sqrt(20.0);
inline const double kEdgeThreshold = 0.1 * kMaxSobelMagnitude;

struct Hsv {
  double h = 0.0;  // degrees, [0, 360)
  double s = 0.0;  // [0, 1]
  double v = 0.0;  // [0, 1]
};

inline Hsv rgb_to_hsv(Rgb c) {
  const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? delta / mx : 0.0;
  if (delta > 0.0) {
    double h;
    if (mx == r) h = std::fmod((g - b) / delta, 6.0);
    else if (mx == g) h = (b - r) / delta + 2.0;
    else h = (r - g) / delta + 4.0;
    h *= 60.0;
    if (h < 0.0) h += 360.0;
    out.h = h >= 360.0 ? 0.0 : h;
  }
  return out;
}

inline Rgb hsv_to_rgb(Hsv c) {
  double h = std::fmod(c.h, 360.0);
  if (h < 0.0) h += 360.0;
  const double s = std::clamp(c.s, 0.0, 1.0), v = std::clamp(c.v, 0.0, 1.0);
  const double chroma = v * s;
  const double hp = h / 60.0;
  const double x = chroma * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = chroma, g = x; break;
    case 1: r = x, g = chroma; break;
    case 2: g = chroma, b = x; break;
    case 3: g = x, b = chroma; break;
    case 4: r = x, b = chroma; break;
    default: r = chroma, b = x; break;
  }
  const double m = v - chroma;
  auto to8 = [](double u) { return static_cast<std::uint8_t>(std::lround(std::clamp(u, 0.0, 1.0) * 255.0)); };
  return {to8(r + m), to8(g + m), to8(b + m)};
}

inline std::size_t hsv_bin(const Hsv& c) {
  const int h = std::min(kHueBins - 1, static_cast<int>(c.h / (360.0 / kHueBins)));
  const int s = std::min(kSatBins - 1, static_cast<int>(c.s * kSatBins));
  const int v = std::min(kValBins - 1, static_cast<int>(c.v * kValBins));
  return static_cast<std::size_t>((h * kSatBins + s) * kValBins + v);
}

/// Bin of a gradient direction atan2(gy, gx) in [-pi, pi].
inline std::size_t edge_bin(double angle) {
  const double width = 2.0 * std::numbers::pi / kEdgeBins;
  const auto bin = static_cast<std::size_t>(std::floor((angle + std::numbers::pi) / width));
  return std::min(bin, kEdgeBins - 1);
}

namespace detail {

inline void l1_normalize(std::span<double> block) {
  const double sum = std::accumulate(block.begin(), block.end(), 0.0);
  if (sum > 0.0)
    for (double& x : block) x /= sum;
}

}  // namespace detail

/// Features of one region: stored ones pass through unchanged, otherwise they
/// are computed from `raster` (same dimensions as the scene).
inline FeatureVector extract_features(const Scene& scene, int id, const Raster* raster = nullptr) {
  const Region& region = scene.region(id);
  if (region.features) return *region.features;
  if (raster == nullptr)
    throw Error(ErrorKind::MissingInput, "region " + std::to_string(id) + " has no stored features and no raster was given");
  if (raster->width() != scene.width() || raster->height() != scene.height())
    throw Error(ErrorKind::DimensionMismatch, "raster is " + std::to_string(raster->width()) + "x" +
                                                  std::to_string(raster->height()) + ", scene is " +
                                                  std::to_string(scene.width()) + "x" + std::to_string(scene.height()));
  const Raster& img = *raster;
  auto gray = [&](int x, int y) {
    x = std::clamp(x, 0, img.width() - 1);
    y = std::clamp(y, 0, img.height() - 1);
    const Rgb& p = img.at(x, y);
    return (static_cast<double>(p.r) + p.g + p.b) / 3.0;
  };

  FeatureVector f(kFeatureSize, 0.0);
  region.mask.for_each_pixel([&](Pixel p) {
    f[hsv_bin(rgb_to_hsv(img.at(p.x, p.y)))] += 1.0;
    const int x = p.x, y = p.y;
    const double gx = (gray(x + 1, y - 1) + 2.0 * gray(x + 1, y) + gray(x + 1, y + 1)) -
                      (gray(x - 1, y - 1) + 2.0 * gray(x - 1, y) + gray(x - 1, y + 1));
    const double gy = (gray(x - 1, y + 1) + 2.0 * gray(x, y + 1) + gray(x + 1, y + 1)) -
                      (gray(x - 1, y - 1) + 2.0 * gray(x, y - 1) + gray(x + 1, y - 1));
    if (std::hypot(gx, gy) > kEdgeThreshold) f[kColorBins + edge_bin(std::atan2(gy, gx))] += 1.0;
  });
  detail::l1_normalize(std::span<double>(f.data(), kColorBins));
  detail::l1_normalize(std::span<double>(f.data() + kColorBins, kEdgeBins));
  return f;
}

// ---------------------------------------------------------------------------
// One-vs-rest kernel classifier. Each class gets a least-squares fit to +1/-1
// targets with an RBF kernel, a bias and ridge 1/cost (the bordered LS-SVM
// system). All classes share the training points and one factorization.
// ---------------------------------------------------------------------------

struct TrainingExample {
  FeatureVector features;
  int label = 0;  // concept index
};

struct AppearanceModel {
  std::vector<std::string> vocabulary;
  double sigma = 2.0;
  double cost = 10.0;
  std::vector<FeatureVector> points;
  std::vector<std::vector<double>> dual;  // dual[t][l]: coefficient of point t for class l
  std::vector<double> bias;               // bias[l]

  std::size_t dimension() const noexcept { return points.empty() ? 0 : points.front().size(); }
  friend bool operator==(const AppearanceModel&, const AppearanceModel&) = default;
};

inline double rbf_kernel(std::span<const double> u, std::span<const double> v, double sigma) {
  double sq = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double diff = u[i] - v[i];
    sq += diff * diff;
  }
  return std::exp(-sq / (2.0 * sigma * sigma));
}

inline AppearanceModel train_classifier(const std::vector<TrainingExample>& examples,
                                        std::vector<std::string> vocabulary, double sigma = 2.0, double cost = 10.0) {
  if (!(sigma > 0.0) || !(cost > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma and cost must be positive");
  if (examples.empty()) throw Error(ErrorKind::MissingInput, "no training examples");
  const std::size_t n = examples.size(), classes = vocabulary.size();
  const std::size_t dim = examples.front().features.size();
  std::vector<std::size_t> per_class(classes, 0);
  for (const TrainingExample& ex : examples) {
    if (ex.features.size() != dim) throw Error(ErrorKind::DimensionMismatch, "training features have inconsistent lengths");
    if (ex.label < 0 || ex.label >= static_cast<int>(classes)) throw Error(ErrorKind::UnknownConcept, "training label outside vocabulary");
    ++per_class[static_cast<std::size_t>(ex.label)];
  }
  for (std::size_t l = 0; l < classes; ++l)
    if (per_class[l] == 0) throw Error(ErrorKind::MissingInput, "no training examples for concept '" + vocabulary[l] + "'");

  Eigen::MatrixXd h(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double k = rbf_kernel(examples[a].features, examples[b].features, sigma);
      h(a, b) = k;
      h(b, a) = k;
    }
    h(a, a) += 1.0 / cost;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "kernel system is not positive definite");

  // H eta = 1 and H nu_l = y_l give b_l = sum(nu_l) / sum(eta), alpha_l = nu_l - b_l eta.
  Eigen::MatrixXd rhs(n, classes + 1);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t l = 0; l < classes; ++l) rhs(t, l) = examples[t].label == static_cast<int>(l) ? 1.0 : -1.0;
    rhs(t, classes) = 1.0;
  }
  const Eigen::MatrixXd sol = llt.solve(rhs);
  const Eigen::VectorXd eta = sol.col(classes);
  const double eta_sum = eta.sum();

  AppearanceModel model;
  model.vocabulary = std::move(vocabulary);
  model.sigma = sigma;
  model.cost = cost;
  model.bias.resize(classes);
  model.dual.assign(n, std::vector<double>(classes, 0.0));
  for (std::size_t l = 0; l < classes; ++l) {
    const double b = sol.col(l).sum() / eta_sum;
    model.bias[l] = b;
    for (std::size_t t = 0; t < n; ++t) model.dual[t][l] = sol(t, l) - b * eta(t);
  }
  model.points.reserve(n);
  for (const TrainingExample& ex : examples) model.points.push_back(ex.features);
  return model;
}

/// D_l(v) for every class l.
inline std::vector<double> decision_values(const AppearanceModel& model, std::span<const double> v) {
  if (!model.points.empty() && v.size() != model.dimension())
    throw Error(ErrorKind::DimensionMismatch, "feature length " + std::to_string(v.size()) + " != model dimension " +
                                                  std::to_string(model.dimension()));
  std::vector<double> out = model.bias;
  for (std::size_t t = 0; t < model.points.size(); ++t) {
    const double k = rbf_kernel(model.points[t], v, model.sigma);
    for (std::size_t l = 0; l < out.size(); ++l) out[l] += model.dual[t][l] * k;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fuzzy labels
// ---------------------------------------------------------------------------

struct FuzzyLabelSet {
  std::vector<int> candidates;  // concept indices, belief descending, ties by index
  std::vector<double> beliefs;  // one per vocabulary concept, sums to 1

  double belief(int c) const { return beliefs.at(static_cast<std::size_t>(c)); }
  bool has_candidate(int c) const { return std::find(candidates.begin(), candidates.end(), c) != candidates.end(); }
  friend bool operator==(const FuzzyLabelSet&, const FuzzyLabelSet&) = default;
};

/// Piecewise-linear clamp of a decision value onto [0, 1].
inline double decision_membership(double d) {
  if (d >= 1.0) return 1.0;
  if (d <= -1.0) return 0.0;
  return (1.0 + d) / 2.0;
}

inline std::vector<int> rank_by_belief(const std::vector<double>& beliefs) {
  std::vector<int> order(beliefs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return beliefs[static_cast<std::size_t>(a)] > beliefs[static_cast<std::size_t>(b)];
  });
  return order;
}

/// Belief degrees from decision values: normalized memberships, or inverse
/// |D| weights when every membership is zero.
inline FuzzyLabelSet fuzzy_memberships(const std::vector<double>& decisions) {
  if (decisions.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one decision value");
  FuzzyLabelSet out;
  out.beliefs.resize(decisions.size());
  double sum = 0.0;
  for (std::size_t l = 0; l < decisions.size(); ++l) {
    out.beliefs[l] = decision_membership(decisions[l]);
    sum += out.beliefs[l];
  }
  if (sum != 0.0) {
    for (double& b : out.beliefs) b /= sum;
  } else {
    // Every D_l <= -1 here, so no |D_l| is zero.
    double inv_sum = 0.0;
    for (std::size_t l = 0; l < decisions.size(); ++l) {
      assert(decisions[l] != 0.0);
      out.beliefs[l] = 1.0 / std::fabs(decisions[l]);
      inv_sum += out.beliefs[l];
    }
    for (double& b : out.beliefs) b /= inv_sum;
  }
  out.candidates = rank_by_belief(out.beliefs);
  return out;
}

/// Keeps the top-n candidates; beliefs are left as scored, not renormalized.
inline FuzzyLabelSet candidates(const FuzzyLabelSet& labels, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "top-n must be at least 1");
  FuzzyLabelSet out = labels;
  if (out.candidates.size() > n) out.candidates.resize(n);
  return out;
}

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------

inline std::string serialize_appearance_model(const AppearanceModel& model) {
  std::string out = "{\n";
  out += "  \"vocabulary\": " + Json(model.vocabulary).dump() + ",\n";
  out += "  \"sigma\": " + Json(model.sigma).dump() + ",\n";
  out += "  \"cost\": " + Json(model.cost).dump() + ",\n";
  auto rows = [&](const char* key, const std::vector<std::vector<double>>& m) {
    out += std::string("  \"") + key + "\": [";
    for (std::size_t i = 0; i < m.size(); ++i) out += (i == 0 ? "\n    " : ",\n    ") + Json(m[i]).dump();
    out += m.empty() ? "],\n" : "\n  ],\n";
  };
  rows("points", model.points);
  rows("dual", model.dual);
  out += "  \"bias\": " + Json(model.bias).dump() + "\n}\n";
  return out;
}

inline AppearanceModel parse_appearance_model(std::string_view text) {
  const Json doc = detail::parse_json(text, "appearance model");
  AppearanceModel m;
  m.vocabulary = detail::get_field<std::vector<std::string>>(doc, "vocabulary", "appearance model");
  m.sigma = detail::get_field<double>(doc, "sigma", "appearance model");
  m.cost = detail::get_field<double>(doc, "cost", "appearance model");
  m.points = detail::get_field<std::vector<FeatureVector>>(doc, "points", "appearance model");
  m.dual = detail::get_field<std::vector<std::vector<double>>>(doc, "dual", "appearance model");
  m.bias = detail::get_field<std::vector<double>>(doc, "bias", "appearance model");
  const std::size_t classes = m.vocabulary.size();
  if (m.bias.size() != classes) throw Error(ErrorKind::Malformed, "appearance model needs one bias per concept");
  if (m.dual.size() != m.points.size()) throw Error(ErrorKind::Malformed, "appearance model needs one dual row per point");
  for (const auto& row : m.dual)
    if (row.size() != classes) throw Error(ErrorKind::Malformed, "dual rows must have one entry per concept");
  for (const auto& p : m.points)
    if (p.size() != m.dimension()) throw Error(ErrorKind::Malformed, "training points have inconsistent lengths");
  if (!(m.sigma > 0.0)) throw Error(ErrorKind::Malformed, "sigma must be positive");
  return m;
}

}  // namespace ctxlabel

#endif
