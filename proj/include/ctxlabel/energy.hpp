#ifndef CTXLABEL_ENERGY_HPP
#define CTXLABEL_ENERGY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ctxlabel/appearance.hpp"
#include "ctxlabel/context_model.hpp"
#include "ctxlabel/error.hpp"
#include "ctxlabel/fuzzy_spatial.hpp"

namespace ctxlabel {

/// Weights of appearance belief (alpha), concept prior (beta) and spatial context (delta).
struct EnergyParams {
  double alpha = 1.4;
  double beta = 0.3;
  double delta = 0.8;

  void validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(delta))
      throw Error(ErrorKind::InvalidArgument, "energy weights must be finite");
  }
};

inline constexpr int kDefaultMaxSweeps = 100;
inline constexpr double kExhaustiveGuard = 1e6;

/// Fully connected labeling problem for one image.
class LabelingInstance {
 public:
  /// `relations` is row-major k x k; entry (i, j) describes region j as seen from region i.
  LabelingInstance(std::vector<FuzzyLabelSet> labels, std::vector<RelationVector> relations,
                   std::shared_ptr<const ContextModel> context, EnergyParams params)
      : labels_(std::move(labels)), relations_(std::move(relations)), context_(std::move(context)), params_(params) {
    params_.validate();
    if (!context_) throw Error(ErrorKind::MissingInput, "labeling instance needs a context model");
    const std::size_t k = labels_.size();
    if (relations_.size() != k * k)
      throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(k * k) + " relation vectors, got " +
                                                    std::to_string(relations_.size()));
    for (std::size_t i = 0; i < k; ++i) {
      const FuzzyLabelSet& ls = labels_[i];
      if (ls.candidates.empty()) throw Error(ErrorKind::InvalidArgument, "region " + std::to_string(i) + " has no candidates");
      if (ls.beliefs.size() != context_->size())
        throw Error(ErrorKind::DimensionMismatch, "region " + std::to_string(i) + " beliefs do not cover the context vocabulary");
      for (int c : ls.candidates)
        if (c < 0 || c >= static_cast<int>(context_->size())) throw Error(ErrorKind::UnknownConcept, "candidate outside vocabulary");
    }
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const FuzzyLabelSet& labels(std::size_t i) const { return labels_.at(i); }
  const RelationVector& relation(std::size_t i, std::size_t j) const { return relations_.at(i * size() + j); }
  const ContextModel& context() const noexcept { return *context_; }
  const EnergyParams& params() const noexcept { return params_; }

  /// The same problem with every candidate set cut to its top `n`.
  LabelingInstance with_top_n(std::size_t n) const {
    std::vector<FuzzyLabelSet> cut;
    cut.reserve(labels_.size());
    for (const FuzzyLabelSet& ls : labels_) cut.push_back(candidates(ls, n));
    return LabelingInstance(std::move(cut), relations_, context_, params_);
  }

  LabelingInstance with_params(EnergyParams params) const { return LabelingInstance(labels_, relations_, context_, params); }

 private:
  std::vector<FuzzyLabelSet> labels_;
  std::vector<RelationVector> relations_;
  std::shared_ptr<const ContextModel> context_;
  EnergyParams params_;
};

struct Assignment {
  std::vector<int> labels;  // concept index per region
  double energy = 0.0;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

inline void require_candidate(const LabelingInstance& inst, std::size_t i, int c) {
  if (!inst.labels(i).has_candidate(c))
    throw Error(ErrorKind::InvalidArgument, "concept " + std::to_string(c) + " is not a candidate of region " + std::to_string(i));
}

/// alpha * p(c | s_i) + beta * p(c).
inline double association_potential(const LabelingInstance& inst, std::size_t i, int c) {
  require_candidate(inst, i, c);
  const EnergyParams& p = inst.params();
  return p.alpha * inst.labels(i).belief(c) + p.beta * inst.context().prior(c);
}

/// max(0, 1 - ||mean(l, m) - r||) over the five memberships; 0 for unseen pairs.
inline double spatial_interaction(const ContextModel& model, int l, int m, const RelationVector& r) {
  const Memberships* mean = model.mean_relation(l, m);
  if (mean == nullptr) return 0.0;
  double sq = 0.0;
  for (std::size_t c = 0; c < kRelationSize; ++c) {
    const double diff = (*mean)[c] - r.mu[c];
    sq += diff * diff;
  }
  return std::max(0.0, 1.0 - std::sqrt(sq));
}

/// delta * psi(l, m, r_ij) + p(l, m) * p(l | s_i).
inline double configuration_potential(const LabelingInstance& inst, std::size_t i, int l, std::size_t j, int m) {
  if (i == j) throw Error(ErrorKind::InvalidArgument, "configuration potential needs two distinct regions");
  require_candidate(inst, i, l);
  require_candidate(inst, j, m);
  const ContextModel& ctx = inst.context();
  return inst.params().delta * spatial_interaction(ctx, l, m, inst.relation(i, j)) + ctx.cooc(l, m) * inst.labels(i).belief(l);
}

/// E(A): negated sum of unary terms and pairwise terms over ordered pairs.
inline double total_energy(const LabelingInstance& inst, const std::vector<int>& labels) {
  const std::size_t k = inst.size();
  if (labels.size() != k) throw Error(ErrorKind::DimensionMismatch, "assignment length does not match region count");
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += association_potential(inst, i, labels[i]);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j) sum += configuration_potential(inst, i, labels[i], j, labels[j]);
  return -sum;
}

/// Top-belief candidate of every region.
inline Assignment appearance_labeling(const LabelingInstance& inst) {
  Assignment a;
  for (std::size_t i = 0; i < inst.size(); ++i) a.labels.push_back(inst.labels(i).candidates.front());
  a.energy = total_energy(inst, a.labels);
  return a;
}

/// Everything in E that depends on region i's label, with the sign flipped
/// (higher is better).
inline double local_score(const LabelingInstance& inst, const std::vector<int>& labels, std::size_t i, int c) {
  double s = association_potential(inst, i, c);
  for (std::size_t j = 0; j < inst.size(); ++j) {
    if (j == i) continue;
    s += configuration_potential(inst, i, c, j, labels[j]);
    s += configuration_potential(inst, j, labels[j], i, c);
  }
  return s;
}

struct IcmResult {
  Assignment assignment;
  int sweeps = 0;
  bool converged = false;
  std::vector<double> sweep_energies;  // exact E after each sweep
};

/// Iterated conditional modes from the appearance labeling. Regions are
/// visited in order and updated in place; each gets the candidate with the
/// lowest conditional energy (ties to the lowest concept index). Stops after a
/// sweep without changes or after `max_sweeps` sweeps.
inline IcmResult icm_traced(const LabelingInstance& inst, int max_sweeps = kDefaultMaxSweeps) {
  if (max_sweeps < 1) throw Error(ErrorKind::InvalidArgument, "max_sweeps must be at least 1");
  IcmResult out;
  std::vector<int> labels = appearance_labeling(inst).labels;
  while (out.sweeps < max_sweeps) {
    bool changed = false;
    for (std::size_t i = 0; i < inst.size(); ++i) {
      int best = labels[i];
      double best_score = -std::numeric_limits<double>::infinity();
      for (int c : inst.labels(i).candidates) {
        const double s = local_score(inst, labels, i, c);
        if (s > best_score || (s == best_score && c < best)) {
          best = c;
          best_score = s;
        }
      }
      if (best != labels[i]) {
        labels[i] = best;
        changed = true;
      }
    }
    ++out.sweeps;
    out.sweep_energies.push_back(total_energy(inst, labels));
    if (!changed) {
      out.converged = true;
      break;
    }
  }
  out.assignment.energy = total_energy(inst, labels);
  out.assignment.labels = std::move(labels);
  return out;
}

inline Assignment icm(const LabelingInstance& inst, int max_sweeps = kDefaultMaxSweeps) {
  return icm_traced(inst, max_sweeps).assignment;
}

/// Global minimum over the candidate product space; exact ties go to the
/// lexicographically smallest label sequence.
inline Assignment exhaustive_min(const LabelingInstance& inst) {
  const std::size_t k = inst.size();
  std::vector<std::vector<int>> options(k);
  double space = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    options[i] = inst.labels(i).candidates;
    std::sort(options[i].begin(), options[i].end());
    space *= static_cast<double>(options[i].size());
  }
  if (space > kExhaustiveGuard)
    throw Error(ErrorKind::SearchSpace, "search space of " + std::to_string(static_cast<long long>(space)) + " assignments exceeds 1e6");

  std::vector<std::size_t> digit(k, 0);
  std::vector<int> labels(k);
  Assignment best;
  best.energy = std::numeric_limits<double>::infinity();
  while (true) {
    for (std::size_t i = 0; i < k; ++i) labels[i] = options[i][digit[i]];
    const double e = total_energy(inst, labels);
    if (e < best.energy) {
      best.energy = e;
      best.labels = labels;
    }
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++digit[pos] < options[pos].size()) break;
      digit[pos] = 0;
      if (pos == 0) return best;
    }
    if (k == 0) return best;
  }
}

}  // namespace ctxlabel

#endif
