#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdrc/dataset.hpp"
#include "tdrc/tdrc.hpp"

namespace tdrc {

/// Assignment of N items to k folds whose sizes differ by at most one.
struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  /// assignment[item] = fold id in [0, k).
  std::vector<int> assignment;

  /// Items of fold `f` in increasing order.
  std::vector<std::size_t> fold_items(int f) const;
};

/// Random partition of `items` objects into k folds using the folds substream.
FoldPlan make_fold_plan(std::size_t items, int k, std::uint64_t seed);

/// Folds over ds.pairs(). A test pair masks all of its triplets.
FoldPlan split_cv_type(const Dataset& ds, int k, std::uint64_t seed);

struct TripletFolds {
  /// Folds over ds.triplets.
  FoldPlan plan;
  /// Per fold, unknown triplets sampled without replacement, as many as the fold holds.
  std::vector<std::vector<Triplet>> negatives;
};

TripletFolds split_cv_triplet(const Dataset& ds, int k, std::uint64_t seed);

/// Known triplets left for training once fold `f` of a CV_type plan is held out.
std::vector<Triplet> type_training_triplets(const Dataset& ds, const FoldPlan& plan, int f);
/// Known triplets left for training once fold `f` of a CV_triplet plan is held out.
std::vector<Triplet> triplet_training_triplets(const Dataset& ds, const FoldPlan& plan, int f);

enum class Protocol { kType, kTriplet };

struct CvConfig {
  Protocol protocol = Protocol::kType;
  Method method = Method::kTdrc;
  int k = 10;
  std::uint64_t seed = 0;
  Hyperparams hp;
  int jobs = 1;
};

struct CvReport {
  Protocol protocol = Protocol::kType;
  /// "precision", "recall", "f1" for CV_type; "aupr", "auc", "f1" for CV_triplet.
  std::vector<std::string> metric_names;
  std::vector<std::size_t> fold_sizes;
  std::vector<std::vector<double>> per_fold;
  /// Mean of the per-fold metrics.
  std::vector<double> mean;
  /// Metrics over predictions pooled across folds.
  std::vector<double> pooled;
};

/// Runs the full protocol. `s_m` and `s_n` are ignored for Method::kCp.
/// Folds run concurrently on up to `jobs` threads; the report does not depend on `jobs`.
CvReport run_cv(const Dataset& ds, const Matrix& s_m, const Matrix& s_n, const CvConfig& config);

/// Fits the chosen method and returns the completed score tensor.
Tensor3 fit_scores(const Tensor3& x, const Matrix& s_m, const Matrix& s_n, Method method, const Hyperparams& hp);

}  // namespace tdrc
