#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tdrc/dataset.hpp"
#include "tdrc/tensor.hpp"

namespace tdrc {

struct Top1Counts {
  std::size_t hits = 0;
  std::size_t pairs = 0;
  std::size_t triplets = 0;
  Top1Counts& operator+=(const Top1Counts& o) {
    hits += o.hits;
    pairs += o.pairs;
    triplets += o.triplets;
    return *this;
  }
};

struct Top1Metrics {
  double precision = 0.0;  // hits / test pairs
  double recall = 0.0;     // hits / test triplets
  double f1 = 0.0;
};

/// Type with the highest score for a (miRNA, disease) pair; ties go to the lowest index.
Index top1_type(const Tensor3& scores, const PairKey& pair);

/// Counts top-1 hits over `test_pairs`. `truth` must be sorted; every test pair
/// needs at least one true type there (DomainError otherwise).
Top1Counts top1_counts(const Tensor3& scores, std::span<const PairKey> test_pairs, std::span<const Triplet> truth);
Top1Metrics top1_from_counts(const Top1Counts& counts);
Top1Metrics top1_metrics(const Tensor3& scores, std::span<const PairKey> test_pairs, std::span<const Triplet> truth);

/// P(pos > neg) + 1/2 P(pos = neg). Both sides must be nonempty.
double auc(std::span<const double> pos, std::span<const double> neg);
/// Average precision over descending score thresholds; tied scores form one threshold.
double aupr(std::span<const double> pos, std::span<const double> neg);
/// Best F1 over thresholds "score >= s" for every distinct score s.
double best_f1(std::span<const double> pos, std::span<const double> neg);

struct RankedPrediction {
  Index mirna = 0;
  Index type = 0;
  double score = 0.0;
};

/// Every unknown (miRNA, type) cell for `disease`, by descending score with
/// ties broken by miRNA then type index, truncated to `top_n`.
std::vector<RankedPrediction> rank_for_disease(const Tensor3& scores, Index disease, std::span<const Triplet> known,
                                               std::size_t top_n = 20);

}  // namespace tdrc
