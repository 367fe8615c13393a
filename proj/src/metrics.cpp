#include "tdrc/metrics.hpp"

#include <algorithm>
#include <string>

#include "tdrc/errors.hpp"

namespace tdrc {

namespace {

void require_nonempty(std::span<const double> pos, std::span<const double> neg, const char* what) {
  if (pos.empty() || neg.empty()) throw DomainError(std::string(what) + " needs nonempty positive and negative sets");
}

struct Labeled {
  double score;
  bool positive;
};

/// Scores sorted descending.
std::vector<Labeled> descending(std::span<const double> pos, std::span<const double> neg) {
  std::vector<Labeled> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.push_back({s, true});
  for (double s : neg) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Labeled& a, const Labeled& b) { return a.score > b.score; });
  return all;
}

/// Calls visit(tp_in_block, count_in_block) for each block of tied scores, in descending order.
template <typename Visit>
void for_each_tied_block(const std::vector<Labeled>& sorted, Visit visit) {
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i, tp = 0;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) tp += sorted[j++].positive ? 1 : 0;
    visit(tp, j - i);
    i = j;
  }
}

}  // namespace

Index top1_type(const Tensor3& scores, const PairKey& pair) {
  Index best = 0;
  for (Index k = 1; k < scores.t(); ++k)
    if (scores(pair.mirna, pair.disease, k) > scores(pair.mirna, pair.disease, best)) best = k;
  return best;
}

Top1Counts top1_counts(const Tensor3& scores, std::span<const PairKey> test_pairs, std::span<const Triplet> truth) {
  Top1Counts c;
  for (const auto& pair : test_pairs) {
    const auto lo = std::lower_bound(truth.begin(), truth.end(), Triplet{pair.mirna, pair.disease, 0});
    auto hi = lo;
    while (hi != truth.end() && hi->mirna == pair.mirna && hi->disease == pair.disease) ++hi;
    if (lo == hi)
      throw DomainError("test pair (" + std::to_string(pair.mirna) + ", " + std::to_string(pair.disease) +
                        ") has no true type");
    const Index predicted = top1_type(scores, pair);
    if (std::any_of(lo, hi, [&](const Triplet& tr) { return tr.type == predicted; })) ++c.hits;
    ++c.pairs;
    c.triplets += static_cast<std::size_t>(hi - lo);
  }
  return c;
}

Top1Metrics top1_from_counts(const Top1Counts& c) {
  if (c.pairs == 0) throw DomainError("top-1 metrics need at least one test pair");
  Top1Metrics m;
  m.precision = static_cast<double>(c.hits) / static_cast<double>(c.pairs);
  m.recall = static_cast<double>(c.hits) / static_cast<double>(c.triplets);
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

Top1Metrics top1_metrics(const Tensor3& scores, std::span<const PairKey> test_pairs, std::span<const Triplet> truth) {
  if (test_pairs.empty()) throw DomainError("top-1 metrics need at least one test pair");
  return top1_from_counts(top1_counts(scores, test_pairs, truth));
}

double auc(std::span<const double> pos, std::span<const double> neg) {
  require_nonempty(pos, neg, "AUC");
  // Mann-Whitney: each positive beats the negatives below its block and ties half of those inside it.
  const auto sorted = descending(pos, neg);
  std::size_t neg_total = neg.size(), neg_above = 0;
  double wins = 0.0;
  for_each_tied_block(sorted, [&](std::size_t tp, std::size_t count) {
    const std::size_t fp = count - tp;
    const double below = static_cast<double>(neg_total - neg_above - fp);
    wins += static_cast<double>(tp) * (below + 0.5 * static_cast<double>(fp));
    neg_above += fp;
  });
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double aupr(std::span<const double> pos, std::span<const double> neg) {
  require_nonempty(pos, neg, "AUPR");
  const auto sorted = descending(pos, neg);
  std::size_t tp_cum = 0, seen = 0;
  double ap = 0.0;
  for_each_tied_block(sorted, [&](std::size_t tp, std::size_t count) {
    tp_cum += tp;
    seen += count;
    if (tp > 0) ap += static_cast<double>(tp) * static_cast<double>(tp_cum) / static_cast<double>(seen);
  });
  return ap / static_cast<double>(pos.size());
}

double best_f1(std::span<const double> pos, std::span<const double> neg) {
  require_nonempty(pos, neg, "F1");
  const auto sorted = descending(pos, neg);
  const double p = static_cast<double>(pos.size());
  std::size_t tp_cum = 0, seen = 0;
  double best = 0.0;
  for_each_tied_block(sorted, [&](std::size_t tp, std::size_t count) {
    tp_cum += tp;
    seen += count;
    // 2TP / (2TP + FP + FN) with FP + TP = seen and FN = P - TP.
    best = std::max(best, 2.0 * static_cast<double>(tp_cum) / (static_cast<double>(seen) + p));
  });
  return best;
}

std::vector<RankedPrediction> rank_for_disease(const Tensor3& scores, Index disease, std::span<const Triplet> known,
                                               std::size_t top_n) {
  if (disease < 0 || disease >= scores.n()) throw DomainError("disease index out of range");
  std::vector<RankedPrediction> cells;
  for (Index i = 0; i < scores.m(); ++i)
    for (Index k = 0; k < scores.t(); ++k) {
      if (std::binary_search(known.begin(), known.end(), Triplet{i, disease, k})) continue;
      cells.push_back({i, k, scores(i, disease, k)});
    }
  auto before = [](const RankedPrediction& a, const RankedPrediction& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.mirna != b.mirna) return a.mirna < b.mirna;
    return a.type < b.type;
  };
  const std::size_t keep = std::min(top_n, cells.size());
  std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(keep), cells.end(), before);
  cells.resize(keep);
  return cells;
}

}  // namespace tdrc
