#include "tdrc/cross_validation.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <unordered_set>

#include "tdrc/cp_als.hpp"
#include "tdrc/errors.hpp"
#include "tdrc/metrics.hpp"
#include "tdrc/rng.hpp"

namespace tdrc {

std::vector<std::size_t> FoldPlan::fold_items(int f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == f) out.push_back(i);
  return out;
}

FoldPlan make_fold_plan(std::size_t items, int k, std::uint64_t seed) {
  if (k < 2) throw DomainError("cross validation needs at least 2 folds");
  if (static_cast<std::size_t>(k) > items)
    throw DomainError("cannot split " + std::to_string(items) + " items into " + std::to_string(k) + " folds");
  std::vector<std::size_t> order(items);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = make_stream(seed, Stream::kFolds);
  std::shuffle(order.begin(), order.end(), rng);
  FoldPlan plan{k, seed, std::vector<int>(items)};
  for (std::size_t p = 0; p < items; ++p) plan.assignment[order[p]] = static_cast<int>(p % static_cast<std::size_t>(k));
  return plan;
}

FoldPlan split_cv_type(const Dataset& ds, int k, std::uint64_t seed) {
  if (ds.triplets.empty()) throw DomainError("dataset has no associations");
  return make_fold_plan(ds.pairs().size(), k, seed);
}

TripletFolds split_cv_triplet(const Dataset& ds, int k, std::uint64_t seed) {
  if (ds.triplets.empty()) throw DomainError("dataset has no associations");
  TripletFolds out{make_fold_plan(ds.triplets.size(), k, seed), {}};

  const Index m = ds.m(), n = ds.n();
  const Index total = m * n * ds.t();
  std::vector<Index> known;
  known.reserve(ds.triplets.size());
  for (const auto& tr : ds.triplets) known.push_back(tr.mirna + m * (tr.disease + n * tr.type));
  std::sort(known.begin(), known.end());
  const auto unknown = static_cast<std::size_t>(total) - known.size();
  auto is_known = [&](Index cell) { return std::binary_search(known.begin(), known.end(), cell); };
  auto to_triplet = [&](Index cell) { return Triplet{cell % m, (cell / m) % n, cell / (m * n)}; };

  for (int f = 0; f < k; ++f) {
    const std::size_t need = out.plan.fold_items(f).size();
    if (need > unknown)
      throw DomainError("fold " + std::to_string(f) + " needs " + std::to_string(need) + " negatives but only " +
                        std::to_string(unknown) + " unknown triplets exist");
    auto rng = make_stream(seed, Stream::kNegatives, static_cast<std::uint64_t>(f));
    std::vector<Index> chosen;
    chosen.reserve(need);
    if (2 * need <= unknown) {
      // Sparse regime: rejection sampling over all cells.
      std::uniform_int_distribution<Index> cell_dist(0, total - 1);
      std::unordered_set<Index> taken;
      while (chosen.size() < need) {
        const Index cell = cell_dist(rng);
        if (is_known(cell) || !taken.insert(cell).second) continue;
        chosen.push_back(cell);
      }
    } else {
      std::vector<Index> pool;
      pool.reserve(unknown);
      for (Index cell = 0; cell < total; ++cell)
        if (!is_known(cell)) pool.push_back(cell);
      for (std::size_t p = 0; p < need; ++p) {
        std::uniform_int_distribution<std::size_t> pick(p, pool.size() - 1);
        std::swap(pool[p], pool[pick(rng)]);
      }
      chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(need));
    }
    std::vector<Triplet> neg;
    neg.reserve(need);
    for (Index cell : chosen) neg.push_back(to_triplet(cell));
    out.negatives.push_back(std::move(neg));
  }
  return out;
}

std::vector<Triplet> type_training_triplets(const Dataset& ds, const FoldPlan& plan, int f) {
  const auto pairs = ds.pairs();
  std::vector<Triplet> out;
  for (const auto& tr : ds.triplets) {
    const auto it = std::lower_bound(pairs.begin(), pairs.end(), PairKey{tr.mirna, tr.disease});
    if (plan.assignment[static_cast<std::size_t>(it - pairs.begin())] != f) out.push_back(tr);
  }
  return out;
}

std::vector<Triplet> triplet_training_triplets(const Dataset& ds, const FoldPlan& plan, int f) {
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < ds.triplets.size(); ++i)
    if (plan.assignment[i] != f) out.push_back(ds.triplets[i]);
  return out;
}

Tensor3 fit_scores(const Tensor3& x, const Matrix& s_m, const Matrix& s_n, Method method, const Hyperparams& hp) {
  if (method == Method::kCp) {
    CpOptions opt{hp.rank, hp.tol, hp.max_iter, hp.seed, hp.allow_high_rank};
    return predict_scores(cp_als_fit(x, opt).factors);
  }
  return predict_scores(tdrc_fit(x, s_m, s_n, hp).factors);
}

namespace {

struct FoldOutcome {
  std::vector<double> metrics;
  std::size_t test_size = 0;
  Top1Counts counts;
  std::vector<double> pos, neg;
};

std::vector<double> mean_of(const std::vector<std::vector<double>>& rows) {
  std::vector<double> mean(rows.front().size(), 0.0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) mean[c] += r[c];
  for (double& v : mean) v /= static_cast<double>(rows.size());
  return mean;
}

}  // namespace

CvReport run_cv(const Dataset& ds, const Matrix& s_m, const Matrix& s_n, const CvConfig& config) {
  config.hp.validate();
  if (config.jobs < 1) throw DomainError("jobs must be at least 1");
  CvReport report;
  report.protocol = config.protocol;

  const auto pairs = ds.pairs();
  FoldPlan plan;
  std::vector<std::vector<Triplet>> negatives;
  if (config.protocol == Protocol::kType) {
    plan = split_cv_type(ds, config.k, config.seed);
    report.metric_names = {"precision", "recall", "f1"};
  } else {
    auto tf = split_cv_triplet(ds, config.k, config.seed);
    plan = std::move(tf.plan);
    negatives = std::move(tf.negatives);
    report.metric_names = {"aupr", "auc", "f1"};
  }

  std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(config.k));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.k));
#pragma omp parallel for num_threads(config.jobs) schedule(dynamic, 1)
  for (int f = 0; f < config.k; ++f) {
    try {
      auto& out = outcomes[static_cast<std::size_t>(f)];
      const auto items = plan.fold_items(f);
      out.test_size = items.size();
      if (config.protocol == Protocol::kType) {
        const Tensor3 x = to_tensor(type_training_triplets(ds, plan, f), ds.m(), ds.n(), ds.t());
        const Tensor3 scores = fit_scores(x, s_m, s_n, config.method, config.hp);
        std::vector<PairKey> test;
        for (auto i : items) test.push_back(pairs[i]);
        out.counts = top1_counts(scores, test, ds.triplets);
        const auto m = top1_from_counts(out.counts);
        out.metrics = {m.precision, m.recall, m.f1};
      } else {
        const Tensor3 x = to_tensor(triplet_training_triplets(ds, plan, f), ds.m(), ds.n(), ds.t());
        const Tensor3 scores = fit_scores(x, s_m, s_n, config.method, config.hp);
        for (auto i : items) {
          const auto& tr = ds.triplets[i];
          out.pos.push_back(scores(tr.mirna, tr.disease, tr.type));
        }
        for (const auto& tr : negatives[static_cast<std::size_t>(f)])
          out.neg.push_back(scores(tr.mirna, tr.disease, tr.type));
        out.metrics = {aupr(out.pos, out.neg), auc(out.pos, out.neg), best_f1(out.pos, out.neg)};
      }
    } catch (...) {
      errors[static_cast<std::size_t>(f)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Top1Counts pooled_counts;
  std::vector<double> pooled_pos, pooled_neg;
  for (const auto& o : outcomes) {
    report.per_fold.push_back(o.metrics);
    report.fold_sizes.push_back(o.test_size);
    pooled_counts += o.counts;
    pooled_pos.insert(pooled_pos.end(), o.pos.begin(), o.pos.end());
    pooled_neg.insert(pooled_neg.end(), o.neg.begin(), o.neg.end());
  }
  report.mean = mean_of(report.per_fold);
  if (config.protocol == Protocol::kType) {
    const auto m = top1_from_counts(pooled_counts);
    report.pooled = {m.precision, m.recall, m.f1};
  } else {
    report.pooled = {aupr(pooled_pos, pooled_neg), auc(pooled_pos, pooled_neg), best_f1(pooled_pos, pooled_neg)};
  }
  return report;
}

}  // namespace tdrc
