#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "tdrc/dataset.hpp"
#include "tdrc/metrics.hpp"
#include "tdrc/similarity.hpp"
#include "tdrc/tdrc.hpp"

namespace tdrc::io {

/// Three tab-separated columns: miRNA, disease, type. A first line reading
/// "mirna disease type" (any case, optional "_id" suffixes) is a header.
/// Vocabularies follow first appearance; duplicate rows are dropped and counted.
Dataset parse_triplets(std::istream& in);
Dataset load_triplets(const std::filesystem::path& path);

/// Drops every triplet whose miRNA or disease takes part in fewer than
/// `min_associations` triplets (counted once over the input, across all
/// types) and rebuilds the miRNA and disease vocabularies in their original order.
Dataset filter_min_associations(const Dataset& ds, std::size_t min_associations);

struct DatasetStats {
  Index mirnas = 0;
  Index diseases = 0;
  Index types = 0;
  std::size_t triplets = 0;
  /// triplets / (mirnas * diseases * types)
  double density = 0.0;
};
DatasetStats dataset_stats(const Dataset& ds);

/// Two tab-separated columns: disease, tree number (one row per tree number).
DiseaseDag parse_dag(std::istream& in);
DiseaseDag load_dag(const std::filesystem::path& path);

/// Square TSV: header row of labels after an empty corner cell, then one row
/// per label. Values are written with 17 significant digits.
void write_similarity(const SimilarityMatrix& s, std::ostream& out);
void save_similarity(const SimilarityMatrix& s, const std::filesystem::path& path);
SimilarityMatrix parse_similarity(std::istream& in);
SimilarityMatrix load_similarity(const std::filesystem::path& path);

/// Reorders a labelled similarity matrix to follow `vocab`. Throws DomainError
/// if any vocabulary entry is missing from the matrix.
Matrix align_similarity(const SimilarityMatrix& s, const Vocabulary& vocab);

struct Model {
  Method method = Method::kTdrc;
  Hyperparams hp;
  FactorSet factors;
  Matrix M1, M2;
};

inline constexpr char kModelMagic[8] = {'T', 'D', 'R', 'C', 'M', 'D', 'L', '\0'};
inline constexpr std::uint32_t kModelVersion = 1;

/// Binary little-endian layout:
///   magic[8] | u32 version | u32 method | u64 m, n, t, r |
///   f64 alpha, beta, lambda, mu, rho_init, rho_cap, tol, cg_tol |
///   i64 max_iter, cg_max_iter | u64 seed |
///   f64 C[m*r], P[n*r], F[t*r], M1[r*r], M2[r*r]   (row-major)
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

struct DiseaseRanking {
  Index disease = 0;
  std::vector<RankedPrediction> predictions;
};

/// TSV with columns disease_id, rank, mirna_id, type_id, score (6 decimals).
void write_predictions(const std::vector<DiseaseRanking>& rankings, const Dataset& ds, std::ostream& out);
void export_predictions(const std::vector<DiseaseRanking>& rankings, const Dataset& ds,
                        const std::filesystem::path& path);

/// Per-iteration optimizer log as TSV.
void write_history(const std::vector<IterationRecord>& history, std::ostream& out);

}  // namespace tdrc::io
