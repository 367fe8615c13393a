#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tdrc/dataset.hpp"
#include "tdrc/tensor.hpp"

namespace tdrc {

/// Disease hierarchy with edges pointing from a node to its direct parents.
/// Acyclicity and parent existence are checked on construction.
class DiseaseDag {
 public:
  using NodeId = std::size_t;

  /// Builds the DAG from (disease, tree number) rows. A tree number such as
  /// "C04.557.337" makes the owner of "C04.557" a parent; prefixes that no
  /// disease owns become synthetic internal nodes labelled "tree:<prefix>".
  /// A disease listed under several tree numbers gets the union of parents.
  static DiseaseDag from_tree_numbers(const std::vector<std::pair<std::string, std::string>>& rows);

  /// Builds the DAG from explicit (child, parent) edges over `nodes`.
  static DiseaseDag from_edges(const std::vector<std::string>& nodes,
                               const std::vector<std::pair<std::string, std::string>>& child_parent);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(NodeId id) const { return labels_.at(id); }
  bool is_synthetic(NodeId id) const { return synthetic_.at(id); }
  std::optional<NodeId> find(std::string_view label) const;
  /// Throws DomainError for an unknown label.
  NodeId id(std::string_view label) const;
  const std::vector<NodeId>& parents(NodeId id) const { return parents_.at(id); }
  /// N(d): `id` together with every ancestor, sorted.
  std::vector<NodeId> ancestors(NodeId id) const;

 private:
  NodeId add_node(std::string label, bool synthetic);
  void add_edge(NodeId child, NodeId parent);
  void check_acyclic() const;

  std::vector<std::string> labels_;
  std::vector<bool> synthetic_;
  std::vector<std::vector<NodeId>> parents_;
  Vocabulary index_;
};

struct SimParams {
  /// Semantic contribution decay per ontology level, in (0, 1).
  double delta = 0.5;
  void validate() const;
};

/// C(d, a) for every a in N(d), sorted by node id.
using SemanticProfile = std::vector<std::pair<DiseaseDag::NodeId, double>>;

/// Evaluates C(d, .) over DAG(d): C(d, d) = 1 and, for an ancestor a,
/// C(d, a) = max over children c of a inside DAG(d) of delta * C(d, c).
SemanticProfile semantic_profile(const DiseaseDag& dag, DiseaseDag::NodeId d, const SimParams& params);

/// C(d, ancestor). Throws DomainError when `ancestor` is not in N(d).
double semantic_contribution(const DiseaseDag& dag, std::string_view d, std::string_view ancestor,
                             const SimParams& params);
/// SV(d) = sum of C(d, a) over N(d).
double semantic_value(const DiseaseDag& dag, std::string_view d, const SimParams& params);
double disease_similarity(const DiseaseDag& dag, std::string_view a, std::string_view b, const SimParams& params);
/// Similarity from two precomputed profiles.
double profile_similarity(const SemanticProfile& a, const SemanticProfile& b);

/// Best-match average of two disease index sets under `s_disease`.
/// Returns 0 when either set is empty.
double mirna_similarity(std::span<const Index> diseases_a, std::span<const Index> diseases_b,
                        const Matrix& s_disease);
double mirna_similarity(Index a, Index b, const std::vector<std::vector<Index>>& disease_sets,
                        const Matrix& s_disease);

/// Symmetric square similarity matrix with row/column labels.
struct SimilarityMatrix {
  std::vector<std::string> labels;
  Matrix values;

  Index size() const noexcept { return values.rows(); }
  /// Throws DomainError unless the matrix is square, matches the labels, is
  /// symmetric within `sym_tol`, and has finite entries in [0, 1].
  void validate(double sym_tol = 1e-12) const;
};

struct SimilarityBuild {
  SimilarityMatrix mirna;
  SimilarityMatrix disease;
  std::vector<std::string> warnings;
};

/// S_n over the dataset's diseases and S_m over its miRNAs. Diseases missing
/// from the DAG keep a row that is 1 on the diagonal and 0 elsewhere, and are
/// reported in `warnings`.
SimilarityBuild build_similarity_matrices(const Dataset& ds, const DiseaseDag& dag, const SimParams& params);

/// S_m alone, from per-miRNA disease sets and a precomputed S_n.
Matrix mirna_similarity_matrix(const std::vector<std::vector<Index>>& disease_sets, const Matrix& s_disease);

}  // namespace tdrc
