#include "tdrc/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <string>

#include "tdrc/errors.hpp"

namespace tdrc {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

/// Splits "C04.557.337" into its segments; rejects empty segments.
std::vector<std::string> tree_segments(const std::string& tree) {
  std::vector<std::string> segs;
  std::size_t start = 0;
  while (true) {
    const auto dot = tree.find('.', start);
    std::string seg = tree.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (seg.empty()) throw DomainError("malformed tree number '" + tree + "': empty segment");
    segs.push_back(std::move(seg));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return segs;
}

}  // namespace

DiseaseDag::NodeId DiseaseDag::add_node(std::string label, bool synthetic) {
  const auto before = index_.size();
  const auto idx = static_cast<NodeId>(index_.add(label));
  if (static_cast<Index>(idx) == before) {
    labels_.push_back(std::move(label));
    synthetic_.push_back(synthetic);
    parents_.emplace_back();
  }
  return idx;
}

void DiseaseDag::add_edge(NodeId child, NodeId parent) {
  auto& ps = parents_[child];
  if (std::find(ps.begin(), ps.end(), parent) == ps.end()) ps.push_back(parent);
}

DiseaseDag DiseaseDag::from_tree_numbers(const std::vector<std::pair<std::string, std::string>>& rows) {
  DiseaseDag dag;
  std::map<std::string, NodeId> owner;
  for (const auto& [disease, tree_raw] : rows) {
    const std::string tree = trim(tree_raw);
    if (tree.empty()) throw DomainError("empty tree number for disease '" + disease + "'");
    tree_segments(tree);
    const NodeId id = dag.add_node(trim(disease), false);
    auto [it, inserted] = owner.emplace(tree, id);
    if (!inserted && it->second != id)
      throw DomainError("tree number '" + tree + "' assigned to both '" + dag.label(it->second) + "' and '" +
                        dag.label(id) + "'");
  }

  auto node_for = [&](const std::string& prefix) {
    if (auto it = owner.find(prefix); it != owner.end()) return it->second;
    const NodeId id = dag.add_node("tree:" + prefix, true);
    owner.emplace(prefix, id);
    return id;
  };

  for (const auto& [disease, tree_raw] : rows) {
    const auto segs = tree_segments(trim(tree_raw));
    std::string prefix = segs.front();
    std::vector<std::string> chain{prefix};
    for (std::size_t s = 1; s < segs.size(); ++s) {
      prefix += "." + segs[s];
      chain.push_back(prefix);
    }
    for (std::size_t level = chain.size() - 1; level > 0; --level) {
      const NodeId child = node_for(chain[level]);
      const NodeId parent = node_for(chain[level - 1]);
      // A disease owning both a tree number and one of its prefixes is its own ancestor already.
      if (child != parent) dag.add_edge(child, parent);
    }
  }
  for (auto& ps : dag.parents_) std::sort(ps.begin(), ps.end());
  dag.check_acyclic();
  return dag;
}

DiseaseDag DiseaseDag::from_edges(const std::vector<std::string>& nodes,
                                  const std::vector<std::pair<std::string, std::string>>& child_parent) {
  DiseaseDag dag;
  for (const auto& n : nodes) dag.add_node(trim(n), false);
  for (const auto& [child, parent] : child_parent) {
    auto c = dag.find(child);
    auto p = dag.find(parent);
    if (!c || !p) throw DomainError("edge " + child + " -> " + parent + " references an unknown node");
    dag.add_edge(*c, *p);
  }
  for (auto& ps : dag.parents_) std::sort(ps.begin(), ps.end());
  dag.check_acyclic();
  return dag;
}

std::optional<DiseaseDag::NodeId> DiseaseDag::find(std::string_view label) const {
  if (auto idx = index_.find(label)) return static_cast<NodeId>(*idx);
  return std::nullopt;
}

DiseaseDag::NodeId DiseaseDag::id(std::string_view label) const {
  if (auto idx = find(label)) return *idx;
  throw DomainError("unknown disease '" + std::string(label) + "'");
}

void DiseaseDag::check_acyclic() const {
  // 0 = unvisited, 1 = on stack, 2 = done.
  std::vector<int> state(size(), 0);
  std::vector<std::pair<NodeId, std::size_t>> stack;
  for (NodeId root = 0; root < size(); ++root) {
    if (state[root]) continue;
    stack.emplace_back(root, 0);
    state[root] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < parents_[node].size()) {
        const NodeId p = parents_[node][next++];
        if (state[p] == 1) throw DomainError("disease hierarchy contains a cycle through '" + labels_[p] + "'");
        if (state[p] == 0) {
          state[p] = 1;
          stack.emplace_back(p, 0);
        }
      } else {
        state[node] = 2;
        stack.pop_back();
      }
    }
  }
}

std::vector<DiseaseDag::NodeId> DiseaseDag::ancestors(NodeId id) const {
  std::vector<bool> seen(size(), false);
  std::vector<NodeId> out{id}, todo{id};
  seen.at(id) = true;
  while (!todo.empty()) {
    const NodeId u = todo.back();
    todo.pop_back();
    for (NodeId p : parents_[u])
      if (!seen[p]) {
        seen[p] = true;
        out.push_back(p);
        todo.push_back(p);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void SimParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("semantic contribution factor must lie in (0, 1)");
}

SemanticProfile semantic_profile(const DiseaseDag& dag, DiseaseDag::NodeId d, const SimParams& params) {
  params.validate();
  // Post-order along parent edges finishes every node after all of its
  // ancestors, so the reversed order visits each child before its parents.
  std::vector<DiseaseDag::NodeId> post;
  std::map<DiseaseDag::NodeId, double> contribution;
  std::vector<std::pair<DiseaseDag::NodeId, std::size_t>> stack{{d, 0}};
  contribution[d] = 0.0;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const auto& ps = dag.parents(node);
    if (next < ps.size()) {
      const auto p = ps[next++];
      if (contribution.emplace(p, 0.0).second) stack.emplace_back(p, 0);
    } else {
      post.push_back(node);
      stack.pop_back();
    }
  }
  contribution[d] = 1.0;
  for (auto it = post.rbegin(); it != post.rend(); ++it) {
    const double c = contribution[*it];
    for (auto p : dag.parents(*it)) contribution[p] = std::max(contribution[p], params.delta * c);
  }
  return {contribution.begin(), contribution.end()};
}

double semantic_contribution(const DiseaseDag& dag, std::string_view d, std::string_view ancestor,
                             const SimParams& params) {
  const auto profile = semantic_profile(dag, dag.id(d), params);
  const auto target = dag.id(ancestor);
  auto it = std::lower_bound(profile.begin(), profile.end(), target,
                             [](const auto& entry, DiseaseDag::NodeId id) { return entry.first < id; });
  if (it == profile.end() || it->first != target)
    throw DomainError("'" + std::string(ancestor) + "' is not an ancestor of '" + std::string(d) + "'");
  return it->second;
}

double semantic_value(const DiseaseDag& dag, std::string_view d, const SimParams& params) {
  double sv = 0.0;
  for (const auto& [node, c] : semantic_profile(dag, dag.id(d), params)) sv += c;
  return sv;
}

double profile_similarity(const SemanticProfile& a, const SemanticProfile& b) {
  double sv_a = 0.0, sv_b = 0.0, shared = 0.0;
  for (const auto& e : a) sv_a += e.second;
  for (const auto& e : b) sv_b += e.second;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      shared += ia->second + ib->second;
      ++ia;
      ++ib;
    }
  }
  return shared / (sv_a + sv_b);
}

double disease_similarity(const DiseaseDag& dag, std::string_view a, std::string_view b, const SimParams& params) {
  return profile_similarity(semantic_profile(dag, dag.id(a), params), semantic_profile(dag, dag.id(b), params));
}

double mirna_similarity(std::span<const Index> diseases_a, std::span<const Index> diseases_b,
                        const Matrix& s_disease) {
  if (diseases_a.empty() || diseases_b.empty()) return 0.0;
  auto best_match_sum = [&](std::span<const Index> from, std::span<const Index> to) {
    double sum = 0.0;
    for (Index d : from) {
      double best = 0.0;
      for (Index e : to) best = std::max(best, s_disease(d, e));
      sum += best;
    }
    return sum;
  };
  const double total = best_match_sum(diseases_a, diseases_b) + best_match_sum(diseases_b, diseases_a);
  return total / static_cast<double>(diseases_a.size() + diseases_b.size());
}

double mirna_similarity(Index a, Index b, const std::vector<std::vector<Index>>& disease_sets,
                        const Matrix& s_disease) {
  return mirna_similarity(disease_sets.at(static_cast<std::size_t>(a)), disease_sets.at(static_cast<std::size_t>(b)),
                          s_disease);
}

void SimilarityMatrix::validate(double sym_tol) const {
  if (values.rows() != values.cols()) throw DomainError("similarity matrix is not square");
  if (static_cast<Index>(labels.size()) != values.rows())
    throw DomainError("similarity matrix has " + std::to_string(values.rows()) + " rows but " +
                      std::to_string(labels.size()) + " labels");
  for (Index i = 0; i < values.rows(); ++i)
    for (Index j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw DomainError("similarity value out of [0, 1] at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      if (std::abs(v - values(j, i)) > sym_tol)
        throw DomainError("similarity matrix is not symmetric at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
    }
}

Matrix mirna_similarity_matrix(const std::vector<std::vector<Index>>& disease_sets, const Matrix& s_disease) {
  const auto m = static_cast<Index>(disease_sets.size());
  Matrix s = Matrix::Identity(m, m);
#pragma omp parallel for schedule(dynamic, 8)
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j) {
      const double v = mirna_similarity(i, j, disease_sets, s_disease);
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

SimilarityBuild build_similarity_matrices(const Dataset& ds, const DiseaseDag& dag, const SimParams& params) {
  params.validate();
  SimilarityBuild out;
  const Index n = ds.n();
  std::vector<std::optional<DiseaseDag::NodeId>> node(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    node[static_cast<std::size_t>(j)] = dag.find(ds.diseases.label(j));
    if (!node[static_cast<std::size_t>(j)])
      out.warnings.push_back("disease '" + ds.diseases.label(j) + "' not found in the hierarchy; similarity set to 0");
  }

  std::vector<SemanticProfile> profiles(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 4)
  for (Index j = 0; j < n; ++j)
    if (const auto& id = node[static_cast<std::size_t>(j)]) profiles[static_cast<std::size_t>(j)] = semantic_profile(dag, *id, params);

  Matrix s_n = Matrix::Identity(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Index a = 0; a < n; ++a) {
    if (!node[static_cast<std::size_t>(a)]) continue;
    for (Index b = a + 1; b < n; ++b) {
      if (!node[static_cast<std::size_t>(b)]) continue;
      const double v = profile_similarity(profiles[static_cast<std::size_t>(a)], profiles[static_cast<std::size_t>(b)]);
      s_n(a, b) = v;
      s_n(b, a) = v;
    }
  }

  out.disease = SimilarityMatrix{ds.diseases.labels(), std::move(s_n)};
  out.mirna = SimilarityMatrix{ds.mirnas.labels(), mirna_similarity_matrix(ds.disease_sets(), out.disease.values)};
  return out;
}

}  // namespace tdrc
