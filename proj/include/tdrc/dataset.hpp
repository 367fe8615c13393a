#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tdrc/tensor.hpp"

namespace tdrc {

/// Lower-cases and trims an identifier; vocabulary lookups compare these keys.
std::string normalize_id(std::string_view id);

/// Ordered, duplicate-free identifier list. Identifiers match
/// case-insensitively after whitespace trimming; the first spelling seen is kept.
class Vocabulary {
 public:
  /// Index of `id`, appending it if new.
  Index add(std::string_view id);
  std::optional<Index> find(std::string_view id) const;
  const std::string& label(Index idx) const { return labels_.at(static_cast<std::size_t>(idx)); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  Index size() const noexcept { return static_cast<Index>(labels_.size()); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Index> index_;
};

struct Triplet {
  Index mirna = 0;
  Index disease = 0;
  Index type = 0;
  auto operator<=>(const Triplet&) const = default;
};

struct PairKey {
  Index mirna = 0;
  Index disease = 0;
  auto operator<=>(const PairKey&) const = default;
};

/// Known (miRNA, disease, type) associations over three vocabularies.
struct Dataset {
  Vocabulary mirnas;
  Vocabulary diseases;
  Vocabulary types;
  /// Sorted and unique.
  std::vector<Triplet> triplets;
  /// Duplicate rows dropped while loading.
  std::size_t duplicates_dropped = 0;

  Index m() const noexcept { return mirnas.size(); }
  Index n() const noexcept { return diseases.size(); }
  Index t() const noexcept { return types.size(); }

  bool contains(const Triplet& tr) const;
  /// Distinct associated (miRNA, disease) pairs, sorted.
  std::vector<PairKey> pairs() const;
  /// Per miRNA, the sorted set of diseases it is associated with under any type.
  std::vector<std::vector<Index>> disease_sets() const;
  /// Binary tensor with ones at the known triplets.
  Tensor3 to_tensor() const;
  /// Sorts, deduplicates and range-checks `triplets`. Returns the number of duplicates removed.
  std::size_t normalize();
};

/// Binary tensor with ones at `triplets`.
Tensor3 to_tensor(const std::vector<Triplet>& triplets, Index m, Index n, Index t);

}  // namespace tdrc
