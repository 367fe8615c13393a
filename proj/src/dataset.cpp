#include "tdrc/dataset.hpp"

#include <algorithm>
#include <cctype>

#include "tdrc/errors.hpp"

namespace tdrc {

std::string normalize_id(std::string_view id) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!id.empty() && is_space(static_cast<unsigned char>(id.front()))) id.remove_prefix(1);
  while (!id.empty() && is_space(static_cast<unsigned char>(id.back()))) id.remove_suffix(1);
  std::string out(id);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Index Vocabulary::add(std::string_view id) {
  std::string key = normalize_id(id);
  if (key.empty()) throw DomainError("empty identifier");
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const Index idx = size();
  index_.emplace(std::move(key), idx);
  // Keep the trimmed original spelling.
  std::string_view trimmed = id;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
  labels_.emplace_back(trimmed);
  return idx;
}

std::optional<Index> Vocabulary::find(std::string_view id) const {
  if (auto it = index_.find(normalize_id(id)); it != index_.end()) return it->second;
  return std::nullopt;
}

bool Dataset::contains(const Triplet& tr) const { return std::binary_search(triplets.begin(), triplets.end(), tr); }

std::vector<PairKey> Dataset::pairs() const {
  std::vector<PairKey> out;
  for (const auto& tr : triplets) {
    PairKey p{tr.mirna, tr.disease};
    if (out.empty() || out.back() != p) out.push_back(p);
  }
  return out;
}

std::vector<std::vector<Index>> Dataset::disease_sets() const {
  std::vector<std::vector<Index>> sets(static_cast<std::size_t>(m()));
  for (const auto& tr : triplets) {
    auto& s = sets[static_cast<std::size_t>(tr.mirna)];
    if (s.empty() || s.back() != tr.disease) s.push_back(tr.disease);
  }
  for (auto& s : sets) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return sets;
}

Tensor3 Dataset::to_tensor() const { return tdrc::to_tensor(triplets, m(), n(), t()); }

std::size_t Dataset::normalize() {
  for (const auto& tr : triplets)
    if (tr.mirna < 0 || tr.mirna >= m() || tr.disease < 0 || tr.disease >= n() || tr.type < 0 || tr.type >= t())
      throw DomainError("triplet index out of vocabulary range");
  std::sort(triplets.begin(), triplets.end());
  const auto before = triplets.size();
  triplets.erase(std::unique(triplets.begin(), triplets.end()), triplets.end());
  return before - triplets.size();
}

Tensor3 to_tensor(const std::vector<Triplet>& triplets, Index m, Index n, Index t) {
  Tensor3 x(m, n, t);
  for (const auto& tr : triplets) x(tr.mirna, tr.disease, tr.type) = 1.0;
  return x;
}

}  // namespace tdrc
