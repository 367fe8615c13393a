#include "doctest.h"
#include "oracles.hpp"
#include "tdrc/errors.hpp"
#include "tdrc/similarity.hpp"

using namespace tdrc;

namespace {

const SimParams kHalf{0.5};

DiseaseDag siblings() { return DiseaseDag::from_edges({"A", "B", "C", "D"}, {{"B", "A"}, {"C", "A"}, {"D", "A"}}); }

/// Random DAG over `n` nodes: each node may link to earlier nodes only.
DiseaseDag random_dag(std::mt19937_64& rng, int n) {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  std::bernoulli_distribution link(0.15);
  for (int i = 0; i < n; ++i) {
    nodes.push_back("d" + std::to_string(i));
    for (int j = 0; j < i; ++j)
      if (link(rng)) edges.emplace_back(nodes[i], nodes[j]);
  }
  return DiseaseDag::from_edges(nodes, edges);
}

}  // namespace

TEST_CASE("semantic contribution on small hierarchies") {
  const auto pair = DiseaseDag::from_edges({"a", "d"}, {{"d", "a"}});
  CHECK(semantic_contribution(pair, "d", "d", kHalf) == 1.0);
  CHECK(semantic_contribution(pair, "d", "a", kHalf) == 0.5);
  CHECK_THROWS_AS(semantic_contribution(pair, "a", "d", kHalf), DomainError);

  const auto chain = DiseaseDag::from_edges({"root", "mid", "d"}, {{"mid", "root"}, {"d", "mid"}});
  CHECK(semantic_contribution(chain, "d", "root", kHalf) == 0.25);
  CHECK(semantic_value(chain, "d", kHalf) == 1.75);
  CHECK(semantic_value(chain, "mid", kHalf) == 1.5);
  CHECK(semantic_value(chain, "root", kHalf) == 1.0);
  CHECK_THROWS_AS(semantic_value(chain, "nope", kHalf), DomainError);
}

TEST_CASE("contribution takes the best path when several exist") {
  // d -> a -> root and d -> root directly: root contributes 0.5, not 0.25.
  const auto dag = DiseaseDag::from_edges({"root", "a", "d"}, {{"a", "root"}, {"d", "a"}, {"d", "root"}});
  CHECK(semantic_contribution(dag, "d", "root", kHalf) == 0.5);
}

TEST_CASE("disease similarity") {
  const auto dag = siblings();
  CHECK(disease_similarity(dag, "B", "B", kHalf) == 1.0);
  CHECK(disease_similarity(dag, "B", "C", kHalf) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(disease_similarity(dag, "B", "C", kHalf) - 1.0 / 3.0) < 1e-12);

  const auto split = DiseaseDag::from_edges({"x", "y", "x1", "y1"}, {{"x1", "x"}, {"y1", "y"}});
  CHECK(disease_similarity(split, "x1", "y1", kHalf) == 0.0);
}

TEST_CASE("miRNA best-match average") {
  Matrix s(2, 2);
  s << 1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0;
  const std::vector<Index> b{0}, c{1}, bc{0, 1};
  CHECK(mirna_similarity(b, b, s) == 1.0);
  CHECK(std::abs(mirna_similarity(b, c, s) - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(mirna_similarity(b, bc, s) - 7.0 / 9.0) < 1e-12);
  CHECK(mirna_similarity(bc, b, s) == mirna_similarity(b, bc, s));
  CHECK(mirna_similarity(std::vector<Index>{}, b, s) == 0.0);
}

TEST_CASE("similarity matrices over a dataset") {
  Dataset ds;
  for (auto [mi, d] : std::vector<std::pair<const char*, const char*>>{{"m1", "B"}, {"m2", "C"}, {"m3", "D"}, {"m3", "B"}})
    ds.triplets.push_back({ds.mirnas.add(mi), ds.diseases.add(d), ds.types.add("t")});
  ds.normalize();
  const auto built = build_similarity_matrices(ds, siblings(), kHalf);
  CHECK(built.warnings.empty());
  const Matrix& sn = built.disease.values;
  CHECK(sn.rows() == 3);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) CHECK(std::abs(sn(i, j) - (i == j ? 1.0 : 1.0 / 3.0)) < 1e-12);
  CHECK(sn == sn.transpose());
  CHECK_NOTHROW(built.mirna.validate());
  CHECK(built.mirna.values(0, 2) == doctest::Approx(mirna_similarity(std::vector<Index>{0}, std::vector<Index>{0, 2}, sn)));

  Dataset one;
  one.triplets.push_back({one.mirnas.add("m"), one.diseases.add("B"), one.types.add("t")});
  const auto single = build_similarity_matrices(one, siblings(), kHalf);
  CHECK(single.disease.values == Matrix::Ones(1, 1));
}

TEST_CASE("diseases missing from the hierarchy keep an identity row") {
  Dataset ds;
  ds.triplets.push_back({ds.mirnas.add("m1"), ds.diseases.add("B"), ds.types.add("t")});
  ds.triplets.push_back({ds.mirnas.add("m2"), ds.diseases.add("unknown disease"), ds.types.add("t")});
  ds.normalize();
  const auto built = build_similarity_matrices(ds, siblings(), kHalf);
  CHECK(built.warnings.size() == 1);
  CHECK(built.disease.values == Matrix::Identity(2, 2));
  CHECK(built.mirna.values(0, 1) == 0.0);
}

TEST_CASE("randomized hierarchies satisfy the similarity axioms") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto dag = random_dag(rng, 25);
    Dataset ds;
    std::uniform_int_distribution<int> pick(0, 24);
    for (int a = 0; a < 40; ++a)
      ds.triplets.push_back({ds.mirnas.add("m" + std::to_string(a % 12)), ds.diseases.add("d" + std::to_string(pick(rng))),
                             ds.types.add("t")});
    ds.normalize();
    const auto built = build_similarity_matrices(ds, dag, kHalf);
    CHECK_NOTHROW(built.disease.validate());
    CHECK_NOTHROW(built.mirna.validate());
    CHECK(built.disease.values.diagonal().isOnes(0.0));
    CHECK(built.mirna.values.diagonal().isOnes(0.0));
    for (Index a = 0; a < ds.n(); ++a)
      for (Index b = 0; b < ds.n(); ++b) {
        const auto na = dag.id(ds.diseases.label(a)), nb = dag.id(ds.diseases.label(b));
        const double expected = a == b ? 1.0 : oracle::disease_similarity_bfs(dag, na, nb, 0.5);
        CHECK(std::abs(built.disease.values(a, b) - expected) < 1e-12);
      }
    for (std::size_t node = 0; node < dag.size(); ++node) {
      const auto profile = semantic_profile(dag, node, kHalf);
      const auto bfs = oracle::contributions_bfs(dag, node, 0.5);
      REQUIRE(profile.size() == bfs.size());
      double sv = 0.0;
      for (const auto& [id, c] : profile) {
        CHECK(c == bfs.at(id));
        CHECK(c > 0.0);
        CHECK(c <= 1.0);
        sv += c;
      }
      CHECK(sv >= 1.0);
    }
  }
}

TEST_CASE("tree-number hierarchies") {
  const auto dag = DiseaseDag::from_tree_numbers({{"a", "C04"}, {"d", "C04.557"}, {"e", "C04.557.337.100"}});
  CHECK(dag.parents(dag.id("d")) == std::vector<DiseaseDag::NodeId>{dag.id("a")});
  // C04.557.337 has no owner, so a synthetic node sits between e and d.
  const auto mid = dag.find("tree:C04.557.337");
  REQUIRE(mid);
  CHECK(dag.is_synthetic(*mid));
  CHECK(dag.parents(dag.id("e")) == std::vector<DiseaseDag::NodeId>{*mid});
  CHECK(dag.parents(*mid) == std::vector<DiseaseDag::NodeId>{dag.id("d")});
  CHECK(semantic_value(dag, "e", kHalf) == 1.0 + 0.5 + 0.25 + 0.125);

  // Several tree numbers merge into one closure.
  const auto multi = DiseaseDag::from_tree_numbers({{"a", "C04"}, {"b", "C10"}, {"x", "C04.1"}, {"x", "C10.2"}});
  CHECK(multi.parents(multi.id("x")).size() == 2);
  CHECK(multi.ancestors(multi.id("x")).size() == 3);
}

TEST_CASE("hierarchy errors") {
  CHECK_THROWS_AS(DiseaseDag::from_edges({"a", "b"}, {{"a", "b"}, {"b", "a"}}), DomainError);
  CHECK_THROWS_AS(DiseaseDag::from_edges({"a"}, {{"a", "ghost"}}), DomainError);
  // Two diseases owning each other's prefixes form a cycle.
  CHECK_THROWS_AS(DiseaseDag::from_tree_numbers({{"p", "A"}, {"p", "B.1"}, {"q", "B"}, {"q", "A.1"}}), DomainError);
  CHECK_THROWS_AS(DiseaseDag::from_tree_numbers({{"p", "A..1"}}), DomainError);
  CHECK_THROWS_AS(SimParams{1.0}.validate(), DomainError);
}
