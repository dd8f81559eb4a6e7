#include <doctest.h>

#include <cmath>
#include <random>

#include "coordterm/graphout.hpp"
#include "support/oracles.hpp"

using namespace coordterm;

namespace {

std::vector<std::vector<int>> adjacency_of(std::size_t n,
                                           const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  return adj;
}

std::vector<std::pair<int, int>> random_graph(std::mt19937_64& rng, int n, double p) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (static_cast<double>(rng() % 10000) / 10000.0 < p) edges.emplace_back(u, v);
  return edges;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> fwd, bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (fwd.count(a[i]) && fwd[a[i]] != b[i]) return false;
    if (bwd.count(b[i]) && bwd[b[i]] != a[i]) return false;
    fwd[a[i]] = b[i];
    bwd[b[i]] = a[i];
  }
  return true;
}

}  // namespace

TEST_CASE("louvain recovers two cliques joined by a bridge") {
  // nodes 0..3 and 4..7 are cliques, edge (3,4) bridges them
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < 4; ++u)
    for (int v = u + 1; v < 4; ++v) edges.emplace_back(u, v);
  for (int u = 4; u < 8; ++u)
    for (int v = u + 1; v < 8; ++v) edges.emplace_back(u, v);
  edges.emplace_back(3, 4);

  const LouvainResult result = louvain(8, edges);
  const std::vector<int> planted = {0, 0, 0, 0, 1, 1, 1, 1};
  CHECK(same_partition(result.community, planted));

  // exhaustive maximum over all 4140 partitions of 8 nodes
  std::vector<int> best;
  const double best_q = oracles::best_partition_modularity(8, edges, &best);
  CHECK(result.modularity == doctest::Approx(best_q).epsilon(1e-12));
  CHECK(same_partition(result.community, best));
  CHECK(result.modularity ==
        doctest::Approx(oracles::modularity_of(8, edges, result.community)).epsilon(1e-12));
}

TEST_CASE("louvain edge cases: edgeless and complete graphs") {
  const LouvainResult none = louvain(5, {});
  CHECK(none.modularity == 0.0);
  std::set<int> ids(none.community.begin(), none.community.end());
  CHECK(ids.size() == 5);  // singleton communities

  std::vector<std::pair<int, int>> complete;
  for (int u = 0; u < 6; ++u)
    for (int v = u + 1; v < 6; ++v) complete.emplace_back(u, v);
  const LouvainResult one = louvain(6, complete);
  std::set<int> single(one.community.begin(), one.community.end());
  CHECK(single.size() == 1);
}

TEST_CASE("louvain modularity never decreases across passes") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 20);
    const auto edges = random_graph(rng, n, 0.25);
    const LouvainResult result = louvain(static_cast<std::size_t>(n), edges);
    REQUIRE(!result.pass_modularity.empty());
    for (std::size_t i = 1; i < result.pass_modularity.size(); ++i)
      CHECK(result.pass_modularity[i] >= result.pass_modularity[i - 1] - 1e-12);
    // community ids are dense from zero
    std::set<int> ids(result.community.begin(), result.community.end());
    int expect = 0;
    for (const int id : ids) CHECK(id == expect++);
  }
}

TEST_CASE("betweenness on hand graphs") {
  // path a-b-c
  const auto path = adjacency_of(3, {{0, 1}, {1, 2}});
  const auto bc_path = betweenness(3, path);
  CHECK(bc_path[0] == 0.0);
  CHECK(bc_path[1] == doctest::Approx(1.0));
  CHECK(bc_path[2] == 0.0);

  // star K1,4: center carries all C(4,2)=6 pairs
  const auto star = adjacency_of(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto bc_star = betweenness(5, star);
  CHECK(bc_star[0] == doctest::Approx(6.0));
  for (int leaf = 1; leaf <= 4; ++leaf) CHECK(bc_star[static_cast<std::size_t>(leaf)] == 0.0);
}

TEST_CASE("betweenness equals the path-enumeration oracle on small graphs") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 7);
    const auto edges = random_graph(rng, n, 0.35);
    const auto adj = adjacency_of(static_cast<std::size_t>(n), edges);
    const auto mine = betweenness(static_cast<std::size_t>(n), adj);
    const auto enumerated = oracles::betweenness_enumerate(static_cast<std::size_t>(n), adj);
    const auto counted = oracles::betweenness_pathcount(static_cast<std::size_t>(n), adj);
    for (int v = 0; v < n; ++v) {
      CHECK(mine[static_cast<std::size_t>(v)] ==
            doctest::Approx(enumerated[static_cast<std::size_t>(v)]).epsilon(1e-9));
      CHECK(mine[static_cast<std::size_t>(v)] ==
            doctest::Approx(counted[static_cast<std::size_t>(v)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("degree-one nodes in connected graphs carry no betweenness") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);
    // random tree keeps everything connected, then extra edges
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v)
      edges.emplace_back(static_cast<int>(rng() % static_cast<std::uint64_t>(v)), v);
    for (const auto& e : random_graph(rng, n, 0.1)) edges.push_back(e);
    std::set<std::pair<int, int>> unique;
    for (auto [u, v] : edges) unique.insert({std::min(u, v), std::max(u, v)});
    edges.assign(unique.begin(), unique.end());

    const auto adj = adjacency_of(static_cast<std::size_t>(n), edges);
    const auto bc = betweenness(static_cast<std::size_t>(n), adj);
    for (int v = 0; v < n; ++v)
      if (adj[static_cast<std::size_t>(v)].size() == 1)
        CHECK(bc[static_cast<std::size_t>(v)] == 0.0);
  }
}

TEST_CASE("build_graph selection, dedupe and annotation") {
  const std::vector<RankedPair> ranked = {
      {"e", "e", 9.0}, {"b", "a", 3.0}, {"c", "a", 2.0}, {"a", "b", 1.5}, {"d", "c", 0.5}};

  CHECK(build_graph({}, 0.0).nodes.empty());

  const CoordGraph top1 = build_graph(ranked, 0.0, 1);
  REQUIRE(top1.edges.size() == 1);
  // the self loop is skipped, the next ranked pair is taken, canonicalized
  CHECK(top1.edges[0].a == "a");
  CHECK(top1.edges[0].b == "b");
  CHECK(top1.edges[0].score == 3.0);

  const CoordGraph thresholded = build_graph(ranked, 1.0);
  CHECK(thresholded.edges.size() == 2);  // (a,b) deduped, keeps the best score
  CHECK(thresholded.edges[0].score == 3.0);

  for (const auto& node : thresholded.nodes) {
    CHECK(node.community >= 0);
    CHECK(node.betweenness >= 0.0);
    CHECK(node.size >= 1);
  }
}

TEST_CASE("graph export: DOT, JSON twin, fixed point") {
  const std::vector<RankedPair> ranked = {
      {"ArrayList", "Vector", 2.0}, {"HashMap", "TreeMap", 1.5}, {"ArrayList", "HashMap", 0.75}};
  const CoordGraph graph = build_graph(ranked, 0.0);

  const std::string dot = graph_to_dot(graph);
  CHECK(dot.find("graph coordterm {") != std::string::npos);
  CHECK(dot.find("\"ArrayList\" -- \"HashMap\"") != std::string::npos);
  CHECK(dot.find("community=") != std::string::npos);

  const std::string json = graph_to_json(graph);
  const CoordGraph reloaded = graph_from_json(json);
  CHECK(reloaded == graph);
  CHECK(graph_to_json(reloaded) == json);  // export -> parse -> export fixed point
  CHECK(graph_to_dot(reloaded) == dot);

  // empty graph still yields valid documents
  const CoordGraph empty = build_graph({}, 0.0);
  CHECK(graph_to_dot(empty).find("graph coordterm {") != std::string::npos);
  CHECK(graph_from_json(graph_to_json(empty)) == empty);

  CHECK_THROWS(graph_from_json("{"));
  CHECK_THROWS(graph_from_json("{}"));
}
