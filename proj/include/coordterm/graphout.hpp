#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "coordterm/classifier.hpp"

namespace coordterm {

struct GraphNode {
  std::string id;
  double betweenness = 0.0;
  int community = 0;
  int size = 1;  // n - rank + 1, by descending betweenness

  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  std::string a, b;  // canonical, a < b
  double score = 0.0;
  int community = -1;  // shared endpoint community, -1 when mixed

  bool operator==(const GraphEdge&) const = default;
};

struct CoordGraph {
  std::vector<GraphNode> nodes;  // sorted by id
  std::vector<GraphEdge> edges;  // sorted by (a, b)
  double modularity = 0.0;

  bool operator==(const CoordGraph&) const = default;
  std::vector<std::vector<int>> adjacency() const;
  int node_index(const std::string& id) const;  // -1 when absent
};

// Keeps ranked pairs with score >= threshold (or the top k when top_k > 0),
// drops self-loops and duplicate edges, and runs community detection plus
// centrality so every node is annotated.
CoordGraph build_graph(const std::vector<RankedPair>& ranked, double threshold,
                       std::size_t top_k = 0);

struct LouvainResult {
  std::vector<int> community;            // dense ids from 0
  double modularity = 0.0;
  std::vector<double> pass_modularity;   // after each pass, non-decreasing
};

// Two-phase modularity optimization with lexicographic (index) node order,
// so results are reproducible without a seed.
LouvainResult louvain(std::size_t n, const std::vector<std::pair<int, int>>& edges);

// Exact unweighted betweenness via single-source shortest-path accumulation;
// undirected pair contributions are halved.
std::vector<double> betweenness(std::size_t n, const std::vector<std::vector<int>>& adjacency);

// Recomputes communities, betweenness, node sizes and modularity in place.
void annotate_graph(CoordGraph& graph);

std::string graph_to_dot(const CoordGraph& graph, const std::string* config_echo = nullptr);
std::string graph_to_json(const CoordGraph& graph, const std::string* config_echo = nullptr);
CoordGraph graph_from_json(const std::string& text);

void save_graph_dot(const CoordGraph& graph, const std::string& path,
                    const std::string* config_echo = nullptr);
void save_graph_json(const CoordGraph& graph, const std::string& path,
                     const std::string* config_echo = nullptr);
CoordGraph load_graph_json(const std::string& path);

}  // namespace coordterm
