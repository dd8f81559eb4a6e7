#include "coordterm/graphout.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace coordterm {

std::vector<std::vector<int>> CoordGraph::adjacency() const {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    index[nodes[i].id] = static_cast<int>(i);
  std::vector<std::vector<int>> adj(nodes.size());
  for (const auto& e : edges) {
    const int u = index.at(e.a);
    const int v = index.at(e.b);
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& neighbors : adj) std::sort(neighbors.begin(), neighbors.end());
  return adj;
}

int CoordGraph::node_index(const std::string& id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const GraphNode& n, const std::string& s) { return n.id < s; });
  if (it == nodes.end() || it->id != id) return -1;
  return static_cast<int>(it - nodes.begin());
}

CoordGraph build_graph(const std::vector<RankedPair>& ranked, double threshold,
                       std::size_t top_k) {
  std::map<WordPair, double> kept;
  std::size_t taken = 0;
  for (const auto& pair : ranked) {  // ranked is sorted by descending score
    if (top_k > 0) {
      if (taken >= top_k) break;
    } else if (pair.score < threshold) {
      break;
    }
    if (pair.x == pair.y) continue;
    const WordPair key = canonical_pair(pair.x, pair.y);
    if (kept.count(key)) continue;
    kept[key] = pair.score;
    ++taken;
  }

  CoordGraph graph;
  std::set<std::string> ids;
  for (const auto& [pair, score] : kept) {
    ids.insert(pair.first);
    ids.insert(pair.second);
    graph.edges.push_back({pair.first, pair.second, score, -1});
  }
  for (const auto& id : ids) graph.nodes.push_back({id, 0.0, 0, 1});
  annotate_graph(graph);
  return graph;
}

namespace {

// Weighted modularity working graph for the aggregation phase.
struct LevelGraph {
  std::size_t n = 0;
  std::vector<std::map<int, double>> weights;  // symmetric, self-loops on diagonal
  double two_m = 0.0;                          // sum over the full adjacency matrix

  std::vector<double> degree() const {
    std::vector<double> k(n, 0.0);
    for (std::size_t u = 0; u < n; ++u)
      for (const auto& [v, w] : weights[u]) k[u] += w;
    return k;
  }
};

double level_modularity(const LevelGraph& g, const std::vector<int>& community) {
  if (g.two_m <= 0.0) return 0.0;
  const auto k = g.degree();
  std::map<int, double> internal, total;
  for (std::size_t u = 0; u < g.n; ++u) {
    total[community[u]] += k[u];
    for (const auto& [v, w] : g.weights[u])
      if (community[u] == community[static_cast<std::size_t>(v)]) internal[community[u]] += w;
  }
  double q = 0.0;
  for (const auto& [c, in_w] : internal) q += in_w / g.two_m;
  for (const auto& [c, tot] : total) q -= (tot / g.two_m) * (tot / g.two_m);
  return q;
}

}  // namespace

LouvainResult louvain(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  LouvainResult result;
  result.community.resize(n);
  std::iota(result.community.begin(), result.community.end(), 0);
  if (n == 0) return result;

  LevelGraph g;
  g.n = n;
  g.weights.resize(n);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    g.weights[static_cast<std::size_t>(u)][v] += 1.0;
    g.weights[static_cast<std::size_t>(v)][u] += 1.0;
    g.two_m += 2.0;
  }
  if (g.two_m <= 0.0) {  // edgeless: singleton communities, Q = 0
    result.pass_modularity.push_back(0.0);
    return result;
  }

  // node_map[i] = community of original node i at the current level
  std::vector<int> node_map(n);
  std::iota(node_map.begin(), node_map.end(), 0);

  for (;;) {
    const auto k = g.degree();
    std::vector<int> community(g.n);
    std::iota(community.begin(), community.end(), 0);
    std::vector<double> community_total = k;

    bool any_move = false;
    for (bool moved = true; moved;) {
      moved = false;
      for (std::size_t u = 0; u < g.n; ++u) {
        const int current = community[u];
        std::map<int, double> links;  // community -> weight from u (self-loops excluded)
        double self_loop = 0.0;
        for (const auto& [v, w] : g.weights[u]) {
          if (static_cast<std::size_t>(v) == u)
            self_loop += w;
          else
            links[community[static_cast<std::size_t>(v)]] += w;
        }
        community_total[static_cast<std::size_t>(current)] -= k[u];

        // proportional to the modularity delta of placing the detached node
        // into c; the common factor cancels in comparisons
        auto gain_of = [&](int c, double w_uc) {
          return w_uc / g.two_m -
                 community_total[static_cast<std::size_t>(c)] * k[u] / (g.two_m * g.two_m);
        };
        int best = current;
        double best_gain = gain_of(current, links.count(current) ? links[current] : 0.0);
        for (const auto& [c, w_uc] : links) {
          if (c == current) continue;
          const double gain = gain_of(c, w_uc);
          if (gain > best_gain + 1e-12) {
            best = c;
            best_gain = gain;
          }
        }
        community_total[static_cast<std::size_t>(best)] += k[u];
        if (best != current) {
          community[u] = best;
          moved = true;
          any_move = true;
        }
      }
    }

    // densify community ids in order of first appearance
    std::map<int, int> relabel;
    for (std::size_t u = 0; u < g.n; ++u)
      if (!relabel.count(community[u]))
        relabel[community[u]] = static_cast<int>(relabel.size());
    for (auto& c : community) c = relabel.at(c);

    for (std::size_t i = 0; i < n; ++i)
      node_map[i] = community[static_cast<std::size_t>(node_map[i])];

    const double q = level_modularity(g, community);
    if (!result.pass_modularity.empty()) {
      // modularity never decreases across passes
      assert(q + 1e-9 >= result.pass_modularity.back());
    }
    result.pass_modularity.push_back(q);

    const std::size_t communities = relabel.size();
    if (!any_move || communities == g.n) break;

    // aggregate: communities become nodes, intra weights become self-loops
    LevelGraph next;
    next.n = communities;
    next.weights.resize(communities);
    next.two_m = g.two_m;
    for (std::size_t u = 0; u < g.n; ++u) {
      for (const auto& [v, w] : g.weights[u]) {
        const int cu = community[u];
        const int cv = community[static_cast<std::size_t>(v)];
        next.weights[static_cast<std::size_t>(cu)][cv] += w;
      }
    }
    g = std::move(next);
  }

  result.community = node_map;
  result.modularity = result.pass_modularity.back();
  return result;
}

std::vector<double> betweenness(std::size_t n, const std::vector<std::vector<int>>& adjacency) {
  std::vector<double> centrality(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<int> order;
    order.reserve(n);
    std::vector<std::vector<int>> preds(n);
    std::vector<long long> sigma(n, 0);
    std::vector<int> dist(n, -1);
    sigma[s] = 1;
    dist[static_cast<int>(s)] = 0;

    std::vector<int> queue{static_cast<int>(s)};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      order.push_back(v);
      for (const int w : adjacency[static_cast<std::size_t>(v)]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }

    std::vector<double> delta(n, 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int w = *it;
      for (const int v : preds[w])
        delta[v] += static_cast<double>(sigma[v]) / static_cast<double>(sigma[w]) *
                    (1.0 + delta[w]);
      if (static_cast<std::size_t>(w) != s) centrality[w] += delta[w];
    }
  }
  for (double& c : centrality) c /= 2.0;  // undirected: each pair counted twice
  return centrality;
}

void annotate_graph(CoordGraph& graph) {
  std::sort(graph.nodes.begin(), graph.nodes.end(),
            [](const GraphNode& a, const GraphNode& b) { return a.id < b.id; });
  std::sort(graph.edges.begin(), graph.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    return std::tie(a.a, a.b) < std::tie(b.a, b.b);
  });

  std::map<std::string, int> index;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i)
    index[graph.nodes[i].id] = static_cast<int>(i);
  std::vector<std::pair<int, int>> edge_list;
  edge_list.reserve(graph.edges.size());
  for (const auto& e : graph.edges) edge_list.emplace_back(index.at(e.a), index.at(e.b));

  const LouvainResult communities = louvain(graph.nodes.size(), edge_list);
  graph.modularity = communities.modularity;
  const auto centrality = betweenness(graph.nodes.size(), graph.adjacency());

  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    graph.nodes[i].community = communities.community[i];
    graph.nodes[i].betweenness = centrality[i];
  }
  for (auto& e : graph.edges) {
    const int ca = graph.nodes[static_cast<std::size_t>(index.at(e.a))].community;
    const int cb = graph.nodes[static_cast<std::size_t>(index.at(e.b))].community;
    e.community = ca == cb ? ca : -1;
  }

  // size = n - rank + 1 under descending betweenness, ties by id
  std::vector<std::size_t> by_centrality(graph.nodes.size());
  std::iota(by_centrality.begin(), by_centrality.end(), 0);
  std::sort(by_centrality.begin(), by_centrality.end(), [&](std::size_t a, std::size_t b) {
    if (graph.nodes[a].betweenness != graph.nodes[b].betweenness)
      return graph.nodes[a].betweenness > graph.nodes[b].betweenness;
    return graph.nodes[a].id < graph.nodes[b].id;
  });
  for (std::size_t rank = 0; rank < by_centrality.size(); ++rank)
    graph.nodes[by_centrality[rank]].size = static_cast<int>(by_centrality.size() - rank);
}

namespace {

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

const char* palette_color(int community) {
  if (community < 0) return "#c0c0c0";
  return kPalette[community % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

}  // namespace

std::string graph_to_dot(const CoordGraph& graph, const std::string* config_echo) {
  std::ostringstream out;
  if (config_echo) out << "// config: " << *config_echo << "\n";
  out << "graph coordterm {\n";
  out << "  // modularity " << format_double(graph.modularity) << "\n";
  for (const auto& node : graph.nodes) {
    out << "  \"" << dot_escape(node.id) << "\" [community=" << node.community
        << ", size=" << node.size << ", betweenness=" << format_double(node.betweenness)
        << "];\n";
  }
  for (const auto& edge : graph.edges) {
    out << "  \"" << dot_escape(edge.a) << "\" -- \"" << dot_escape(edge.b)
        << "\" [score=" << format_double(edge.score) << ", community=" << edge.community
        << ", color=\"" << palette_color(edge.community) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string graph_to_json(const CoordGraph& graph, const std::string* config_echo) {
  nlohmann::json j;
  j["version"] = 1;
  if (config_echo) j["config"] = nlohmann::json::parse(*config_echo);
  j["modularity"] = graph.modularity;

  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& node : graph.nodes) {
    nodes.push_back({{"id", node.id},
                     {"community", node.community},
                     {"betweenness", node.betweenness},
                     {"size", node.size}});
  }
  j["nodes"] = std::move(nodes);

  nlohmann::json edges = nlohmann::json::array();
  for (const auto& edge : graph.edges) {
    edges.push_back({{"source", edge.a},
                     {"target", edge.b},
                     {"score", edge.score},
                     {"community", edge.community}});
  }
  j["edges"] = std::move(edges);
  return j.dump(2) + "\n";
}

CoordGraph graph_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("graph: malformed JSON: ") + e.what());
  }
  if (!j.contains("nodes") || !j.contains("edges"))
    throw std::runtime_error("graph: missing \"nodes\" or \"edges\" field");

  CoordGraph graph;
  graph.modularity = j.value("modularity", 0.0);
  for (const auto& n : j["nodes"]) {
    graph.nodes.push_back({n.at("id").get<std::string>(), n.value("betweenness", 0.0),
                           n.value("community", 0), n.value("size", 1)});
  }
  for (const auto& e : j["edges"]) {
    graph.edges.push_back({e.at("source").get<std::string>(), e.at("target").get<std::string>(),
                           e.value("score", 0.0), e.value("community", -1)});
  }
  return graph;
}

void save_graph_dot(const CoordGraph& graph, const std::string& path,
                    const std::string* config_echo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("graph: cannot open for writing: " + path);
  out << graph_to_dot(graph, config_echo);
}

void save_graph_json(const CoordGraph& graph, const std::string& path,
                     const std::string* config_echo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("graph: cannot open for writing: " + path);
  out << graph_to_json(graph, config_echo);
}

CoordGraph load_graph_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("graph: cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return graph_from_json(buffer.str());
}

}  // namespace coordterm
