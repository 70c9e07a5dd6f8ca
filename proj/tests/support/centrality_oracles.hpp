#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "builders.hpp"
#include "evotree/tree.hpp"

namespace evotree::testsupport {

/// All nodes share a year so citation edges may point either way.
inline TheTree random_citation_graph(std::mt19937_64& rng, int max_nodes = 8) {
  std::uniform_int_distribution<int> size(1, max_nodes);
  std::bernoulli_distribution edge_coin(0.3);
  int n = size(rng);
  TheTree tree("random");
  for (int i = 0; i < n; ++i) {
    tree.add_node(paper("n" + std::to_string(i), 2000));
  }
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u != v && edge_coin(rng)) {
        tree.add_edge(citation_edge("n" + std::to_string(u),
                                    "n" + std::to_string(v)));
      }
    }
  }
  return tree;
}

struct DirectedView {
  std::vector<std::string> ids;
  std::vector<std::set<int>> out;
};

inline DirectedView directed_view(const TheTree& tree) {
  DirectedView view;
  std::map<std::string, int> index;
  for (const auto& [id, node] : tree.nodes()) {
    index[id] = static_cast<int>(view.ids.size());
    view.ids.push_back(id);
  }
  view.out.resize(view.ids.size());
  for (const EvolutionEdge& edge : tree.edges()) {
    int u = index.at(edge.source_id);
    int v = index.at(edge.target_id);
    if (u != v) view.out[u].insert(v);
  }
  return view;
}

// Exhaustive shortest-path enumeration; feasible because test graphs are <= 8
// nodes. Deliberately shares no code with the library implementation.
inline std::map<std::string, double> brute_betweenness(const TheTree& tree) {
  DirectedView view = directed_view(tree);
  int n = static_cast<int>(view.ids.size());
  std::vector<double> score(n, 0.0);
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) {
      if (s == t) continue;
      std::vector<std::vector<int>> paths;
      std::vector<int> current = {s};
      std::vector<bool> visited(n, false);
      visited[s] = true;
      // DFS over all simple paths from s to t.
      std::function<void(int)> walk = [&](int v) {
        if (v == t) {
          paths.push_back(current);
          return;
        }
        for (int w : view.out[v]) {
          if (visited[w]) continue;
          visited[w] = true;
          current.push_back(w);
          walk(w);
          current.pop_back();
          visited[w] = false;
        }
      };
      walk(s);
      if (paths.empty()) continue;
      std::size_t best = paths[0].size();
      for (const auto& path : paths) best = std::min(best, path.size());
      double sigma = 0.0;
      std::vector<double> through(n, 0.0);
      for (const auto& path : paths) {
        if (path.size() != best) continue;
        sigma += 1.0;
        for (std::size_t i = 1; i + 1 < path.size(); ++i) {
          through[path[i]] += 1.0;
        }
      }
      for (int v = 0; v < n; ++v) score[v] += through[v] / sigma;
    }
  }
  std::map<std::string, double> out;
  for (int v = 0; v < n; ++v) out[view.ids[v]] = score[v];
  return out;
}

// Dense-matrix power iteration against the full Google matrix; independent of
// the library's sparse accumulation.
inline std::map<std::string, double> oracle_pagerank(const TheTree& tree,
                                                     double damping = 0.85) {
  DirectedView view = directed_view(tree);
  int n = static_cast<int>(view.ids.size());
  std::vector<std::vector<double>> google(n, std::vector<double>(n, 0.0));
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      double link = view.out[u].empty()
                        ? 1.0 / n
                        : (view.out[u].count(v) ? 1.0 / view.out[u].size() : 0.0);
      google[v][u] = damping * link + (1.0 - damping) / n;
    }
  }
  std::vector<double> x(n, 1.0 / n);
  for (int iter = 0; iter < 5000; ++iter) {
    std::vector<double> next(n, 0.0);
    for (int v = 0; v < n; ++v) {
      for (int u = 0; u < n; ++u) next[v] += google[v][u] * x[u];
    }
    x.swap(next);
  }
  std::map<std::string, double> out;
  for (int v = 0; v < n; ++v) out[view.ids[v]] = x[v];
  return out;
}

}  // namespace evotree::testsupport
