#include "evotree/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "evotree/errors.hpp"

namespace evotree {
namespace {

// Index-based simple-graph view of a TheTree; parallel edges collapsed,
// self-loops dropped.
struct SimpleGraph {
  std::vector<std::string> ids;           // sorted, index = position
  std::vector<std::set<std::size_t>> out;  // all edge kinds
  std::vector<std::set<std::size_t>> in;
  std::vector<std::set<std::size_t>> cite_in;  // cites_plain only
  std::vector<std::set<std::size_t>> undirected;

  std::size_t size() const { return ids.size(); }
};

SimpleGraph make_view(const TheTree& tree) {
  if (tree.nodes().empty()) {
    throw EmptyGraphError("centrality requires a non-empty graph");
  }
  SimpleGraph g;
  std::map<std::string, std::size_t> index;
  for (const auto& [id, node] : tree.nodes()) {
    index[id] = g.ids.size();
    g.ids.push_back(id);
  }
  g.out.resize(g.size());
  g.in.resize(g.size());
  g.cite_in.resize(g.size());
  g.undirected.resize(g.size());
  for (const EvolutionEdge& edge : tree.edges()) {
    std::size_t u = index.at(edge.source_id);
    std::size_t v = index.at(edge.target_id);
    if (u == v) continue;
    g.out[u].insert(v);
    g.in[v].insert(u);
    g.undirected[u].insert(v);
    g.undirected[v].insert(u);
    if (edge.kind == RelationKind::cites_plain) g.cite_in[v].insert(u);
  }
  return g;
}

std::vector<double> pagerank(const SimpleGraph& g,
                             const CentralityOptions& options) {
  const std::size_t n = g.size();
  const double d = options.damping;
  std::vector<double> rank(n, 1.0 / static_cast<double>(n));
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<double> next(n, 0.0);
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (g.out[u].empty()) {
        dangling += rank[u];
        continue;
      }
      double share = rank[u] / static_cast<double>(g.out[u].size());
      for (std::size_t v : g.out[u]) next[v] += share;
    }
    double base = (1.0 - d) / static_cast<double>(n) +
                  d * dangling / static_cast<double>(n);
    double diff = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] = base + d * next[v];
      diff += std::abs(next[v] - rank[v]);
    }
    rank.swap(next);
    if (diff < options.tolerance) return rank;
  }
  throw NonConvergenceError("pagerank did not converge within " +
                            std::to_string(options.max_iterations) +
                            " iterations");
}

std::vector<double> eigenvector(const SimpleGraph& g,
                                const CentralityOptions& options) {
  const std::size_t n = g.size();
  // Power iteration on A + I of the undirected view; the shift keeps the
  // iteration from oscillating on bipartite components.
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<double> next(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
      next[u] += x[u];
      for (std::size_t v : g.undirected[u]) next[u] += x[v];
    }
    double norm = std::sqrt(
        std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
    if (norm == 0.0) return next;  // no edges at all
    for (double& value : next) value /= norm;
    double diff = 0.0;
    for (std::size_t v = 0; v < n; ++v) diff += std::abs(next[v] - x[v]);
    x.swap(next);
    if (diff < options.tolerance) return x;
  }
  throw NonConvergenceError("eigenvector centrality did not converge within " +
                            std::to_string(options.max_iterations) +
                            " iterations");
}

// Brandes' algorithm, unweighted directed graph, endpoints excluded.
std::vector<double> betweenness(const SimpleGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> score(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::vector<std::size_t>> pred(n);
    std::vector<double> sigma(n, 0.0);
    std::vector<int> dist(n, -1);
    std::vector<std::size_t> order;
    sigma[s] = 1.0;
    dist[s] = 0;
    std::queue<std::size_t> frontier;
    frontier.push(s);
    while (!frontier.empty()) {
      std::size_t v = frontier.front();
      frontier.pop();
      order.push_back(v);
      for (std::size_t w : g.out[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          frontier.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          pred[w].push_back(v);
        }
      }
    }
    std::vector<double> delta(n, 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      std::size_t w = *it;
      for (std::size_t v : pred[w]) {
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != s) score[w] += delta[w];
    }
  }
  return score;
}

std::vector<double> raw_values(const SimpleGraph& g, CentralityKind kind,
                               const CentralityOptions& options) {
  const std::size_t n = g.size();
  std::vector<double> values(n, 0.0);
  switch (kind) {
    case CentralityKind::pagerank:
      return pagerank(g, options);
    case CentralityKind::citation_count:
      for (std::size_t v = 0; v < n; ++v) {
        values[v] = static_cast<double>(g.cite_in[v].size());
      }
      return values;
    case CentralityKind::degree:
      for (std::size_t v = 0; v < n; ++v) {
        values[v] = static_cast<double>(g.in[v].size() + g.out[v].size());
      }
      return values;
    case CentralityKind::betweenness:
      return betweenness(g);
    case CentralityKind::eigenvector:
      return eigenvector(g, options);
  }
  throw std::logic_error("unreachable centrality kind");
}

std::vector<double> min_max(std::vector<double> values) {
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi - *lo < 1e-15) {
    std::fill(values.begin(), values.end(), 0.5);
    return values;
  }
  double span = *hi - *lo;
  double low = *lo;
  for (double& value : values) value = (value - low) / span;
  return values;
}

CentralityMap to_map(const SimpleGraph& g, const std::vector<double>& values) {
  CentralityMap out;
  for (std::size_t v = 0; v < g.size(); ++v) out[g.ids[v]] = values[v];
  return out;
}

double variance(const std::vector<double>& values) {
  double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                static_cast<double>(values.size());
  double acc = 0.0;
  for (double value : values) acc += (value - mean) * (value - mean);
  return acc / static_cast<double>(values.size());
}

}  // namespace

std::string to_string(CentralityKind kind) {
  switch (kind) {
    case CentralityKind::pagerank:
      return "pagerank";
    case CentralityKind::citation_count:
      return "citation_count";
    case CentralityKind::degree:
      return "degree";
    case CentralityKind::betweenness:
      return "betweenness";
    case CentralityKind::eigenvector:
      return "eigenvector";
  }
  throw std::logic_error("unreachable centrality kind");
}

double CentralityWeights::weight_for(CentralityKind kind) const {
  switch (kind) {
    case CentralityKind::pagerank:
      return pagerank_w;
    case CentralityKind::citation_count:
      return citation_w;
    case CentralityKind::degree:
      return degree_w;
    case CentralityKind::betweenness:
      return betweenness_w;
    case CentralityKind::eigenvector:
      return eigenvector_w;
  }
  throw std::logic_error("unreachable centrality kind");
}

double CentralityWeights::sum() const {
  return pagerank_w + citation_w + degree_w + betweenness_w + eigenvector_w;
}

void CentralityWeights::validate() const {
  for (CentralityKind kind : kAllCentralityKinds) {
    if (weight_for(kind) < 0.0) {
      throw OutOfRangeError("centrality weight for " + to_string(kind) +
                            " is negative");
    }
  }
  if (std::abs(sum() - 1.0) > 1e-9) {
    throw OutOfRangeError("centrality weights sum to " +
                          std::to_string(sum()) + ", expected 1");
  }
}

CentralityMap centrality(const TheTree& graph, CentralityKind kind,
                         const CentralityOptions& options) {
  SimpleGraph g = make_view(graph);
  return to_map(g, min_max(raw_values(g, kind, options)));
}

CentralityMap raw_centrality(const TheTree& graph, CentralityKind kind,
                             const CentralityOptions& options) {
  SimpleGraph g = make_view(graph);
  return to_map(g, raw_values(g, kind, options));
}

CentralityMap graph_scores(const TheTree& graph,
                           const CentralityWeights& weights,
                           const CentralityOptions& options) {
  weights.validate();
  SimpleGraph g = make_view(graph);
  std::vector<double> total(g.size(), 0.0);
  for (CentralityKind kind : kAllCentralityKinds) {
    std::vector<double> values = min_max(raw_values(g, kind, options));
    double w = weights.weight_for(kind);
    for (std::size_t v = 0; v < g.size(); ++v) total[v] += w * values[v];
  }
  return to_map(g, total);
}

double graph_score(const TheTree& graph, const std::string& node_id,
                   const CentralityWeights& weights,
                   const CentralityOptions& options) {
  CentralityMap scores = graph_scores(graph, weights, options);
  auto it = scores.find(node_id);
  if (it == scores.end()) {
    throw std::invalid_argument("graph_score: unknown node id " + node_id);
  }
  return it->second;
}

CentralityWeights dynamic_weights(const TheTree& graph,
                                  const CentralityOptions& options) {
  SimpleGraph g = make_view(graph);
  std::array<double, 5> variances{};
  double total = 0.0;
  for (std::size_t k = 0; k < kAllCentralityKinds.size(); ++k) {
    variances[k] =
        variance(min_max(raw_values(g, kAllCentralityKinds[k], options)));
    total += variances[k];
  }
  CentralityWeights weights;  // uniform fallback
  if (total <= 0.0) return weights;
  weights.pagerank_w = variances[0] / total;
  weights.citation_w = variances[1] / total;
  weights.degree_w = variances[2] / total;
  weights.betweenness_w = variances[3] / total;
  weights.eigenvector_w = variances[4] / total;
  return weights;
}

ImportanceScore combined_importance(double graph_score, double llm_score,
                                    double gamma) {
  return make_importance(graph_score, llm_score, gamma);
}

void annotate_importance(TheTree& tree, Oracle& oracle,
                         const std::string& topic, double gamma,
                         const CentralityOptions& options) {
  CentralityWeights weights = dynamic_weights(tree, options);
  CentralityMap structural = graph_scores(tree, weights, options);
  for (const auto& [id, value] : structural) {
    double llm = oracle.importance_judgment(tree.node(id), topic);
    tree.mutable_node(id).importance = combined_importance(value, llm, gamma);
  }
}

}  // namespace evotree
