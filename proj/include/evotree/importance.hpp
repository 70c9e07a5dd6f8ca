#pragma once

#include <array>
#include <map>
#include <string>

#include "evotree/oracle.hpp"
#include "evotree/tree.hpp"

namespace evotree {

enum class CentralityKind {
  pagerank,
  citation_count,
  degree,
  betweenness,
  eigenvector,
};

inline constexpr std::array<CentralityKind, 5> kAllCentralityKinds = {
    CentralityKind::pagerank,    CentralityKind::citation_count,
    CentralityKind::degree,      CentralityKind::betweenness,
    CentralityKind::eigenvector,
};

std::string to_string(CentralityKind kind);

struct CentralityWeights {
  double pagerank_w = 0.2;
  double citation_w = 0.2;
  double degree_w = 0.2;
  double betweenness_w = 0.2;
  double eigenvector_w = 0.2;

  double weight_for(CentralityKind kind) const;
  double sum() const;
  /// All weights >= 0 and summing to 1 within 1e-9; OutOfRangeError otherwise.
  void validate() const;

  bool operator==(const CentralityWeights&) const = default;
};

struct CentralityOptions {
  double damping = 0.85;      // pagerank
  double tolerance = 1e-8;    // pagerank / eigenvector convergence
  int max_iterations = 200;   // cap before NonConvergenceError
};

using CentralityMap = std::map<std::string, double>;

/// Per-node centrality, min-max normalized to [0,1]. When every node ties,
/// all map to 0.5 (the measure carries no signal). The graph is viewed as a
/// simple graph: parallel edges collapse, self-loops are ignored.
/// citation_count counts only cites_plain edges (in-degree); the other four
/// measures run over all edges. Eigenvector centrality uses the undirected
/// view (the directed reasoning DAG has a degenerate principal eigenvector).
CentralityMap centrality(const TheTree& graph, CentralityKind kind,
                         const CentralityOptions& options = {});

/// The same values before min-max normalization; pagerank sums to 1 here.
CentralityMap raw_centrality(const TheTree& graph, CentralityKind kind,
                             const CentralityOptions& options = {});

/// S_graph(v): weighted blend of the five normalized centralities.
double graph_score(const TheTree& graph, const std::string& node_id,
                   const CentralityWeights& weights,
                   const CentralityOptions& options = {});

/// S_graph for every node at once; one centrality pass per measure.
CentralityMap graph_scores(const TheTree& graph,
                           const CentralityWeights& weights,
                           const CentralityOptions& options = {});

/// Data-driven weights: each measure weighted by the variance of its
/// normalized scores (uninformative measures fade), renormalized to sum 1;
/// uniform when every variance is zero.
CentralityWeights dynamic_weights(const TheTree& graph,
                                  const CentralityOptions& options = {});

/// S(v) = gamma * graph + (1 - gamma) * llm. OutOfRangeError outside [0,1].
ImportanceScore combined_importance(double graph_score, double llm_score,
                                    double gamma);

/// Fills node.importance for every node: S_graph from the tree's own
/// structure under dynamic weights, S_LLM from the oracle, blended by gamma.
void annotate_importance(TheTree& tree, Oracle& oracle,
                         const std::string& topic, double gamma,
                         const CentralityOptions& options = {});

}  // namespace evotree
