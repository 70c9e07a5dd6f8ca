#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evotree/corpus.hpp"
#include "evotree/oracle.hpp"
#include "evotree/tree.hpp"
#include "evotree/tvcv.hpp"
#include "evotree/types.hpp"

namespace evotree {

struct SearchConfig {
  double c0 = 1.0;                 // base exploration constant
  double lambda = 0.5;             // semantic-priority weight
  double tau = 5.0;                // year-gap decay scale
  int max_iterations = 100;
  int max_path_length = 15;        // nodes, rollout included
  std::uint64_t seed = 0;
  double reward_sensitivity = 0.5; // slope of the reward-adaptive coefficient

  /// OutOfRangeError on violated positivity constraints.
  void validate() const;
};

/// The three objective terms and their sum.
struct PathReward {
  double node_sum = 0.0;  // sum of S(v)
  double gen = 0.0;       // sum of per-step continuation * coherence
  double attr = 0.0;      // sum of edge attribution scores
  double total = 0.0;

  bool operator==(const PathReward&) const = default;
};

/// One node of the in-memory search tree. Children own their subtrees;
/// parent pointers stay valid for the tree's lifetime because nodes are
/// heap-allocated and never reparented.
struct SearchNode {
  std::string paper_id;
  int year = 0;
  int visits = 0;
  double total_reward = 0.0;
  SearchNode* parent = nullptr;
  std::vector<std::unique_ptr<SearchNode>> children;
  std::optional<double> cached_priority;
  bool exhausted = false;  // expansion already materialized all candidates

  SearchNode* add_child(std::string id, int child_year,
                        std::optional<double> priority = std::nullopt);
};

/// 0 for achronological candidates; otherwise exp(-max(0, gap-1)/tau) where
/// gap = candidate_year - path_tail_year, so same-year and one-year steps
/// score a full 1.0.
double temp_coherence(int candidate_year, int path_tail_year, double tau);

/// (Q/N + c*sqrt(ln N_p / N) + lambda*priority) * coherence.
/// UnvisitedNodeError when the node was never visited.
double sgt_uct(const SearchNode& node, int parent_visits, double c,
               double lambda, double priority, double coherence);

/// c0 * (1 + sensitivity * max(0, avg_reward)).
double exploration_coefficient(double c0, double avg_reward,
                               double sensitivity);

/// Walks from the root to a leaf: unvisited children first (best
/// lambda*priority*coherence, ties by id), otherwise the argmax SGT-UCT
/// child (ties by id). Stops at nodes with no children.
SearchNode& select(SearchNode& root, const SearchConfig& config);

/// Adds `reward` and one visit to the leaf and every ancestor.
void backpropagate(SearchNode& leaf, double reward);

/// Objective value of a concrete path. `edges[i]` connects path[i] to
/// path[i+1] and must carry an attribution score; every node needs an
/// importance annotation. AchronologicalPathError on year regressions.
PathReward path_reward(const std::vector<PaperNode>& path,
                       const std::vector<EvolutionEdge>& edges, Oracle& oracle,
                       const SearchConfig& config);

/// Reward of the path after a greedy rollout: repeatedly appends the corpus
/// paper with the highest oracle priority among chronologically valid,
/// unused papers, until max_path_length nodes or no candidate remains.
/// Rollout steps contribute importance and generation terms but no
/// attribution (nothing was verified).
double simulate(const std::vector<PaperNode>& path,
                const std::vector<EvolutionEdge>& edges, const Corpus& corpus,
                const std::string& topic, Oracle& oracle,
                const SearchConfig& config);

struct PipelineConfig {
  SearchConfig search;
  TvcvConfig tvcv;
  double gamma = 0.5;  // graph/LLM importance blend used by run()

  void validate() const;
};

/// Parses {"search": {...}, "tvcv": {..., "ranli": {...}}, "gamma": ...};
/// absent fields keep defaults, unknown keys and wrong types are
/// SchemaViolationErrors.
PipelineConfig pipeline_config_from_json(const std::string& text);
PipelineConfig load_pipeline_config(const std::string& path);

/// Every corpus paper plus plain citation edges between papers co-cited by a
/// single sentence (linked in chronological order, duplicates collapsed).
/// This is the graph-side signal for corpus-level importance scoring.
TheTree citation_skeleton(const Corpus& corpus, const std::string& topic);

/// Full SGT-MCTS construction. Root = corpus paper most similar to
/// root_concept (ties by id). Every accepted expansion edge is verified; the
/// returned tree holds all discovered nodes and edges and satisfies the
/// graph invariants. Deterministic for a given corpus, config and mock
/// oracle. EmptyCorpusError without papers.
TheTree run_search(const Corpus& corpus, const std::string& root_concept,
                   const PipelineConfig& config, Oracle& oracle);

}  // namespace evotree
