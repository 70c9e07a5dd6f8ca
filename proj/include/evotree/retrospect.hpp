#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evotree/oracle.hpp"
#include "evotree/tree.hpp"
#include "evotree/types.hpp"

namespace evotree {

/// A retrospection request: find historical evolution paths that end at work
/// resembling the given paper.
struct RetroQuery {
  std::string title;
  std::string abstract;
  int n_topics = 2;       // how many topic trees to consult
  int m_recent = 50;      // recency window: candidate terminals come from here
  int n_terminals = 5;    // terminals kept per topic
  double theta_sim = 0.5; // minimum similarity for a terminal
  int max_path_len = 15;
  int n_paths = 5;        // aggregated paths returned

  /// Throws OutOfRangeError when a count is < 1 or theta_sim leaves [0,1].
  void validate() const;
};

/// The text terminals and topics are matched against.
std::string query_text(const RetroQuery& query);

struct RetroPath {
  std::string topic;
  std::vector<PaperNode> nodes;  // chronological; back() is the terminal
  double terminal_similarity = 0.0;
  double rank_score = 0.0;
};

struct TerminalCandidate {
  PaperNode node;
  double similarity = 0.0;
};

enum class PathRanking {
  terminal_similarity,
  cumulative_importance,
};

/// Top query.n_topics topics by similarity to the query text, descending,
/// ties alphabetical. Throws std::invalid_argument when topics is empty.
std::vector<std::string> identify_topics(const RetroQuery& query,
                                         const std::vector<std::string>& topics,
                                         Oracle& oracle);

/// Scans the query.m_recent most recent nodes (year descending, ties by id
/// ascending), keeps those whose similarity to the query text reaches
/// query.theta_sim, and returns the top query.n_terminals by similarity.
/// Throws EmptyGraphError on an empty tree and NoTerminalsError when nothing
/// passes the threshold.
std::vector<TerminalCandidate> candidate_terminals(const TheTree& tree,
                                                   const RetroQuery& query,
                                                   Oracle& oracle);

/// The predecessor with the smallest non-negative year gap to `current`,
/// breaking ties by higher importance, then by smaller id. Returns nullopt
/// for a root. Throws UnknownEndpointError when current is not in the tree
/// and MissingImportanceError when a candidate predecessor has no importance.
std::optional<PaperNode> select_predecessor(const TheTree& tree,
                                            const PaperNode& current);

/// Walks backward from the terminal via select_predecessor until a root or
/// max_len nodes, then reverses into chronological order. The path's topic is
/// the tree's topic; similarity and rank are left for the caller.
RetroPath trace_path(const TheTree& tree, const PaperNode& terminal,
                     int max_len);

/// Deduplicates identical node sequences, ranks by the chosen key descending
/// (ties by terminal id ascending), and keeps the best n_paths. Sets
/// rank_score on every returned path.
std::vector<RetroPath> aggregate_paths(std::vector<RetroPath> paths,
                                       int n_paths, PathRanking ranking);

/// Steps 1-5 end to end over a set of per-topic trees. Topics that yield no
/// terminal are skipped; if none yields one, throws NoTerminalsError.
std::vector<RetroPath> run_retrospection(
    const RetroQuery& query, const std::map<std::string, TheTree>& trees,
    Oracle& oracle, PathRanking ranking = PathRanking::terminal_similarity);

}  // namespace evotree
