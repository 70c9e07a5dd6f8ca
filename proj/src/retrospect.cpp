#include "evotree/retrospect.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "evotree/errors.hpp"

namespace evotree {

void RetroQuery::validate() const {
  if (n_topics < 1) throw OutOfRangeError("n_topics must be >= 1");
  if (m_recent < 1) throw OutOfRangeError("m_recent must be >= 1");
  if (n_terminals < 1) throw OutOfRangeError("n_terminals must be >= 1");
  if (theta_sim < 0.0 || theta_sim > 1.0) {
    throw OutOfRangeError("theta_sim must lie in [0,1]");
  }
  if (max_path_len < 1) throw OutOfRangeError("max_path_len must be >= 1");
  if (n_paths < 1) throw OutOfRangeError("n_paths must be >= 1");
}

std::string query_text(const RetroQuery& query) {
  if (query.abstract.empty()) return query.title;
  return query.title + ". " + query.abstract;
}

std::vector<std::string> identify_topics(const RetroQuery& query,
                                         const std::vector<std::string>& topics,
                                         Oracle& oracle) {
  query.validate();
  if (topics.empty()) {
    throw std::invalid_argument("identify_topics: topics must be non-empty");
  }
  std::string text = query_text(query);
  std::vector<std::pair<double, std::string>> scored;
  for (const std::string& topic : topics) {
    scored.emplace_back(oracle.similarity(text, topic), topic);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (static_cast<int>(scored.size()) > query.n_topics) {
    scored.resize(query.n_topics);
  }
  std::vector<std::string> out;
  for (const auto& [score, topic] : scored) out.push_back(topic);
  return out;
}

std::vector<TerminalCandidate> candidate_terminals(const TheTree& tree,
                                                   const RetroQuery& query,
                                                   Oracle& oracle) {
  query.validate();
  if (tree.empty()) {
    throw EmptyGraphError("candidate_terminals needs a non-empty tree");
  }

  std::vector<const PaperNode*> recent;
  for (const auto& [id, node] : tree.nodes()) recent.push_back(&node);
  std::sort(recent.begin(), recent.end(), [](const auto* a, const auto* b) {
    if (a->year != b->year) return a->year > b->year;
    return a->id < b->id;
  });
  if (static_cast<int>(recent.size()) > query.m_recent) {
    recent.resize(query.m_recent);
  }

  std::string text = query_text(query);
  std::vector<TerminalCandidate> kept;
  for (const PaperNode* node : recent) {
    double s = oracle.similarity(text, node_statement(*node));
    if (s >= query.theta_sim) kept.push_back({*node, s});
  }
  if (kept.empty()) {
    throw NoTerminalsError("no node within the recency window reached theta_sim");
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.node.id < b.node.id;
  });
  if (static_cast<int>(kept.size()) > query.n_terminals) {
    kept.resize(query.n_terminals);
  }
  return kept;
}

std::optional<PaperNode> select_predecessor(const TheTree& tree,
                                            const PaperNode& current) {
  if (!tree.has_node(current.id)) {
    throw UnknownEndpointError("select_predecessor: node " + current.id +
                               " is not in the tree");
  }
  std::vector<std::string> preds = tree.predecessors(current.id);
  std::set<std::string> unique(preds.begin(), preds.end());

  const PaperNode* best = nullptr;
  int best_gap = 0;
  double best_importance = 0.0;
  for (const std::string& id : unique) {
    const PaperNode& pred = tree.node(id);
    int gap = current.year - pred.year;
    if (gap < 0) continue;
    if (!pred.importance) {
      throw MissingImportanceError("predecessor " + id +
                                   " has no importance score");
    }
    double s = pred.importance->combined;
    bool better = best == nullptr || gap < best_gap ||
                  (gap == best_gap && s > best_importance);
    // std::set iterates ids ascending, so equal (gap, S) keeps the first id.
    if (better) {
      best = &pred;
      best_gap = gap;
      best_importance = s;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

RetroPath trace_path(const TheTree& tree, const PaperNode& terminal,
                     int max_len) {
  if (max_len < 1) throw std::invalid_argument("trace_path: max_len must be >= 1");
  if (!tree.has_node(terminal.id)) {
    throw UnknownEndpointError("trace_path: node " + terminal.id +
                               " is not in the tree");
  }
  RetroPath path;
  path.topic = tree.topic();
  path.nodes.push_back(tree.node(terminal.id));
  while (static_cast<int>(path.nodes.size()) < max_len) {
    std::optional<PaperNode> pred = select_predecessor(tree, path.nodes.back());
    if (!pred) break;
    path.nodes.push_back(*std::move(pred));
  }
  std::reverse(path.nodes.begin(), path.nodes.end());
  return path;
}

namespace {

double ranking_key(const RetroPath& path, PathRanking ranking) {
  if (ranking == PathRanking::terminal_similarity) {
    return path.terminal_similarity;
  }
  double sum = 0.0;
  for (const PaperNode& node : path.nodes) {
    if (node.importance) sum += node.importance->combined;
  }
  return sum;
}

}  // namespace

std::vector<RetroPath> aggregate_paths(std::vector<RetroPath> paths,
                                       int n_paths, PathRanking ranking) {
  if (paths.empty()) {
    throw std::invalid_argument("aggregate_paths: paths must be non-empty");
  }
  if (n_paths < 1) {
    throw std::invalid_argument("aggregate_paths: n_paths must be >= 1");
  }
  for (const RetroPath& path : paths) {
    if (path.nodes.empty()) {
      throw std::invalid_argument("aggregate_paths: path without nodes");
    }
  }

  std::set<std::vector<std::string>> seen;
  std::vector<RetroPath> unique;
  for (RetroPath& path : paths) {
    std::vector<std::string> ids;
    for (const PaperNode& node : path.nodes) ids.push_back(node.id);
    if (seen.insert(std::move(ids)).second) {
      path.rank_score = ranking_key(path, ranking);
      unique.push_back(std::move(path));
    }
  }
  std::stable_sort(unique.begin(), unique.end(),
                   [](const RetroPath& a, const RetroPath& b) {
                     if (a.rank_score != b.rank_score) {
                       return a.rank_score > b.rank_score;
                     }
                     return a.nodes.back().id < b.nodes.back().id;
                   });
  if (static_cast<int>(unique.size()) > n_paths) unique.resize(n_paths);
  return unique;
}

std::vector<RetroPath> run_retrospection(const RetroQuery& query,
                                         const std::map<std::string, TheTree>& trees,
                                         Oracle& oracle, PathRanking ranking) {
  query.validate();
  std::vector<std::string> topics;
  for (const auto& [topic, tree] : trees) topics.push_back(topic);
  std::vector<std::string> chosen = identify_topics(query, topics, oracle);

  std::vector<RetroPath> collected;
  for (const std::string& topic : chosen) {
    const TheTree& tree = trees.at(topic);
    std::vector<TerminalCandidate> terminals;
    try {
      terminals = candidate_terminals(tree, query, oracle);
    } catch (const NoTerminalsError&) {
      continue;
    } catch (const EmptyGraphError&) {
      continue;
    }
    for (const TerminalCandidate& terminal : terminals) {
      RetroPath path = trace_path(tree, terminal.node, query.max_path_len);
      path.topic = topic;
      path.terminal_similarity = terminal.similarity;
      collected.push_back(std::move(path));
    }
  }
  if (collected.empty()) {
    throw NoTerminalsError("no topic produced a terminal for this query");
  }
  return aggregate_paths(std::move(collected), query.n_paths, ranking);
}

}  // namespace evotree
