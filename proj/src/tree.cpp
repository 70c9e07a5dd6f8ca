#include "evotree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "evotree/errors.hpp"

namespace evotree {

ImportanceScore make_importance(double graph_score, double llm_score, double gamma) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(graph_score) || !in_unit(llm_score) || !in_unit(gamma)) {
    throw OutOfRangeError("importance components must lie in [0,1]");
  }
  ImportanceScore s;
  s.graph_score = graph_score;
  s.llm_score = llm_score;
  s.gamma = gamma;
  s.combined = gamma * graph_score + (1.0 - gamma) * llm_score;
  return s;
}

std::string node_statement(const PaperNode& node) {
  if (node.abstract.empty()) return node.title;
  return node.title + ". " + node.abstract;
}

const char* to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::evolves_into: return "evolves_into";
    case RelationKind::enables: return "enables";
    case RelationKind::cites_plain: return "cites_plain";
  }
  return "evolves_into";
}

const char* to_string(NliLabel label) {
  switch (label) {
    case NliLabel::entailment: return "entailment";
    case NliLabel::contradiction: return "contradiction";
    case NliLabel::neutral: return "neutral";
  }
  return "neutral";
}

RelationKind relation_kind_from_string(const std::string& s) {
  if (s == "evolves_into") return RelationKind::evolves_into;
  if (s == "enables") return RelationKind::enables;
  if (s == "cites_plain") return RelationKind::cites_plain;
  throw Error("unknown relation kind: " + s);
}

NliLabel nli_label_from_string(const std::string& s) {
  if (s == "entailment") return NliLabel::entailment;
  if (s == "contradiction") return NliLabel::contradiction;
  if (s == "neutral") return NliLabel::neutral;
  throw Error("unknown NLI label: " + s);
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::duplicate_id: return "duplicate_id";
    case ViolationKind::invalid_year: return "invalid_year";
    case ViolationKind::empty_title: return "empty_title";
    case ViolationKind::unknown_endpoint: return "unknown_endpoint";
    case ViolationKind::achronological_edge: return "achronological_edge";
    case ViolationKind::cycle: return "cycle";
    case ViolationKind::missing_attribution: return "missing_attribution";
    case ViolationKind::bad_importance_blend: return "bad_importance_blend";
  }
  return "unknown";
}

const std::string& TheTree::add_node(PaperNode node) {
  if (node.title.empty()) {
    throw EmptyTitleError("node '" + node.id + "' has an empty title");
  }
  if (node.year < kMinYear || node.year > horizon_year_) {
    throw InvalidYearError("node '" + node.id + "' has year " + std::to_string(node.year) +
                           " outside [" + std::to_string(kMinYear) + ", " +
                           std::to_string(horizon_year_) + "]");
  }
  if (nodes_.count(node.id)) {
    throw DuplicateIdError("node id '" + node.id + "' already present");
  }
  auto [it, inserted] = nodes_.emplace(node.id, std::move(node));
  (void)inserted;
  return it->first;
}

void TheTree::add_node_unchecked(PaperNode node) {
  nodes_.insert_or_assign(node.id, std::move(node));
}

void TheTree::check_edge(const EvolutionEdge& edge) const {
  auto src = nodes_.find(edge.source_id);
  auto dst = nodes_.find(edge.target_id);
  if (src == nodes_.end()) {
    throw UnknownEndpointError("edge source '" + edge.source_id + "' not in tree");
  }
  if (dst == nodes_.end()) {
    throw UnknownEndpointError("edge target '" + edge.target_id + "' not in tree");
  }
  if (src->second.year > dst->second.year) {
    throw AchronologicalEdgeError("edge " + edge.source_id + "->" + edge.target_id +
                                  " goes backward in time (" + std::to_string(src->second.year) +
                                  " > " + std::to_string(dst->second.year) + ")");
  }
  if (edge.kind != RelationKind::cites_plain && !edge.attribution_score.has_value()) {
    throw MissingAttributionError("edge " + edge.source_id + "->" + edge.target_id +
                                  " lacks an attribution score");
  }
  if (edge.kind != RelationKind::cites_plain &&
      reasoning_path_exists(edge.target_id, edge.source_id)) {
    throw CycleIntroducedError("edge " + edge.source_id + "->" + edge.target_id +
                               " would close a reasoning cycle");
  }
}

bool TheTree::reasoning_path_exists(const std::string& from, const std::string& to) const {
  if (from == to) return true;
  std::set<std::string> seen{from};
  std::deque<std::string> frontier{from};
  while (!frontier.empty()) {
    std::string cur = frontier.front();
    frontier.pop_front();
    auto it = out_idx_.find(cur);
    if (it == out_idx_.end()) continue;
    for (std::size_t idx : it->second) {
      const EvolutionEdge& e = edges_[idx];
      if (e.kind == RelationKind::cites_plain) continue;
      if (e.target_id == to) return true;
      if (seen.insert(e.target_id).second) frontier.push_back(e.target_id);
    }
  }
  return false;
}

std::size_t TheTree::add_edge(EvolutionEdge edge) {
  check_edge(edge);
  add_edge_unchecked(std::move(edge));
  return edges_.size() - 1;
}

void TheTree::add_edge_unchecked(EvolutionEdge edge) {
  std::size_t idx = edges_.size();
  out_idx_[edge.source_id].push_back(idx);
  in_idx_[edge.target_id].push_back(idx);
  edges_.push_back(std::move(edge));
}

const PaperNode& TheTree::node(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownEndpointError("no node with id '" + id + "'");
  return it->second;
}

PaperNode& TheTree::mutable_node(const std::string& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownEndpointError("no node with id '" + id + "'");
  return it->second;
}

std::vector<const EvolutionEdge*> TheTree::in_edges(const std::string& id) const {
  std::vector<const EvolutionEdge*> out;
  auto it = in_idx_.find(id);
  if (it == in_idx_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t idx : it->second) out.push_back(&edges_[idx]);
  return out;
}

std::vector<const EvolutionEdge*> TheTree::out_edges(const std::string& id) const {
  std::vector<const EvolutionEdge*> out;
  auto it = out_idx_.find(id);
  if (it == out_idx_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t idx : it->second) out.push_back(&edges_[idx]);
  return out;
}

std::vector<std::string> TheTree::predecessors(const std::string& id) const {
  std::vector<std::string> out;
  for (const EvolutionEdge* e : in_edges(id)) out.push_back(e->source_id);
  return out;
}

std::vector<std::string> TheTree::successors(const std::string& id) const {
  std::vector<std::string> out;
  for (const EvolutionEdge* e : out_edges(id)) out.push_back(e->target_id);
  return out;
}

bool TheTree::has_edge(const std::string& source_id, const std::string& target_id,
                       RelationKind kind) const {
  auto it = out_idx_.find(source_id);
  if (it == out_idx_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](std::size_t idx) {
    return edges_[idx].target_id == target_id && edges_[idx].kind == kind;
  });
}

ValidationReport TheTree::validate() const {
  ValidationReport report;

  for (const auto& [id, n] : nodes_) {
    if (n.title.empty()) {
      report.push_back({ViolationKind::empty_title, id, "title is empty"});
    }
    if (n.year < kMinYear || n.year > horizon_year_) {
      report.push_back({ViolationKind::invalid_year, id,
                        "year " + std::to_string(n.year) + " outside [" +
                            std::to_string(kMinYear) + ", " + std::to_string(horizon_year_) + "]"});
    }
    if (n.importance) {
      const ImportanceScore& s = *n.importance;
      double expected = s.gamma * s.graph_score + (1.0 - s.gamma) * s.llm_score;
      if (std::abs(s.combined - expected) > 1e-12) {
        report.push_back({ViolationKind::bad_importance_blend, id,
                          "combined score does not equal the gamma blend"});
      }
    }
  }

  for (const EvolutionEdge& e : edges_) {
    const std::string subject = e.source_id + "->" + e.target_id;
    bool src_ok = nodes_.count(e.source_id) > 0;
    bool dst_ok = nodes_.count(e.target_id) > 0;
    if (!src_ok) {
      report.push_back({ViolationKind::unknown_endpoint, subject,
                        "source '" + e.source_id + "' missing"});
    }
    if (!dst_ok) {
      report.push_back({ViolationKind::unknown_endpoint, subject,
                        "target '" + e.target_id + "' missing"});
    }
    if (src_ok && dst_ok && nodes_.at(e.source_id).year > nodes_.at(e.target_id).year) {
      report.push_back({ViolationKind::achronological_edge, subject,
                        "source year exceeds target year"});
    }
    if (e.kind != RelationKind::cites_plain && !e.attribution_score.has_value()) {
      report.push_back({ViolationKind::missing_attribution, subject,
                        "reasoning edge lacks an attribution score"});
    }
  }

  // Kahn's algorithm over reasoning edges; whatever cannot be peeled lies on a cycle.
  std::map<std::string, int> indeg;
  for (const auto& [id, n] : nodes_) indeg[id] = 0;
  for (const EvolutionEdge& e : edges_) {
    if (e.kind == RelationKind::cites_plain) continue;
    if (nodes_.count(e.source_id) && nodes_.count(e.target_id)) indeg[e.target_id]++;
  }
  std::deque<std::string> ready;
  for (const auto& [id, d] : indeg) {
    if (d == 0) ready.push_back(id);
  }
  std::size_t peeled = 0;
  while (!ready.empty()) {
    std::string cur = ready.front();
    ready.pop_front();
    peeled++;
    auto it = out_idx_.find(cur);
    if (it == out_idx_.end()) continue;
    for (std::size_t idx : it->second) {
      const EvolutionEdge& e = edges_[idx];
      if (e.kind == RelationKind::cites_plain || !nodes_.count(e.target_id)) continue;
      if (--indeg[e.target_id] == 0) ready.push_back(e.target_id);
    }
  }
  if (peeled < indeg.size()) {
    std::ostringstream members;
    for (const auto& [id, d] : indeg) {
      if (d > 0) members << id << ' ';
    }
    report.push_back({ViolationKind::cycle, members.str(),
                      "reasoning edges contain a directed cycle"});
  }

  return report;
}

bool TheTree::operator==(const TheTree& other) const {
  if (topic_ != other.topic_ || nodes_ != other.nodes_) return false;
  auto sorted = [](const std::vector<EvolutionEdge>& edges) {
    std::vector<EvolutionEdge> out = edges;
    std::sort(out.begin(), out.end(), [](const EvolutionEdge& a, const EvolutionEdge& b) {
      return std::tie(a.source_id, a.target_id, a.kind) < std::tie(b.source_id, b.target_id, b.kind);
    });
    return out;
  };
  return sorted(edges_) == sorted(other.edges_);
}

}  // namespace evotree
