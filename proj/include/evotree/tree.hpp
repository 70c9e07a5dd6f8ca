#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "evotree/types.hpp"

namespace evotree {

enum class ViolationKind {
  duplicate_id,
  invalid_year,
  empty_title,
  unknown_endpoint,
  achronological_edge,
  cycle,
  missing_attribution,
  bad_importance_blend,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string subject;  // node id, edge "source->target", or cycle members
  std::string detail;
};

using ValidationReport = std::vector<Violation>;

/// A topic-scoped temporal DAG of papers. Mutation is confined to a
/// single-writer construction phase; once built, any number of readers may
/// access a tree concurrently.
///
/// add_node/add_edge enforce the invariants (unique ids, year bounds,
/// chronology, acyclicity over reasoning edges, attribution presence).
/// The *_unchecked variants skip them so deserialized or legacy data can be
/// loaded verbatim and triaged through validate().
class TheTree {
 public:
  explicit TheTree(std::string topic = "", int horizon_year = kDefaultHorizonYear)
      : topic_(std::move(topic)), horizon_year_(horizon_year) {}

  const std::string& topic() const { return topic_; }
  void set_topic(std::string topic) { topic_ = std::move(topic); }
  int horizon_year() const { return horizon_year_; }

  /// Throws DuplicateIdError, InvalidYearError, EmptyTitleError.
  const std::string& add_node(PaperNode node);

  /// Throws UnknownEndpointError, AchronologicalEdgeError, CycleIntroducedError,
  /// MissingAttributionError. Returns the index of the stored edge.
  std::size_t add_edge(EvolutionEdge edge);

  void add_node_unchecked(PaperNode node);
  void add_edge_unchecked(EvolutionEdge edge);

  bool has_node(const std::string& id) const { return nodes_.count(id) > 0; }
  const PaperNode& node(const std::string& id) const;
  PaperNode& mutable_node(const std::string& id);

  const std::map<std::string, PaperNode>& nodes() const { return nodes_; }
  const std::vector<EvolutionEdge>& edges() const { return edges_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::vector<const EvolutionEdge*> in_edges(const std::string& id) const;
  std::vector<const EvolutionEdge*> out_edges(const std::string& id) const;

  /// Source ids of all edges pointing into `id`, in edge insertion order.
  std::vector<std::string> predecessors(const std::string& id) const;
  std::vector<std::string> successors(const std::string& id) const;

  bool has_edge(const std::string& source_id, const std::string& target_id,
                RelationKind kind) const;

  /// Lists every invariant violation; an empty report means the tree is valid.
  ValidationReport validate() const;

  bool operator==(const TheTree& other) const;

 private:
  void check_edge(const EvolutionEdge& edge) const;
  bool reasoning_path_exists(const std::string& from, const std::string& to) const;

  std::string topic_;
  int horizon_year_ = kDefaultHorizonYear;
  std::map<std::string, PaperNode> nodes_;
  std::vector<EvolutionEdge> edges_;
  std::map<std::string, std::vector<std::size_t>> out_idx_;
  std::map<std::string, std::vector<std::size_t>> in_idx_;
};

}  // namespace evotree
