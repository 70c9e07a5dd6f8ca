#pragma once

#include <string>

#include "evotree/tree.hpp"

namespace evotree {

/// Tree file format. Top level:
///   {topic, nodes:[{id,title,abstract,authors,venue,year,importance}], edges:[...]}
/// importance is {graph,llm,gamma,combined} or null; edges carry
/// {source,target,kind,nli,attribution,evidence:[{doc,passage,index}]}.
/// Output is UTF-8 with nodes sorted by id and edges by (source,target,kind),
/// so equal trees serialize to equal bytes.
std::string serialize(const TheTree& tree, int indent = 2);

/// Parses a tree document. Structural problems (missing keys, wrong types,
/// unknown enum values) raise SchemaViolationError with the JSON path of the
/// offending field. Semantic invariants are NOT enforced here; run
/// TheTree::validate() on the result to triage ingested data.
TheTree deserialize(const std::string& document);

void save_tree(const TheTree& tree, const std::string& path);
TheTree load_tree(const std::string& path);

/// Graphviz export used by the CLI for figures.
std::string to_dot(const TheTree& tree);

}  // namespace evotree
