#pragma once

#include <optional>
#include <string>
#include <vector>

namespace evotree {

inline constexpr int kMinYear = 1900;
inline constexpr int kDefaultHorizonYear = 2100;

/// S(v) = gamma * S_graph + (1 - gamma) * S_LLM, all components in [0,1].
struct ImportanceScore {
  double graph_score = 0.0;
  double llm_score = 0.0;
  double gamma = 0.0;
  double combined = 0.0;

  bool operator==(const ImportanceScore&) const = default;
};

/// Builds an ImportanceScore with the blend invariant satisfied by construction.
/// Throws OutOfRangeError if any input is outside [0,1].
ImportanceScore make_importance(double graph_score, double llm_score, double gamma);

struct PaperNode {
  std::string id;
  std::string title;
  std::string abstract;
  std::vector<std::string> authors;
  std::string venue;  // empty when unknown
  int year = 0;
  std::optional<ImportanceScore> importance;

  bool operator==(const PaperNode&) const = default;
};

/// Canonical text used when a node is fed to semantic oracles.
std::string node_statement(const PaperNode& node);

enum class RelationKind {
  evolves_into,
  enables,
  cites_plain,
};

enum class NliLabel {
  entailment,
  contradiction,
  neutral,
};

const char* to_string(RelationKind kind);
const char* to_string(NliLabel label);
RelationKind relation_kind_from_string(const std::string& s);
NliLabel nli_label_from_string(const std::string& s);

/// One supporting passage behind a validated edge.
struct Evidence {
  std::string doc_id;
  std::string passage;
  int passage_index = 0;

  bool operator==(const Evidence&) const = default;
};

struct EvolutionEdge {
  std::string source_id;
  std::string target_id;
  RelationKind kind = RelationKind::evolves_into;
  std::optional<NliLabel> nli_verdict;
  std::optional<double> attribution_score;  // R_attr, required unless cites_plain
  std::vector<Evidence> evidence;

  bool operator==(const EvolutionEdge&) const = default;
};

}  // namespace evotree
