#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evotree/corpus.hpp"
#include "evotree/oracle.hpp"
#include "evotree/types.hpp"

namespace evotree {

inline constexpr double kDefaultAlpha = 0.7;
inline constexpr double kDefaultAttrThreshold = 0.6;
inline constexpr int kDefaultRetrieveK = 3;

struct RanliConfig {
  double alpha = kDefaultAlpha;
  double attr_threshold = kDefaultAttrThreshold;
  int retrieve_k = kDefaultRetrieveK;
  /// When true the LLM verifier runs for every label and the blend formula
  /// applies uniformly; default skips it on entailment (score = probability)
  /// and on contradiction (hard reject at 0).
  bool strict_blend = false;
};

struct AttributionResult {
  NliVerdict nli;
  std::optional<double> llm_score;  // present only when the verifier ran
  double alpha = kDefaultAlpha;
  double r_attr = 0.0;
  std::vector<Evidence> passages;
  bool accepted = false;
};

/// Outcome of checking the citation markers inside a statement. Statements
/// cite corpus documents with inline "[cite:doc_id]" markers.
struct CitationCheck {
  bool exists = false;                    // >= 1 marker and all resolve
  std::vector<std::string> cited_ids;     // resolved ids, in order
  std::vector<std::string> diagnostics;   // malformed / unresolved markers

  explicit operator bool() const { return exists; }
};

CitationCheck citation_exists(const std::string& statement,
                              const Corpus& corpus);

struct ScoredPassage {
  Evidence evidence;
  double score = 0.0;
};

/// Top-k passages of one document by similarity to the claim, descending;
/// equal scores order by ascending passage index.
std::vector<ScoredPassage> retrieve_passages(const std::string& claim,
                                             const Document& document, int k,
                                             Oracle& oracle);

/// R_attr for a proposed parent -> child link given already-retrieved
/// evidence. The concatenated passages act as NLI premise, the child
/// statement as hypothesis; neutral verdicts fall through to the LLM
/// verifier and blend r_attr = alpha * nli + (1 - alpha) * llm.
AttributionResult attribution_score(const std::string& parent_statement,
                                    const std::string& child_statement,
                                    const std::vector<ScoredPassage>& evidence,
                                    double alpha, Oracle& oracle,
                                    double attr_threshold = kDefaultAttrThreshold,
                                    bool strict_blend = false);

/// Full pipeline: resolve the child's supporting documents, retrieve evidence
/// across them, then score. MissingCitationError when no document resolves.
AttributionResult verify_link(const PaperNode& parent,
                              const std::string& child_statement,
                              const std::vector<std::string>& supporting_docs,
                              const Corpus& corpus, const RanliConfig& config,
                              Oracle& oracle);

// --- fact-verification batches ---------------------------------------------

struct FactClaim {
  std::string claim;
  std::string doc_id;
  std::optional<std::string> evidence;  // bypasses retrieval when present
};

struct FactResult {
  FactClaim input;
  std::optional<NliVerdict> nli;  // absent when the document is missing
  double r_attr = 0.0;
  bool accepted = false;
  bool missing = false;  // doc_id did not resolve in the corpus
};

struct FactBatchReport {
  std::vector<FactResult> results;
  double missing_rate = 0.0;  // |missing| / |claims|
};

/// Verifies each claim against its cited document; every claim is counted
/// exactly once. An empty batch yields an empty report with rate 0.
FactBatchReport verify_facts(const std::vector<FactClaim>& claims,
                             const Corpus& corpus, const RanliConfig& config,
                             Oracle& oracle);

/// JSONL bridges for the batch file format: input lines carry
/// {claim, doc_id, evidence?}; output lines add {nli, r_attr, accepted,
/// missing}.
std::vector<FactClaim> parse_fact_claims(const std::string& jsonl);
std::string fact_report_to_jsonl(const FactBatchReport& report);

}  // namespace evotree
