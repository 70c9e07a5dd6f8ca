#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evotree/corpus.hpp"
#include "evotree/oracle.hpp"
#include "evotree/ranli.hpp"
#include "evotree/types.hpp"

namespace evotree {

inline constexpr double kDefaultThetaCite = 0.5;
inline constexpr int kDefaultTopNDocs = 5;
inline constexpr int kDefaultMaxRetries = 3;
inline constexpr int kDefaultSummaryMaxChars = 512;

/// Candidate lifecycle. Transitions only move forward through
/// thought -> verbalized -> cited -> verified; rejected is terminal and
/// reachable from any live state.
enum class CandidateStatus {
  thought,
  verbalized,
  cited,
  verified,
  rejected,
};

const char* to_string(CandidateStatus status);

struct Candidate {
  std::string statement;
  std::optional<PaperNode> proposed_paper;  // bound during cite
  std::vector<std::string> supporting_docs;
  CandidateStatus status = CandidateStatus::thought;
  /// Why a candidate was rejected; starts with "attribution" or "temporal".
  std::string rejection_reason;
  std::optional<AttributionResult> attribution;  // filled during verify
};

struct TvcvConfig {
  double theta_cite = kDefaultThetaCite;
  int top_n_docs = kDefaultTopNDocs;
  int max_retries = kDefaultMaxRetries;
  int summary_max_chars = kDefaultSummaryMaxChars;
  RanliConfig ranli;
};

/// Propose up to k successor statements for the path tail.
/// Throws NoCandidatesError when the oracle proposes nothing.
std::vector<Candidate> think(const std::vector<PaperNode>& path,
                             const std::string& topic, Oracle& oracle, int k);

/// Condense the statement; summaries longer than max_chars are cut at the
/// last word boundary that fits.
Candidate verbalize(Candidate candidate, Oracle& oracle,
                    int max_chars = kDefaultSummaryMaxChars);

/// Ground the statement in corpus documents scoring >= theta_cite, keeping
/// the top_n by descending similarity (ties by document id). The best-scoring
/// paper document becomes proposed_paper. NoSupportFoundError when nothing
/// clears the threshold or no paper is among the survivors.
Candidate cite(Candidate candidate, const Corpus& corpus, Oracle& oracle,
               double theta_cite = kDefaultThetaCite,
               int top_n = kDefaultTopNDocs);

/// Attribution check against the parent plus the chronology gate
/// (proposed_paper.year >= parent.year). Verified on pass; rejected with a
/// reason otherwise.
Candidate verify(Candidate candidate, const PaperNode& parent,
                 const Corpus& corpus, const RanliConfig& config,
                 Oracle& oracle);

struct Expansion {
  PaperNode node;
  EvolutionEdge edge;       // parent -> node, carries verdict and evidence
  Candidate candidate;      // the verified candidate, for introspection
  int attempts = 0;         // cycles spent, <= max_retries
};

/// One full expansion: propose max_retries candidates, then run each through
/// verbalize/cite/verify until one survives. Rejections (including failed
/// grounding) consume a retry. ExpansionExhaustedError when the budget ends
/// with nothing verified.
Expansion expand_node(const std::vector<PaperNode>& path,
                      const std::string& topic, const Corpus& corpus,
                      Oracle& oracle, const TvcvConfig& config = {});

}  // namespace evotree
