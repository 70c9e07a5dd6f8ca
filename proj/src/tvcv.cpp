#include "evotree/tvcv.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "evotree/errors.hpp"

namespace evotree {

namespace {

void require_status(const Candidate& candidate, CandidateStatus expected,
                    const char* op) {
  if (candidate.status != expected) {
    throw std::invalid_argument(std::string(op) + " requires a " +
                                to_string(expected) + " candidate, got " +
                                to_string(candidate.status));
  }
}

std::string document_text(const Document& doc) {
  std::string joined;
  for (const std::string& passage : doc.passages) {
    if (!joined.empty()) joined += ' ';
    joined += passage;
  }
  return joined;
}

std::string truncate_at_word(const std::string& text, int max_chars) {
  if (static_cast<int>(text.size()) <= max_chars) return text;
  std::string cut = text.substr(0, static_cast<std::size_t>(max_chars));
  std::size_t space = cut.find_last_of(" \t\n");
  if (space != std::string::npos && space > 0) cut.resize(space);
  while (!cut.empty() && (cut.back() == ' ' || cut.back() == '\t' ||
                          cut.back() == '\n')) {
    cut.pop_back();
  }
  return cut;
}

}  // namespace

const char* to_string(CandidateStatus status) {
  switch (status) {
    case CandidateStatus::thought: return "thought";
    case CandidateStatus::verbalized: return "verbalized";
    case CandidateStatus::cited: return "cited";
    case CandidateStatus::verified: return "verified";
    case CandidateStatus::rejected: return "rejected";
  }
  return "unknown";
}

std::vector<Candidate> think(const std::vector<PaperNode>& path,
                             const std::string& topic, Oracle& oracle, int k) {
  if (path.empty()) throw std::invalid_argument("think: path is empty");
  if (k < 1) throw std::invalid_argument("think: k must be >= 1");
  std::string context;
  for (const PaperNode& node : path) {
    if (!context.empty()) context += '\n';
    context += node_statement(node);
  }
  std::vector<std::string> statements =
      oracle.propose_candidates(context, topic, k);
  std::vector<Candidate> candidates;
  for (std::string& statement : statements) {
    if (statement.empty()) continue;
    Candidate candidate;
    candidate.statement = std::move(statement);
    candidates.push_back(std::move(candidate));
    if (static_cast<int>(candidates.size()) == k) break;
  }
  if (candidates.empty()) {
    throw NoCandidatesError("oracle proposed no candidates for topic " + topic);
  }
  return candidates;
}

Candidate verbalize(Candidate candidate, Oracle& oracle, int max_chars) {
  require_status(candidate, CandidateStatus::thought, "verbalize");
  if (max_chars < 1) {
    throw std::invalid_argument("verbalize: max_chars must be >= 1");
  }
  candidate.statement =
      truncate_at_word(oracle.summarize(candidate.statement), max_chars);
  candidate.status = CandidateStatus::verbalized;
  return candidate;
}

Candidate cite(Candidate candidate, const Corpus& corpus, Oracle& oracle,
               double theta_cite, int top_n) {
  require_status(candidate, CandidateStatus::verbalized, "cite");
  if (top_n < 1) throw std::invalid_argument("cite: top_n must be >= 1");

  std::vector<std::string> doc_ids;
  for (const auto& [id, paper] : corpus.papers) doc_ids.push_back(id);
  for (const SurveyDoc& survey : corpus.surveys) doc_ids.push_back(survey.id);
  std::sort(doc_ids.begin(), doc_ids.end());

  std::vector<std::pair<double, std::string>> hits;  // (score, doc id)
  for (const std::string& id : doc_ids) {
    double score = oracle.similarity(candidate.statement,
                                     document_text(corpus.document(id)));
    if (score >= theta_cite) hits.emplace_back(score, id);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (static_cast<int>(hits.size()) > top_n) hits.resize(top_n);

  candidate.supporting_docs.clear();
  candidate.proposed_paper.reset();
  for (const auto& [score, id] : hits) {
    candidate.supporting_docs.push_back(id);
    if (!candidate.proposed_paper) {
      auto paper = corpus.papers.find(id);
      if (paper != corpus.papers.end()) candidate.proposed_paper = paper->second;
    }
  }
  if (hits.empty()) {
    throw NoSupportFoundError("no document reached theta_cite=" +
                              std::to_string(theta_cite) + " for: " +
                              candidate.statement);
  }
  if (!candidate.proposed_paper) {
    throw NoSupportFoundError(
        "supporting documents contain no paper node to ground: " +
        candidate.statement);
  }
  candidate.status = CandidateStatus::cited;
  return candidate;
}

Candidate verify(Candidate candidate, const PaperNode& parent,
                 const Corpus& corpus, const RanliConfig& config,
                 Oracle& oracle) {
  require_status(candidate, CandidateStatus::cited, "verify");
  AttributionResult attribution =
      verify_link(parent, candidate.statement, candidate.supporting_docs,
                  corpus, config, oracle);
  candidate.attribution = attribution;
  bool chronological = candidate.proposed_paper &&
                       candidate.proposed_paper->year >= parent.year;
  if (!attribution.accepted) {
    candidate.status = CandidateStatus::rejected;
    candidate.rejection_reason =
        "attribution: r_attr=" + std::to_string(attribution.r_attr) +
        " label=" + to_string(attribution.nli.label);
  } else if (!chronological) {
    candidate.status = CandidateStatus::rejected;
    candidate.rejection_reason =
        "temporal: candidate year precedes parent year " +
        std::to_string(parent.year);
  } else {
    candidate.status = CandidateStatus::verified;
  }
  return candidate;
}

Expansion expand_node(const std::vector<PaperNode>& path,
                      const std::string& topic, const Corpus& corpus,
                      Oracle& oracle, const TvcvConfig& config) {
  if (path.empty()) throw std::invalid_argument("expand_node: path is empty");
  if (config.max_retries < 1) {
    throw std::invalid_argument("expand_node: max_retries must be >= 1");
  }
  const PaperNode& parent = path.back();
  std::vector<Candidate> candidates =
      think(path, topic, oracle, config.max_retries);

  int attempts = 0;
  std::vector<std::string> failures;
  for (Candidate& candidate : candidates) {
    if (attempts == config.max_retries) break;
    ++attempts;
    Candidate cited;
    try {
      cited = cite(verbalize(std::move(candidate), oracle,
                             config.summary_max_chars),
                   corpus, oracle, config.theta_cite, config.top_n_docs);
    } catch (const NoSupportFoundError& e) {
      failures.emplace_back(e.what());
      continue;
    }
    Candidate outcome = verify(std::move(cited), parent, corpus, config.ranli,
                               oracle);
    if (outcome.status == CandidateStatus::verified) {
      Expansion expansion;
      expansion.node = *outcome.proposed_paper;
      expansion.edge.source_id = parent.id;
      expansion.edge.target_id = expansion.node.id;
      expansion.edge.kind = RelationKind::evolves_into;
      expansion.edge.nli_verdict = outcome.attribution->nli.label;
      expansion.edge.attribution_score = outcome.attribution->r_attr;
      expansion.edge.evidence = outcome.attribution->passages;
      expansion.candidate = std::move(outcome);
      expansion.attempts = attempts;
      return expansion;
    }
    failures.push_back(outcome.rejection_reason);
  }
  std::string detail;
  for (const std::string& failure : failures) {
    detail += "\n  - " + failure;
  }
  throw ExpansionExhaustedError("no candidate verified within " +
                                std::to_string(config.max_retries) +
                                " retries" + detail);
}

}  // namespace evotree
