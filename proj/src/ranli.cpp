#include "evotree/ranli.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "evotree/errors.hpp"

namespace evotree {
namespace {

constexpr const char* kMarkerPrefix = "[cite:";

double nli_score_of(const NliVerdict& verdict) {
  switch (verdict.label) {
    case NliLabel::entailment:
      return verdict.probability;
    case NliLabel::contradiction:
      return 0.0;
    case NliLabel::neutral:
      return 0.5;
  }
  throw std::logic_error("unreachable NLI label");
}

std::string joined_passages(const std::vector<ScoredPassage>& evidence) {
  std::string premise;
  for (const ScoredPassage& passage : evidence) {
    if (!premise.empty()) premise += ' ';
    premise += passage.evidence.passage;
  }
  return premise;
}

}  // namespace

CitationCheck citation_exists(const std::string& statement,
                              const Corpus& corpus) {
  CitationCheck check;
  std::size_t pos = 0;
  std::size_t markers = 0;
  bool all_resolve = true;
  while ((pos = statement.find(kMarkerPrefix, pos)) != std::string::npos) {
    std::size_t id_start = pos + std::char_traits<char>::length(kMarkerPrefix);
    std::size_t close = statement.find(']', id_start);
    if (close == std::string::npos) {
      check.diagnostics.push_back("unclosed citation marker at offset " +
                                  std::to_string(pos));
      all_resolve = false;
      break;
    }
    ++markers;
    std::string id = statement.substr(id_start, close - id_start);
    if (id.empty()) {
      check.diagnostics.push_back("empty citation marker at offset " +
                                  std::to_string(pos));
      all_resolve = false;
    } else if (!corpus.has_document(id)) {
      check.diagnostics.push_back("citation to unknown document " + id);
      all_resolve = false;
    } else {
      check.cited_ids.push_back(id);
    }
    pos = close + 1;
  }
  if (markers == 0 && check.diagnostics.empty()) {
    check.diagnostics.push_back("statement carries no citation marker");
  }
  check.exists = markers > 0 && all_resolve;
  return check;
}

std::vector<ScoredPassage> retrieve_passages(const std::string& claim,
                                             const Document& document, int k,
                                             Oracle& oracle) {
  if (document.passages.empty()) {
    throw EmptyDocumentError("document " + document.id + " has no passages");
  }
  if (k < 1) throw std::invalid_argument("retrieve_passages needs k >= 1");
  std::vector<ScoredPassage> scored;
  scored.reserve(document.passages.size());
  for (std::size_t i = 0; i < document.passages.size(); ++i) {
    ScoredPassage entry;
    entry.evidence = {document.id, document.passages[i], static_cast<int>(i)};
    entry.score = oracle.similarity(claim, document.passages[i]);
    scored.push_back(std::move(entry));
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredPassage& a, const ScoredPassage& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.evidence.passage_index < b.evidence.passage_index;
                   });
  if (scored.size() > static_cast<std::size_t>(k)) {
    scored.resize(static_cast<std::size_t>(k));
  }
  return scored;
}

AttributionResult attribution_score(const std::string& parent_statement,
                                    const std::string& child_statement,
                                    const std::vector<ScoredPassage>& evidence,
                                    double alpha, Oracle& oracle,
                                    double attr_threshold, bool strict_blend) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw OutOfRangeError("alpha must lie in [0,1]");
  }
  AttributionResult result;
  result.alpha = alpha;
  for (const ScoredPassage& passage : evidence) {
    result.passages.push_back(passage.evidence);
  }
  std::string premise = joined_passages(evidence);
  if (premise.empty()) premise = parent_statement;
  result.nli = oracle.nli_classify(premise, child_statement);
  double nli_score = nli_score_of(result.nli);
  bool run_verifier = strict_blend || result.nli.label == NliLabel::neutral;
  if (run_verifier) {
    result.llm_score =
        oracle.llm_verify(child_statement, premise, parent_statement).score;
    result.r_attr = alpha * nli_score + (1.0 - alpha) * *result.llm_score;
  } else {
    result.r_attr = nli_score;
  }
  result.accepted = result.r_attr >= attr_threshold &&
                    result.nli.label != NliLabel::contradiction;
  return result;
}

AttributionResult verify_link(const PaperNode& parent,
                              const std::string& child_statement,
                              const std::vector<std::string>& supporting_docs,
                              const Corpus& corpus, const RanliConfig& config,
                              Oracle& oracle) {
  std::vector<std::string> docs = supporting_docs;
  if (docs.empty()) {
    // Statements may embed their citations inline instead.
    CitationCheck check = citation_exists(child_statement, corpus);
    docs = check.cited_ids;
    if (!check.exists && docs.empty()) {
      throw MissingCitationError("link cites no resolvable document: " +
                                 (check.diagnostics.empty()
                                      ? child_statement
                                      : check.diagnostics.front()));
    }
  }
  std::vector<ScoredPassage> pooled;
  bool any_resolved = false;
  for (const std::string& doc_id : docs) {
    if (!corpus.has_document(doc_id)) continue;
    any_resolved = true;
    std::vector<ScoredPassage> passages = retrieve_passages(
        child_statement, corpus.document(doc_id), config.retrieve_k, oracle);
    pooled.insert(pooled.end(), passages.begin(), passages.end());
  }
  if (!any_resolved) {
    throw MissingCitationError("none of the supporting documents resolve");
  }
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const ScoredPassage& a, const ScoredPassage& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.evidence.doc_id != b.evidence.doc_id) {
                       return a.evidence.doc_id < b.evidence.doc_id;
                     }
                     return a.evidence.passage_index < b.evidence.passage_index;
                   });
  if (pooled.size() > static_cast<std::size_t>(config.retrieve_k)) {
    pooled.resize(static_cast<std::size_t>(config.retrieve_k));
  }
  return attribution_score(node_statement(parent), child_statement, pooled,
                           config.alpha, oracle, config.attr_threshold,
                           config.strict_blend);
}

FactBatchReport verify_facts(const std::vector<FactClaim>& claims,
                             const Corpus& corpus, const RanliConfig& config,
                             Oracle& oracle) {
  FactBatchReport report;
  std::size_t missing = 0;
  for (const FactClaim& claim : claims) {
    FactResult result;
    result.input = claim;
    if (!corpus.has_document(claim.doc_id)) {
      result.missing = true;
      ++missing;
      report.results.push_back(std::move(result));
      continue;
    }
    std::vector<ScoredPassage> evidence;
    if (claim.evidence.has_value() && !claim.evidence->empty()) {
      ScoredPassage provided;
      provided.evidence = {claim.doc_id, *claim.evidence, 0};
      provided.score = 1.0;
      evidence.push_back(std::move(provided));
    } else {
      evidence = retrieve_passages(claim.claim, corpus.document(claim.doc_id),
                                   config.retrieve_k, oracle);
    }
    AttributionResult attribution = attribution_score(
        claim.claim, claim.claim, evidence, config.alpha, oracle,
        config.attr_threshold, config.strict_blend);
    result.nli = attribution.nli;
    result.r_attr = attribution.r_attr;
    result.accepted = attribution.accepted;
    report.results.push_back(std::move(result));
  }
  report.missing_rate =
      claims.empty() ? 0.0
                     : static_cast<double>(missing) /
                           static_cast<double>(claims.size());
  return report;
}

std::vector<FactClaim> parse_fact_claims(const std::string& jsonl) {
  std::vector<FactClaim> claims;
  std::istringstream lines(jsonl);
  std::string line;
  int line_number = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    std::string stripped = line;
    stripped.erase(0, stripped.find_first_not_of(" \t\r"));
    if (stripped.empty()) continue;
    std::string path = "line[" + std::to_string(line_number) + "]";
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw SchemaViolationError(path, "not a JSON object");
    }
    FactClaim claim;
    if (!j.contains("claim") || !j["claim"].is_string()) {
      throw SchemaViolationError(path + ".claim", "missing string field");
    }
    claim.claim = j["claim"].get<std::string>();
    if (!j.contains("doc_id") || !j["doc_id"].is_string()) {
      throw SchemaViolationError(path + ".doc_id", "missing string field");
    }
    claim.doc_id = j["doc_id"].get<std::string>();
    if (j.contains("evidence") && !j["evidence"].is_null()) {
      if (!j["evidence"].is_string()) {
        throw SchemaViolationError(path + ".evidence", "expected string");
      }
      claim.evidence = j["evidence"].get<std::string>();
    }
    claims.push_back(std::move(claim));
  }
  return claims;
}

std::string fact_report_to_jsonl(const FactBatchReport& report) {
  std::ostringstream out;
  for (const FactResult& result : report.results) {
    nlohmann::ordered_json j;
    j["claim"] = result.input.claim;
    j["doc_id"] = result.input.doc_id;
    if (result.input.evidence.has_value()) {
      j["evidence"] = *result.input.evidence;
    }
    j["nli"] = result.nli.has_value() ? nlohmann::ordered_json(to_string(
                                            result.nli->label))
                                      : nlohmann::ordered_json(nullptr);
    j["r_attr"] = result.r_attr;
    j["accepted"] = result.accepted;
    j["missing"] = result.missing;
    out << j.dump() << "\n";
  }
  return out.str();
}

}  // namespace evotree
