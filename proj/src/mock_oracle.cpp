#include <algorithm>
#include <cctype>
#include <cstdint>
#include <set>
#include <utility>

#include "evotree/oracle.hpp"

namespace evotree {
namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::set<std::string> tokens(const std::string& text) {
  std::set<std::string> out;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      out.insert(current);
      current.clear();
    }
  }
  if (!current.empty()) out.insert(current);
  return out;
}

}  // namespace

MockOracle::MockOracle(std::uint64_t seed) : seed_(seed) {}

void MockOracle::set_priority(const std::string& node_summary, double value) {
  priority_fixture_[node_summary] = value;
}

void MockOracle::set_importance(const std::string& paper_id, double value) {
  importance_fixture_[paper_id] = value;
}

void MockOracle::set_continuation(const std::string& tail_id,
                                  const std::string& candidate_id,
                                  double value) {
  continuation_fixture_[{tail_id, candidate_id}] = value;
}

void MockOracle::set_similarity(const std::string& text_a,
                                const std::string& text_b, double value) {
  // Stored canonically ordered; the base class dispatches ordered pairs.
  similarity_fixture_[std::minmax(text_a, text_b)] = value;
}

void MockOracle::set_nli(const std::string& premise,
                         const std::string& hypothesis, NliVerdict verdict) {
  nli_fixture_[{premise, hypothesis}] = verdict;
}

void MockOracle::set_verification(const std::string& claim,
                                  const std::string& evidence,
                                  LlmVerification result) {
  verify_fixture_[{claim, evidence}] = result;
}

void MockOracle::set_proposals(std::vector<std::string> statements) {
  proposal_pool_ = std::move(statements);
}

void MockOracle::set_summary(const std::string& text,
                             const std::string& summary) {
  summary_fixture_[text] = summary;
}

void MockOracle::set_concepts(const std::string& paragraph,
                              std::vector<std::string> concepts) {
  concept_fixture_[paragraph] = std::move(concepts);
}

double MockOracle::jaccard(const std::string& text_a, const std::string& text_b) {
  std::set<std::string> a = tokens(text_a);
  std::set<std::string> b = tokens(text_b);
  if (a.empty() && b.empty()) return text_a == text_b ? 1.0 : 0.0;
  std::size_t common = 0;
  for (const std::string& t : a) common += b.count(t);
  std::size_t total = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(total);
}

double MockOracle::hashed_unit(const std::string& op,
                               const std::string& material) const {
  std::uint64_t h = splitmix64(seed_ ^ fnv1a(op + '\x1f' + material));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double MockOracle::do_priority(const std::string& node_summary,
                               const std::string& topic) {
  auto it = priority_fixture_.find(node_summary);
  if (it != priority_fixture_.end()) return it->second;
  return hashed_unit("priority", node_summary + '\x1f' + topic);
}

double MockOracle::do_importance(const PaperNode& paper,
                                 const std::string& topic) {
  auto it = importance_fixture_.find(paper.id);
  if (it != importance_fixture_.end()) return it->second;
  return hashed_unit("importance", node_statement(paper) + '\x1f' + topic);
}

double MockOracle::do_continuation(const std::vector<PaperNode>& path,
                                   const PaperNode& candidate) {
  auto it = continuation_fixture_.find({path.back().id, candidate.id});
  if (it != continuation_fixture_.end()) return it->second;
  return hashed_unit("continuation", node_statement(path.back()) + '\x1f' +
                                         node_statement(candidate));
}

double MockOracle::do_similarity(const std::string& text_a,
                                 const std::string& text_b) {
  auto it = similarity_fixture_.find({text_a, text_b});
  if (it != similarity_fixture_.end()) return it->second;
  return jaccard(text_a, text_b);
}

NliVerdict MockOracle::do_nli(const std::string& premise,
                              const std::string& hypothesis) {
  auto it = nli_fixture_.find({premise, hypothesis});
  if (it != nli_fixture_.end()) return it->second;
  if (premise == hypothesis) return {NliLabel::entailment, 1.0};
  std::set<std::string> p = tokens(premise);
  std::set<std::string> h = tokens(hypothesis);
  bool subset = !h.empty() &&
                std::all_of(h.begin(), h.end(),
                            [&](const std::string& t) { return p.count(t); });
  if (subset) return {NliLabel::entailment, 0.9};
  return {NliLabel::neutral, 0.5};
}

LlmVerification MockOracle::do_verify(const std::string& claim,
                                      const std::string& evidence,
                                      const std::string& /*context*/) {
  auto it = verify_fixture_.find({claim, evidence});
  if (it != verify_fixture_.end()) return it->second;
  double score = jaccard(claim, evidence);
  VerificationKind kind = score >= 0.9   ? VerificationKind::direct_citation
                          : score >= 0.3 ? VerificationKind::paraphrase
                                         : VerificationKind::no_connection;
  return {score, kind};
}

std::vector<std::string> MockOracle::do_propose(const std::string& context,
                                                const std::string& /*topic*/,
                                                int k) {
  // Rank the configured pool by overlap with the context; ties break
  // lexicographically so proposals are stable across runs.
  std::vector<std::pair<double, std::string>> ranked;
  ranked.reserve(proposal_pool_.size());
  for (const std::string& statement : proposal_pool_) {
    ranked.emplace_back(jaccard(context, statement), statement);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (const auto& [score, statement] : ranked) {
    if (out.size() == static_cast<std::size_t>(k)) break;
    out.push_back(statement);
  }
  return out;
}

std::string MockOracle::do_summarize(const std::string& text) {
  auto it = summary_fixture_.find(text);
  if (it != summary_fixture_.end()) return it->second;
  return text;
}

std::vector<std::string> MockOracle::do_concepts(const std::string& paragraph) {
  auto it = concept_fixture_.find(paragraph);
  if (it != concept_fixture_.end()) return it->second;
  return {paragraph};
}

}  // namespace evotree
