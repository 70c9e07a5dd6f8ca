#include "evotree/oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "evotree/errors.hpp"

namespace evotree {
namespace {

constexpr char kSep = '\x1f';

void require_nonempty(const std::string& value, const char* what) {
  if (value.empty()) {
    throw std::invalid_argument(std::string(what) + " must be non-empty");
  }
}

std::string statements_key(const std::vector<PaperNode>& path) {
  std::ostringstream out;
  for (const PaperNode& node : path) {
    out << node_statement(node) << kSep;
  }
  return out.str();
}

}  // namespace

std::string to_string(VerificationKind kind) {
  switch (kind) {
    case VerificationKind::direct_citation:
      return "direct_citation";
    case VerificationKind::paraphrase:
      return "paraphrase";
    case VerificationKind::no_connection:
      return "no_connection";
  }
  throw std::logic_error("unreachable verification kind");
}

VerificationKind verification_kind_from_string(const std::string& text) {
  if (text == "direct_citation") return VerificationKind::direct_citation;
  if (text == "paraphrase") return VerificationKind::paraphrase;
  if (text == "no_connection") return VerificationKind::no_connection;
  throw MalformedResponseError("unknown verification kind: " + text);
}

OracleConfig apply_oracle_env(OracleConfig config) {
  if (config.endpoint.empty()) {
    if (const char* url = std::getenv("EVOTREE_ORACLE_URL")) {
      config.endpoint = url;
    }
  }
  if (config.timeout_ms == kDefaultOracleTimeoutMs) {
    if (const char* ms = std::getenv("EVOTREE_ORACLE_TIMEOUT_MS")) {
      try {
        config.timeout_ms = std::stoi(ms);
      } catch (const std::exception&) {
        throw std::invalid_argument(
            "EVOTREE_ORACLE_TIMEOUT_MS is not an integer: " + std::string(ms));
      }
    }
  }
  return config;
}

template <typename T, typename Fn>
T Oracle::cached(std::map<std::string, T>& cache, std::string key, Fn&& miss) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    charge_budget_locked();
  }
  T value = miss();
  std::lock_guard<std::mutex> lock(mu_);
  // First writer wins so racing callers observe one pinned answer.
  auto [it, inserted] = cache.emplace(std::move(key), std::move(value));
  return it->second;
}

void Oracle::charge_budget_locked() {
  if (call_budget_ != 0 && calls_made_ >= call_budget_) {
    throw BudgetExceededError("oracle call budget of " +
                              std::to_string(call_budget_) + " exhausted");
  }
  ++calls_made_;
}

double Oracle::checked_score(double value, const char* op) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw MalformedResponseError(std::string(op) + " returned score " +
                                 std::to_string(value) + " outside [0,1]");
  }
  return value;
}

double Oracle::priority(const std::string& node_summary,
                        const std::string& topic) {
  require_nonempty(node_summary, "node_summary");
  require_nonempty(topic, "topic");
  std::string key = "priority" + std::string(1, kSep) + node_summary + kSep +
                    topic;
  return cached(score_cache_, std::move(key), [&] {
    return checked_score(do_priority(node_summary, topic), "priority");
  });
}

double Oracle::importance_judgment(const PaperNode& paper,
                                   const std::string& topic) {
  require_nonempty(paper.title, "paper.title");
  require_nonempty(topic, "topic");
  std::string key = "importance" + std::string(1, kSep) +
                    node_statement(paper) + kSep + topic;
  return cached(score_cache_, std::move(key), [&] {
    return checked_score(do_importance(paper, topic), "importance_judgment");
  });
}

double Oracle::continuation_score(const std::vector<PaperNode>& path,
                                  const PaperNode& candidate) {
  if (path.empty()) {
    throw std::invalid_argument("continuation_score requires a non-empty path");
  }
  std::string key = "continuation" + std::string(1, kSep) +
                    statements_key(path) + kSep + node_statement(candidate);
  return cached(score_cache_, std::move(key), [&] {
    return checked_score(do_continuation(path, candidate),
                         "continuation_score");
  });
}

double Oracle::similarity(const std::string& text_a, const std::string& text_b) {
  require_nonempty(text_a, "text_a");
  require_nonempty(text_b, "text_b");
  if (text_a == text_b) return 1.0;
  const std::string& lo = text_a < text_b ? text_a : text_b;
  const std::string& hi = text_a < text_b ? text_b : text_a;
  std::string key = "similarity" + std::string(1, kSep) + lo + kSep + hi;
  return cached(score_cache_, std::move(key), [&] {
    return checked_score(do_similarity(lo, hi), "similarity");
  });
}

NliVerdict Oracle::nli_classify(const std::string& premise,
                                const std::string& hypothesis) {
  require_nonempty(premise, "premise");
  require_nonempty(hypothesis, "hypothesis");
  std::string key = "nli" + std::string(1, kSep) + premise + kSep + hypothesis;
  return cached(nli_cache_, std::move(key), [&] {
    NliVerdict verdict = do_nli(premise, hypothesis);
    checked_score(verdict.probability, "nli_classify");
    return verdict;
  });
}

LlmVerification Oracle::llm_verify(const std::string& claim,
                                   const std::string& evidence,
                                   const std::string& context) {
  require_nonempty(claim, "claim");
  require_nonempty(evidence, "evidence");
  std::string key =
      "verify" + std::string(1, kSep) + claim + kSep + evidence + kSep + context;
  return cached(verify_cache_, std::move(key), [&] {
    LlmVerification result = do_verify(claim, evidence, context);
    checked_score(result.score, "llm_verify");
    return result;
  });
}

std::vector<std::string> Oracle::propose_candidates(const std::string& context,
                                                    const std::string& topic,
                                                    int k) {
  require_nonempty(context, "context");
  require_nonempty(topic, "topic");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::string key = "propose" + std::string(1, kSep) + context + kSep + topic +
                    kSep + std::to_string(k);
  return cached(list_cache_, std::move(key), [&] {
    std::vector<std::string> statements = do_propose(context, topic, k);
    if (statements.size() > static_cast<std::size_t>(k)) {
      statements.resize(static_cast<std::size_t>(k));
    }
    return statements;
  });
}

std::string Oracle::summarize(const std::string& text) {
  require_nonempty(text, "text");
  std::string key = "summarize" + std::string(1, kSep) + text;
  return cached(text_cache_, std::move(key), [&] { return do_summarize(text); });
}

std::vector<std::string> Oracle::extract_concepts(const std::string& paragraph) {
  require_nonempty(paragraph, "paragraph");
  std::string key = "concepts" + std::string(1, kSep) + paragraph;
  return cached(list_cache_, std::move(key),
                [&] { return do_concepts(paragraph); });
}

std::size_t Oracle::calls_made() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_made_;
}

void Oracle::set_call_budget(std::size_t budget) {
  std::lock_guard<std::mutex> lock(mu_);
  call_budget_ = budget;
}

std::unique_ptr<Oracle> make_oracle(const OracleConfig& config) {
  std::unique_ptr<Oracle> oracle;
  switch (config.backend) {
    case OracleBackend::mock:
      oracle = std::make_unique<MockOracle>(config.seed);
      break;
    case OracleBackend::remote:
      if (config.endpoint.empty()) {
        throw std::invalid_argument(
            "remote oracle backend requires an endpoint "
            "(set --oracle or EVOTREE_ORACLE_URL)");
      }
      oracle = std::make_unique<RemoteOracle>(config);
      break;
  }
  oracle->set_call_budget(config.call_budget);
  return oracle;
}

}  // namespace evotree
