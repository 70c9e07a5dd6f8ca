#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "evotree/types.hpp"

namespace evotree {

/// Outcome of an NLI classification: the chosen label plus the model's
/// confidence in that label (not a full distribution).
struct NliVerdict {
  NliLabel label = NliLabel::neutral;
  double probability = 0.0;

  bool operator==(const NliVerdict&) const = default;
};

enum class VerificationKind { direct_citation, paraphrase, no_connection };

std::string to_string(VerificationKind kind);
VerificationKind verification_kind_from_string(const std::string& text);

struct LlmVerification {
  double score = 0.0;
  VerificationKind kind = VerificationKind::no_connection;

  bool operator==(const LlmVerification&) const = default;
};

enum class OracleBackend { mock, remote };

inline constexpr int kDefaultOracleTimeoutMs = 10000;

struct OracleConfig {
  OracleBackend backend = OracleBackend::mock;
  std::string endpoint;          // required when backend == remote
  int timeout_ms = kDefaultOracleTimeoutMs;
  std::uint64_t seed = 0;        // drives mock determinism
  std::size_t call_budget = 0;   // backend calls allowed; 0 = unlimited
};

/// Reads EVOTREE_ORACLE_URL / EVOTREE_ORACLE_TIMEOUT_MS into `config`.
/// Explicitly-set fields win over the environment.
OracleConfig apply_oracle_env(OracleConfig config);

/// Boundary for every semantic judgment the pipeline needs. Concrete
/// backends implement the do_* hooks; the public methods add, uniformly:
///   - precondition checks on inputs,
///   - per-operation memoization (thread-safe), so a nondeterministic
///     backend is pinned to one answer per (op, inputs) per run,
///   - a call budget counted on cache misses (BudgetExceededError),
///   - range validation of scores (MalformedResponseError, never clamped).
/// similarity() is symmetric by construction (arguments are canonically
/// ordered before dispatch) and similarity(a, a) == 1.0 without a call.
class Oracle {
 public:
  virtual ~Oracle() = default;

  /// How promising a node looks for the topic; guides tree search.
  double priority(const std::string& node_summary, const std::string& topic);

  /// Judged scientific importance of a paper for the topic.
  double importance_judgment(const PaperNode& paper, const std::string& topic);

  /// How plausibly `candidate` continues the development path.
  double continuation_score(const std::vector<PaperNode>& path,
                            const PaperNode& candidate);

  /// Semantic similarity in [0,1]; symmetric, similarity(a,a)=1.
  double similarity(const std::string& text_a, const std::string& text_b);

  /// Does the premise entail / contradict / leave undetermined the hypothesis?
  NliVerdict nli_classify(const std::string& premise,
                          const std::string& hypothesis);

  /// Second-stage verifier for ambiguous attributions.
  LlmVerification llm_verify(const std::string& claim,
                             const std::string& evidence,
                             const std::string& context);

  /// Generative ops used by node expansion and ingestion.
  std::vector<std::string> propose_candidates(const std::string& context,
                                              const std::string& topic, int k);
  std::string summarize(const std::string& text);
  std::vector<std::string> extract_concepts(const std::string& paragraph);

  /// Backend calls actually made (cache misses). Cache hits are free.
  std::size_t calls_made() const;
  /// 0 disables the budget.
  void set_call_budget(std::size_t budget);

 protected:
  virtual double do_priority(const std::string& node_summary,
                             const std::string& topic) = 0;
  virtual double do_importance(const PaperNode& paper,
                               const std::string& topic) = 0;
  virtual double do_continuation(const std::vector<PaperNode>& path,
                                 const PaperNode& candidate) = 0;
  virtual double do_similarity(const std::string& text_a,
                               const std::string& text_b) = 0;
  virtual NliVerdict do_nli(const std::string& premise,
                            const std::string& hypothesis) = 0;
  virtual LlmVerification do_verify(const std::string& claim,
                                    const std::string& evidence,
                                    const std::string& context) = 0;
  virtual std::vector<std::string> do_propose(const std::string& context,
                                              const std::string& topic,
                                              int k) = 0;
  virtual std::string do_summarize(const std::string& text) = 0;
  virtual std::vector<std::string> do_concepts(const std::string& paragraph) = 0;

 private:
  template <typename T, typename Fn>
  T cached(std::map<std::string, T>& cache, std::string key, Fn&& miss);
  void charge_budget_locked();
  static double checked_score(double value, const char* op);

  mutable std::mutex mu_;
  std::map<std::string, double> score_cache_;
  std::map<std::string, NliVerdict> nli_cache_;
  std::map<std::string, LlmVerification> verify_cache_;
  std::map<std::string, std::vector<std::string>> list_cache_;
  std::map<std::string, std::string> text_cache_;
  std::size_t calls_made_ = 0;
  std::size_t call_budget_ = 0;
};

/// Deterministic in-process backend. Resolution order per op:
/// scripted fixture (exact-match table) first, then a seeded-hash or
/// token-overlap fallback, so tests can script exact scenarios while
/// unscripted inputs still get stable pseudo-random answers.
///
/// Fallbacks: similarity = token Jaccard; nli = entailment(1.0) on equal
/// texts, entailment(0.9) when hypothesis tokens are a subset of premise
/// tokens, else neutral(0.5); propose ranks a configured statement pool by
/// similarity to the context; scores hash (seed, op, inputs) into [0,1).
///
/// Configure fixtures before handing the oracle to the pipeline; fixture
/// tables are not synchronized against concurrent mutation.
class MockOracle final : public Oracle {
 public:
  explicit MockOracle(std::uint64_t seed = 0);

  void set_priority(const std::string& node_summary, double value);
  void set_importance(const std::string& paper_id, double value);
  void set_continuation(const std::string& tail_id,
                        const std::string& candidate_id, double value);
  void set_similarity(const std::string& text_a, const std::string& text_b,
                      double value);
  void set_nli(const std::string& premise, const std::string& hypothesis,
               NliVerdict verdict);
  void set_verification(const std::string& claim, const std::string& evidence,
                        LlmVerification result);
  void set_proposals(std::vector<std::string> statements);
  void set_summary(const std::string& text, const std::string& summary);
  void set_concepts(const std::string& paragraph,
                    std::vector<std::string> concepts);

  /// Token-set Jaccard similarity; exposed for oracle-independent checks.
  static double jaccard(const std::string& text_a, const std::string& text_b);

 protected:
  double do_priority(const std::string&, const std::string&) override;
  double do_importance(const PaperNode&, const std::string&) override;
  double do_continuation(const std::vector<PaperNode>&,
                         const PaperNode&) override;
  double do_similarity(const std::string&, const std::string&) override;
  NliVerdict do_nli(const std::string&, const std::string&) override;
  LlmVerification do_verify(const std::string&, const std::string&,
                            const std::string&) override;
  std::vector<std::string> do_propose(const std::string&, const std::string&,
                                      int) override;
  std::string do_summarize(const std::string&) override;
  std::vector<std::string> do_concepts(const std::string&) override;

 private:
  double hashed_unit(const std::string& op, const std::string& material) const;

  std::uint64_t seed_;
  std::map<std::string, double> priority_fixture_;
  std::map<std::string, double> importance_fixture_;
  std::map<std::pair<std::string, std::string>, double> continuation_fixture_;
  std::map<std::pair<std::string, std::string>, double> similarity_fixture_;
  std::map<std::pair<std::string, std::string>, NliVerdict> nli_fixture_;
  std::map<std::pair<std::string, std::string>, LlmVerification>
      verify_fixture_;
  std::vector<std::string> proposal_pool_;
  std::map<std::string, std::string> summary_fixture_;
  std::map<std::string, std::vector<std::string>> concept_fixture_;
};

/// HTTP JSON client. One POST per backend call:
///   {"op": "...", "inputs": {...}}  ->  op-specific payload.
/// Network failures and timeouts raise OracleUnavailableError; responses
/// that parse but violate the contract raise MalformedResponseError.
class RemoteOracle final : public Oracle {
 public:
  explicit RemoteOracle(OracleConfig config);
  ~RemoteOracle() override;

 protected:
  double do_priority(const std::string&, const std::string&) override;
  double do_importance(const PaperNode&, const std::string&) override;
  double do_continuation(const std::vector<PaperNode>&,
                         const PaperNode&) override;
  double do_similarity(const std::string&, const std::string&) override;
  NliVerdict do_nli(const std::string&, const std::string&) override;
  LlmVerification do_verify(const std::string&, const std::string&,
                            const std::string&) override;
  std::vector<std::string> do_propose(const std::string&, const std::string&,
                                      int) override;
  std::string do_summarize(const std::string&) override;
  std::vector<std::string> do_concepts(const std::string&) override;

 private:
  struct Impl;
  std::string post(const std::string& op, const std::string& inputs_json);
  std::unique_ptr<Impl> impl_;
};

/// Builds the backend named by `config`; validates config invariants
/// (remote requires an endpoint) and applies the call budget.
std::unique_ptr<Oracle> make_oracle(const OracleConfig& config);

}  // namespace evotree
