#include "evotree/oracle.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "evotree/errors.hpp"
#include "support/builders.hpp"

namespace evotree {
namespace {

using testsupport::paper;

std::string random_text(std::mt19937_64& rng) {
  static const char* kWords[] = {"graph",  "neural", "search", "proof",
                                 "kernel", "planner", "vision", "memory"};
  std::uniform_int_distribution<int> len(1, 5);
  std::uniform_int_distribution<int> pick(0, 7);
  std::string out;
  int n = len(rng);
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += kWords[pick(rng)];
  }
  return out;
}

TEST(MockOracle, DeterministicForFixedSeed) {
  MockOracle a(42);
  MockOracle b(42);
  double first = a.priority("attention mechanisms", "machine translation");
  EXPECT_EQ(first, a.priority("attention mechanisms", "machine translation"));
  EXPECT_EQ(first, b.priority("attention mechanisms", "machine translation"));
  EXPECT_GE(first, 0.0);
  EXPECT_LT(first, 1.0);
  // A different seed gives a different answer for at least one probe.
  MockOracle c(43);
  bool any_diff = false;
  for (const char* probe : {"x", "y", "z"}) {
    if (a.priority(probe, "t") != c.priority(probe, "t")) any_diff = true;
  }
  EXPECT_TRUE(any_diff);
}

TEST(MockOracle, PriorityFixtureWins) {
  MockOracle oracle(1);
  oracle.set_priority("transformer", 0.9);
  EXPECT_DOUBLE_EQ(oracle.priority("transformer", "nlp"), 0.9);
}

TEST(MockOracle, ImportanceFixtureKeyedByPaperId) {
  MockOracle oracle(1);
  oracle.set_importance("p1", 0.8);
  EXPECT_DOUBLE_EQ(oracle.importance_judgment(paper("p1", 2017), "t"), 0.8);
  double other = oracle.importance_judgment(paper("p2", 2018), "t");
  EXPECT_GE(other, 0.0);
  EXPECT_LE(other, 1.0);
}

TEST(MockOracle, ContinuationFixtureAndEmptyPath) {
  MockOracle oracle(1);
  oracle.set_continuation("a", "b", 1.0);
  oracle.set_continuation("a", "c", 0.0);
  std::vector<PaperNode> path = {paper("a", 2015)};
  EXPECT_DOUBLE_EQ(oracle.continuation_score(path, paper("b", 2016)), 1.0);
  EXPECT_DOUBLE_EQ(oracle.continuation_score(path, paper("c", 2016)), 0.0);
  EXPECT_THROW(oracle.continuation_score({}, paper("b", 2016)),
               std::invalid_argument);
}

TEST(MockOracle, SimilarityJaccard) {
  MockOracle oracle(1);
  EXPECT_DOUBLE_EQ(oracle.similarity("a b c", "a b d"), 0.5);
  EXPECT_DOUBLE_EQ(oracle.similarity("same string", "same string"), 1.0);
}

TEST(MockOracle, SimilaritySymmetricOnRandomPairs) {
  MockOracle oracle(9);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    std::string a = random_text(rng);
    std::string b = random_text(rng);
    EXPECT_DOUBLE_EQ(oracle.similarity(a, b), oracle.similarity(b, a));
    EXPECT_DOUBLE_EQ(oracle.similarity(a, a), 1.0);
  }
}

TEST(MockOracle, NliConventions) {
  MockOracle oracle(1);
  NliVerdict same = oracle.nli_classify("the sky is blue", "the sky is blue");
  EXPECT_EQ(same.label, NliLabel::entailment);
  EXPECT_DOUBLE_EQ(same.probability, 1.0);

  NliVerdict subset =
      oracle.nli_classify("deep nets learn features well", "nets learn");
  EXPECT_EQ(subset.label, NliLabel::entailment);
  EXPECT_DOUBLE_EQ(subset.probability, 0.9);

  NliVerdict other = oracle.nli_classify("apples are red", "cars are fast");
  EXPECT_EQ(other.label, NliLabel::neutral);
  EXPECT_DOUBLE_EQ(other.probability, 0.5);

  oracle.set_nli("it rains", "it does not rain",
                 {NliLabel::contradiction, 0.95});
  NliVerdict fixed = oracle.nli_classify("it rains", "it does not rain");
  EXPECT_EQ(fixed.label, NliLabel::contradiction);
  EXPECT_DOUBLE_EQ(fixed.probability, 0.95);
}

TEST(MockOracle, VerifyFixturesCoverAllKinds) {
  MockOracle oracle(1);
  oracle.set_verification("c1", "e1",
                          {0.95, VerificationKind::direct_citation});
  oracle.set_verification("c2", "e2", {0.6, VerificationKind::paraphrase});
  oracle.set_verification("c3", "e3", {0.05, VerificationKind::no_connection});
  EXPECT_EQ(oracle.llm_verify("c1", "e1", "ctx").kind,
            VerificationKind::direct_citation);
  EXPECT_EQ(oracle.llm_verify("c2", "e2", "ctx").kind,
            VerificationKind::paraphrase);
  EXPECT_EQ(oracle.llm_verify("c3", "e3", "ctx").kind,
            VerificationKind::no_connection);
}

TEST(MockOracle, ProposalsRankedByContextOverlap) {
  MockOracle oracle(1);
  oracle.set_proposals({"graph neural networks", "attention is useful",
                        "graph attention networks"});
  // Jaccard vs context: neural 3/5, attention networks 2/6, attention 0.
  std::vector<std::string> top = oracle.propose_candidates(
      "graph neural networks for molecules", "chemistry", 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0], "graph neural networks");
  EXPECT_EQ(top[1], "graph attention networks");
  // Equal scores fall back to lexicographic order.
  MockOracle tied(1);
  tied.set_proposals({"beta", "alpha"});
  EXPECT_EQ(tied.propose_candidates("unrelated context", "t", 2),
            (std::vector<std::string>{"alpha", "beta"}));
  // k caps the list.
  EXPECT_EQ(oracle
                .propose_candidates("graph neural networks for molecules",
                                    "chemistry", 1)
                .size(),
            1u);
  EXPECT_THROW(oracle.propose_candidates("ctx", "topic", 0),
               std::invalid_argument);
}

TEST(MockOracle, EmptyInputsRejected) {
  MockOracle oracle(1);
  EXPECT_THROW(oracle.priority("", "t"), std::invalid_argument);
  EXPECT_THROW(oracle.priority("s", ""), std::invalid_argument);
  EXPECT_THROW(oracle.similarity("", "x"), std::invalid_argument);
  EXPECT_THROW(oracle.nli_classify("p", ""), std::invalid_argument);
  EXPECT_THROW(oracle.summarize(""), std::invalid_argument);
}

TEST(Oracle, OutOfRangeFixtureSurfacesAsMalformed) {
  MockOracle oracle(1);
  oracle.set_priority("bad", 1.5);
  EXPECT_THROW(oracle.priority("bad", "t"), MalformedResponseError);
}

TEST(Oracle, BudgetCountsMissesNotHits) {
  MockOracle oracle(1);
  oracle.set_call_budget(2);
  oracle.priority("a", "t");
  oracle.priority("a", "t");  // cache hit, free
  oracle.priority("b", "t");
  EXPECT_EQ(oracle.calls_made(), 2u);
  EXPECT_THROW(oracle.priority("c", "t"), BudgetExceededError);
  // Cached answers stay available after exhaustion.
  EXPECT_NO_THROW(oracle.priority("a", "t"));
}

TEST(Oracle, MemoizationIsThreadSafe) {
  MockOracle oracle(5);
  std::vector<double> seen(8);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&oracle, &seen, i] {
      for (int j = 0; j < 50; ++j) {
        seen[i] = oracle.similarity("alpha beta", "beta gamma");
      }
    });
  }
  for (auto& t : threads) t.join();
  for (int i = 1; i < 8; ++i) EXPECT_EQ(seen[0], seen[i]);
}

TEST(OracleConfig, EnvFillsUnsetFields) {
  ::setenv("EVOTREE_ORACLE_URL", "http://example.test/oracle", 1);
  ::setenv("EVOTREE_ORACLE_TIMEOUT_MS", "250", 1);
  OracleConfig config;
  config = apply_oracle_env(config);
  EXPECT_EQ(config.endpoint, "http://example.test/oracle");
  EXPECT_EQ(config.timeout_ms, 250);

  OracleConfig explicit_config;
  explicit_config.endpoint = "http://other.test/";
  explicit_config.timeout_ms = 77;
  explicit_config = apply_oracle_env(explicit_config);
  EXPECT_EQ(explicit_config.endpoint, "http://other.test/");
  EXPECT_EQ(explicit_config.timeout_ms, 77);
  ::unsetenv("EVOTREE_ORACLE_URL");
  ::unsetenv("EVOTREE_ORACLE_TIMEOUT_MS");
}

TEST(MakeOracle, RemoteRequiresEndpoint) {
  OracleConfig config;
  config.backend = OracleBackend::remote;
  EXPECT_THROW(make_oracle(config), std::invalid_argument);
}

class RemoteOracleTest : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/oracle", [this](const httplib::Request& req,
                                   httplib::Response& res) {
      ++requests_;
      nlohmann::json body = nlohmann::json::parse(req.body);
      last_op_ = body["op"];
      res.set_content(respond(body), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  std::unique_ptr<Oracle> client(int timeout_ms = 2000) {
    OracleConfig config;
    config.backend = OracleBackend::remote;
    config.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/oracle";
    config.timeout_ms = timeout_ms;
    return make_oracle(config);
  }

  virtual std::string respond(const nlohmann::json& body) {
    const std::string op = body["op"];
    if (op == "nli") {
      return R"({"label":"entailment","probability":0.9})";
    }
    if (op == "verify") {
      return R"({"score":0.8,"kind":"paraphrase"})";
    }
    if (op == "propose") {
      return R"({"statements":["s1","s2"]})";
    }
    if (op == "summarize") {
      return R"({"summary":"short"})";
    }
    if (op == "concepts") {
      return R"({"concepts":["c1"]})";
    }
    return R"({"score":0.25})";
  }

  httplib::Server server_;
  std::thread thread_;
  std::atomic<int> requests_{0};
  std::string last_op_;
  int port_ = 0;
};

TEST_F(RemoteOracleTest, RoundTripsEveryOperation) {
  auto oracle = client();
  EXPECT_DOUBLE_EQ(oracle->priority("s", "t"), 0.25);
  EXPECT_DOUBLE_EQ(oracle->importance_judgment(paper("p", 2019), "t"), 0.25);
  EXPECT_DOUBLE_EQ(
      oracle->continuation_score({paper("a", 2015)}, paper("b", 2016)), 0.25);
  EXPECT_DOUBLE_EQ(oracle->similarity("x", "y"), 0.25);
  NliVerdict verdict = oracle->nli_classify("p", "h");
  EXPECT_EQ(verdict.label, NliLabel::entailment);
  EXPECT_DOUBLE_EQ(verdict.probability, 0.9);
  LlmVerification verification = oracle->llm_verify("c", "e", "ctx");
  EXPECT_EQ(verification.kind, VerificationKind::paraphrase);
  EXPECT_EQ(oracle->propose_candidates("ctx", "t", 5),
            (std::vector<std::string>{"s1", "s2"}));
  EXPECT_EQ(oracle->summarize("a very long text"), "short");
  EXPECT_EQ(oracle->extract_concepts("para"),
            (std::vector<std::string>{"c1"}));
}

TEST_F(RemoteOracleTest, MemoizationPinsRemoteAnswers) {
  auto oracle = client();
  oracle->priority("s", "t");
  oracle->priority("s", "t");
  oracle->priority("s", "t");
  EXPECT_EQ(requests_.load(), 1);
}

class MalformedRemoteTest : public RemoteOracleTest {
 protected:
  std::string respond(const nlohmann::json& body) override {
    const std::string op = body["op"];
    if (op == "priority") return R"({"score":1.7})";
    if (op == "similarity") return R"({"wrong_field":0.5})";
    if (op == "nli") return R"({"label":"perhaps","probability":0.5})";
    return "this is not json";
  }
};

TEST_F(MalformedRemoteTest, BadResponsesSurfaceAsMalformed) {
  auto oracle = client();
  EXPECT_THROW(oracle->priority("s", "t"), MalformedResponseError);
  EXPECT_THROW(oracle->similarity("x", "y"), MalformedResponseError);
  EXPECT_THROW(oracle->nli_classify("p", "h"), MalformedResponseError);
  EXPECT_THROW(oracle->summarize("text"), MalformedResponseError);
}

TEST(RemoteOracle, UnreachableEndpointIsUnavailable) {
  OracleConfig config;
  config.backend = OracleBackend::remote;
  // Reserved TEST-NET address: nothing listens there.
  config.endpoint = "http://127.0.0.1:1/oracle";
  config.timeout_ms = 300;
  auto oracle = make_oracle(config);
  EXPECT_THROW(oracle->priority("s", "t"), OracleUnavailableError);
}

}  // namespace
}  // namespace evotree
