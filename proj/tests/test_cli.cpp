#include "evotree/cli.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evotree/corpus.hpp"
#include "evotree/serialize.hpp"

namespace evotree {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Spawns the installed binary; arguments are single-quoted, so they must not
/// themselves contain single quotes.
CliRun run_tool(const std::vector<std::string>& args) {
  static int counter = 0;
  std::string stem = ::testing::TempDir() + "evotree_cli_capture_" +
                     std::to_string(::getpid()) + "_" +
                     std::to_string(++counter);
  std::string command = EVOTREE_CLI_PATH;
  for (const std::string& arg : args) command += " '" + arg + "'";
  command += " >" + stem + ".out 2>" + stem + ".err";
  int status = std::system(command.c_str());
  CliRun run;
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  run.out = slurp(stem + ".out");
  run.err = slurp(stem + ".err");
  return run;
}

std::string scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  std::string dir = ::testing::TempDir() + "evotree_cli/" +
                    std::string(info->test_suite_name()) + "_" + info->name();
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir + "/";
}

std::vector<std::string> survey_fixtures() {
  return {std::string(EVOTREE_TEST_DATA_DIR) + "/surveys/nmt_survey.md",
          std::string(EVOTREE_TEST_DATA_DIR) + "/surveys/seq_models.md"};
}

std::string ingest_fixture_corpus(const std::string& dir) {
  std::string corpus_path = dir + "corpus.jsonl";
  CliRun run = run_tool({"ingest", "--surveys", survey_fixtures()[0],
                         survey_fixtures()[1], "--out", corpus_path});
  EXPECT_EQ(run.exit_code, 0) << run.err;
  return corpus_path;
}

TEST(CliUsage, HelpExitsZeroEverywhere) {
  EXPECT_EQ(run_tool({"--help"}).exit_code, 0);
  for (const char* sub : {"ingest", "score", "build", "retrospect",
                          "verify-facts", "eval", "inspect"}) {
    CliRun run = run_tool({sub, "--help"});
    EXPECT_EQ(run.exit_code, 0) << sub;
    EXPECT_NE(run.out.find("Usage"), std::string::npos) << sub;
  }
}

TEST(CliUsage, MissingRequiredFlagExitsTwo) {
  CliRun run = run_tool({"build"});
  EXPECT_EQ(run.exit_code, 2);
  EXPECT_FALSE(run.err.empty());
}

TEST(CliUsage, UnknownFlagExitsTwo) {
  EXPECT_EQ(run_tool({"eval", "--predictions", "x", "--bogus"}).exit_code, 2);
}

TEST(CliUsage, UnknownSubcommandExitsTwo) {
  EXPECT_EQ(run_tool({"frobnicate"}).exit_code, 2);
}

TEST(CliUsage, NoSubcommandExitsTwo) {
  EXPECT_EQ(run_tool({}).exit_code, 2);
}

TEST(CliUsage, BadFlagValueExitsTwo) {
  EXPECT_EQ(run_tool({"build", "--corpus", "c", "--topic", "t", "--oracle",
                      "quantum"})
                .exit_code,
            2);
  EXPECT_EQ(run_tool({"score", "--corpus", "c", "--topic", "t", "--gamma",
                      "1.5"})
                .exit_code,
            2);
}

TEST(CliIngest, ProducesLoadableCorpus) {
  std::string dir = scratch_dir();
  std::string corpus_path = dir + "corpus.jsonl";
  CliRun run = run_tool({"ingest", "--surveys", survey_fixtures()[0],
                         survey_fixtures()[1], "--out", corpus_path});
  ASSERT_EQ(run.exit_code, 0) << run.err;
  EXPECT_NE(run.out.find("ingested 2 surveys"), std::string::npos);

  Corpus corpus = load_corpus(corpus_path);
  EXPECT_EQ(corpus.papers.size(), 5u);
  EXPECT_EQ(corpus.pairs.size(), 5u);
  EXPECT_TRUE(corpus.validate().empty());

  // The fixture's phantom citation and dropped stub surface as warnings.
  EXPECT_NE(run.err.find("warning:"), std::string::npos);
  EXPECT_NE(run.err.find("[99]"), std::string::npos);
}

TEST(CliIngest, MissingSurveyFileExitsOne) {
  CliRun run = run_tool({"ingest", "--surveys", "/nonexistent/survey.md",
                         "--out", "-"});
  EXPECT_EQ(run.exit_code, 1);
  EXPECT_NE(run.err.find("error:"), std::string::npos);
}

TEST(CliScore, AnnotatesEveryPaper) {
  std::string dir = scratch_dir();
  std::string corpus_path = ingest_fixture_corpus(dir);
  std::string scored_path = dir + "scored.jsonl";
  CliRun run = run_tool({"score", "--corpus", corpus_path, "--topic",
                         "neural machine translation", "--gamma", "0.25",
                         "--out", scored_path});
  ASSERT_EQ(run.exit_code, 0) << run.err;

  Corpus corpus = load_corpus(scored_path);
  ASSERT_EQ(corpus.papers.size(), 5u);
  for (const auto& [id, paper] : corpus.papers) {
    ASSERT_TRUE(paper.importance.has_value()) << id;
    EXPECT_DOUBLE_EQ(paper.importance->gamma, 0.25) << id;
  }
}

TEST(CliBuild, ByteIdenticalAcrossRuns) {
  std::string dir = scratch_dir();
  std::string corpus_path = ingest_fixture_corpus(dir);
  std::vector<std::string> base = {"build",   "--corpus", corpus_path,
                                   "--topic", "neural machine translation",
                                   "--seed",  "7",        "--oracle",
                                   "mock"};
  std::vector<std::string> first = base, second = base;
  first.insert(first.end(), {"--out", dir + "tree_a.json"});
  second.insert(second.end(), {"--out", dir + "tree_b.json"});
  ASSERT_EQ(run_tool(first).exit_code, 0);
  ASSERT_EQ(run_tool(second).exit_code, 0);

  std::string bytes_a = slurp(dir + "tree_a.json");
  std::string bytes_b = slurp(dir + "tree_b.json");
  ASSERT_FALSE(bytes_a.empty());
  EXPECT_EQ(bytes_a, bytes_b);

  TheTree tree = deserialize(bytes_a);
  EXPECT_TRUE(tree.validate().empty());
  EXPECT_GE(tree.node_count(), 1u);
}

TEST(CliEval, MatchesHandComputedReport) {
  std::string dir = scratch_dir();
  std::string predictions = dir + "p.jsonl";
  std::ofstream(predictions) << "{\"rank\": 1}\n{\"rank\": 3}\n{\"rank\": 7}\n";

  std::string out = dir + "metrics.json";
  CliRun run = run_tool({"eval", "--predictions", predictions, "--out", out});
  ASSERT_EQ(run.exit_code, 0) << run.err;
  nlohmann::json doc = nlohmann::json::parse(slurp(out));
  EXPECT_NEAR(doc["hit_at"]["1"].get<double>(), 1.0 / 3, 1e-4);
  EXPECT_NEAR(doc["hit_at"]["3"].get<double>(), 2.0 / 3, 1e-4);
  EXPECT_NEAR(doc["mr"].get<double>(), 11.0 / 3, 1e-4);
  EXPECT_NEAR(doc["mrr"].get<double>(), 0.4921, 1e-4);
  EXPECT_NEAR(doc["median_rank"].get<double>(), 3.0, 1e-9);
  EXPECT_EQ(doc["sample_count"].get<int>(), 3);

  CliRun csv = run_tool({"eval", "--predictions", predictions, "--format", "csv"});
  ASSERT_EQ(csv.exit_code, 0);
  EXPECT_EQ(csv.out.substr(0, 13), "metric,value\n");
  EXPECT_NE(csv.out.find("mrr,0.492063"), std::string::npos);
}

TEST(CliEval, CandidateListsWork) {
  std::string dir = scratch_dir();
  std::string predictions = dir + "p.jsonl";
  std::ofstream(predictions)
      << "{\"target\": \"a\", \"candidates\": [\"a\", \"b\"]}\n"
      << "{\"target\": \"b\", \"candidates\": [\"a\", \"b\"]}\n";
  CliRun run = run_tool({"eval", "--predictions", predictions, "--ks", "1,2"});
  ASSERT_EQ(run.exit_code, 0) << run.err;
  nlohmann::json doc = nlohmann::json::parse(run.out);
  EXPECT_NEAR(doc["hit_at"]["1"].get<double>(), 0.5, 1e-9);
  EXPECT_NEAR(doc["hit_at"]["2"].get<double>(), 1.0, 1e-9);
}

TEST(CliVerifyFacts, ReportsMissingRate) {
  std::string dir = scratch_dir();
  std::string corpus_path = ingest_fixture_corpus(dir);
  std::string claims = dir + "claims.jsonl";
  std::ofstream(claims)
      << "{\"claim\": \"Sequence to sequence learning with neural networks\", "
         "\"doc_id\": \"sequence-to-sequence-learning-with-neural-networks-2014\"}\n"
      << "{\"claim\": \"a claim about a phantom paper\", \"doc_id\": \"ghost\"}\n";
  std::string out = dir + "results.jsonl";
  CliRun run = run_tool({"verify-facts", "--corpus", corpus_path, "--claims",
                         claims, "--out", out});
  ASSERT_EQ(run.exit_code, 0) << run.err;
  EXPECT_NE(run.out.find("missing_rate 0.5"), std::string::npos);

  std::istringstream lines(slurp(out));
  std::string line;
  int count = 0;
  bool saw_missing = false;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++count;
    nlohmann::json j = nlohmann::json::parse(line);
    saw_missing = saw_missing || j["missing"].get<bool>();
  }
  EXPECT_EQ(count, 2);
  EXPECT_TRUE(saw_missing);
}

TEST(CliRetrospect, TracesChronologicalPaths) {
  std::string dir = scratch_dir();
  std::string corpus_path = ingest_fixture_corpus(dir);
  fs::create_directories(dir + "trees");
  ASSERT_EQ(run_tool({"build", "--corpus", corpus_path, "--topic",
                      "neural machine translation", "--seed", "7", "--out",
                      dir + "trees/nmt.json"})
                .exit_code,
            0);
  std::string out = dir + "paths.json";
  CliRun run = run_tool({"retrospect", "--trees-dir", dir + "trees", "--title",
                         "Neural machine translation of rare words with subword units",
                         "--min-sim", "0", "--out", out});
  ASSERT_EQ(run.exit_code, 0) << run.err;

  nlohmann::json doc = nlohmann::json::parse(slurp(out));
  ASSERT_TRUE(doc.is_array());
  ASSERT_FALSE(doc.empty());
  for (const auto& path : doc) {
    EXPECT_EQ(path["topic"], "neural machine translation");
    int previous = 0;
    for (const auto& node : path["nodes"]) {
      int year = node["year"].get<int>();
      EXPECT_GE(year, previous);
      previous = year;
    }
  }
}

TEST(CliRetrospect, EmptyTreesDirExitsOne) {
  std::string dir = scratch_dir();
  fs::create_directories(dir + "trees");
  CliRun run = run_tool({"retrospect", "--trees-dir", dir + "trees", "--title",
                         "anything"});
  EXPECT_EQ(run.exit_code, 1);
  EXPECT_NE(run.err.find("error:"), std::string::npos);
}

TEST(CliInspect, SummaryAndDotExport) {
  std::string dir = scratch_dir();
  std::string corpus_path = ingest_fixture_corpus(dir);
  ASSERT_EQ(run_tool({"build", "--corpus", corpus_path, "--topic",
                      "neural machine translation", "--seed", "7", "--out",
                      dir + "tree.json"})
                .exit_code,
            0);

  CliRun text = run_tool({"inspect", "--tree", dir + "tree.json"});
  ASSERT_EQ(text.exit_code, 0) << text.err;
  EXPECT_NE(text.out.find("topic: neural machine translation"),
            std::string::npos);
  EXPECT_NE(text.out.find("nodes:"), std::string::npos);

  CliRun dot = run_tool({"inspect", "--tree", dir + "tree.json", "--format",
                         "dot"});
  ASSERT_EQ(dot.exit_code, 0);
  EXPECT_EQ(dot.out.substr(0, 8), "digraph ");

  CliRun json = run_tool({"inspect", "--tree", dir + "tree.json", "--format",
                          "json"});
  ASSERT_EQ(json.exit_code, 0);
  nlohmann::json doc = nlohmann::json::parse(json.out);
  EXPECT_EQ(doc["topic"], "neural machine translation");
}

TEST(CliInspect, MissingTreeFileExitsOne) {
  EXPECT_EQ(run_tool({"inspect", "--tree", "/nonexistent/tree.json"}).exit_code,
            1);
}

}  // namespace
}  // namespace evotree
