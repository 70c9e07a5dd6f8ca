#include "evotree/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evotree/corpus.hpp"
#include "evotree/errors.hpp"
#include "evotree/eval.hpp"
#include "evotree/importance.hpp"
#include "evotree/ingest.hpp"
#include "evotree/oracle.hpp"
#include "evotree/ranli.hpp"
#include "evotree/retrospect.hpp"
#include "evotree/search.hpp"
#include "evotree/serialize.hpp"
#include "evotree/tree.hpp"

namespace evotree {
namespace {

using ordered_json = nlohmann::ordered_json;

struct OracleOpts {
  std::string backend = "mock";
  std::uint64_t seed = 0;
};

void add_oracle_flags(CLI::App* sub, OracleOpts& opts) {
  sub->add_option("--oracle", opts.backend, "semantic backend")
      ->check(CLI::IsMember({"mock", "remote"}))
      ->capture_default_str();
  sub->add_option("--seed", opts.seed, "seed for all randomness")
      ->capture_default_str();
}

std::unique_ptr<Oracle> make_oracle(const OracleOpts& opts) {
  if (opts.backend == "mock") return std::make_unique<MockOracle>(opts.seed);
  OracleConfig config;
  config.backend = OracleBackend::remote;
  config.seed = opts.seed;
  return std::make_unique<RemoteOracle>(apply_oracle_env(config));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableFileError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// "-" streams to stdout; anything else is a file path.
void emit(const std::string& out, const std::string& bytes) {
  if (out == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream stream(out, std::ios::binary);
  if (!stream) throw Error("cannot write " + out);
  stream << bytes;
  stream.flush();
  if (!stream) throw Error("cannot write " + out);
  std::cout << "wrote " << out << "\n";
}

void report_warnings(const std::vector<std::string>& diagnostics) {
  for (const std::string& d : diagnostics) std::cerr << "warning: " << d << "\n";
}

void report_violations(const ValidationReport& report) {
  for (const Violation& v : report) {
    std::cerr << "warning: " << to_string(v.kind) << " at " << v.subject
              << ": " << v.detail << "\n";
  }
}

// --- subcommands -----------------------------------------------------------

int do_ingest(const std::vector<std::string>& surveys, const std::string& out,
              const OracleOpts& oracle_opts) {
  auto oracle = make_oracle(oracle_opts);
  std::vector<std::string> diagnostics;
  Corpus corpus = build_corpus(surveys, *oracle, &diagnostics);
  report_warnings(diagnostics);
  std::cout << "ingested " << corpus.surveys.size() << " surveys: "
            << corpus.papers.size() << " papers, " << corpus.pairs.size()
            << " sentence-citation pairs, " << corpus.concepts.size()
            << " concepts\n";
  emit(out, corpus_to_jsonl(corpus));
  return 0;
}

int do_score(const std::string& corpus_path, const std::string& topic,
             double gamma, const std::string& out,
             const OracleOpts& oracle_opts) {
  Corpus corpus = load_corpus(corpus_path);
  if (corpus.papers.empty()) throw EmptyCorpusError("no papers in " + corpus_path);
  auto oracle = make_oracle(oracle_opts);
  TheTree skeleton = citation_skeleton(corpus, topic);
  annotate_importance(skeleton, *oracle, topic, gamma);
  for (auto& [id, paper] : corpus.papers) {
    paper.importance = skeleton.nodes().at(id).importance;
  }
  std::cout << "scored " << corpus.papers.size() << " papers (gamma " << gamma
            << ")\n";
  emit(out, corpus_to_jsonl(corpus));
  return 0;
}

int do_build(const std::string& corpus_path, const std::string& topic,
             const std::string& config_path, bool seed_given,
             const std::string& out, const OracleOpts& oracle_opts) {
  Corpus corpus = load_corpus(corpus_path);
  PipelineConfig config = config_path.empty()
                              ? PipelineConfig{}
                              : load_pipeline_config(config_path);
  if (seed_given) config.search.seed = oracle_opts.seed;
  OracleOpts effective = oracle_opts;
  effective.seed = config.search.seed;
  auto oracle = make_oracle(effective);
  if (auto* mock = dynamic_cast<MockOracle*>(oracle.get())) {
    // The offline backend has no generator; propose corpus papers verbatim
    // so expansion still has verifiable statements to work with.
    std::vector<std::string> pool;
    for (const auto& [id, paper] : corpus.papers) {
      pool.push_back(node_statement(paper));
    }
    mock->set_proposals(std::move(pool));
  }
  TheTree tree = run_search(corpus, topic, config, *oracle);
  report_violations(tree.validate());
  std::cout << "built tree for '" << topic << "': " << tree.node_count()
            << " nodes, " << tree.edge_count() << " edges\n";
  emit(out, serialize(tree));
  return 0;
}

int do_retrospect(const std::string& trees_dir, const RetroQuery& query,
                  const std::string& ranking_name, const std::string& out,
                  const OracleOpts& oracle_opts) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(trees_dir)) {
    throw UnreadableFileError("not a directory: " + trees_dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(trees_dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, TheTree> trees;
  for (const fs::path& file : files) {
    TheTree tree = load_tree(file.string());
    std::string topic = tree.topic();
    if (!trees.emplace(std::move(topic), std::move(tree)).second) {
      std::cerr << "warning: duplicate topic in " << file.string()
                << ", keeping the first\n";
    }
  }
  if (trees.empty()) {
    throw UnreadableFileError("no tree files (*.json) under " + trees_dir);
  }
  PathRanking ranking = ranking_name == "cumulative"
                            ? PathRanking::cumulative_importance
                            : PathRanking::terminal_similarity;
  auto oracle = make_oracle(oracle_opts);
  std::vector<RetroPath> paths = run_retrospection(query, trees, *oracle, ranking);

  ordered_json doc = ordered_json::array();
  for (const RetroPath& path : paths) {
    ordered_json entry;
    entry["topic"] = path.topic;
    entry["terminal_similarity"] = path.terminal_similarity;
    entry["rank_score"] = path.rank_score;
    entry["nodes"] = ordered_json::array();
    for (const PaperNode& node : path.nodes) {
      entry["nodes"].push_back(
          {{"id", node.id}, {"year", node.year}, {"title", node.title}});
    }
    doc.push_back(std::move(entry));
  }
  std::cout << "retrospection found " << paths.size() << " paths\n";
  emit(out, doc.dump(2) + "\n");
  return 0;
}

int do_verify_facts(const std::string& corpus_path,
                    const std::string& claims_path, const RanliConfig& config,
                    const std::string& out, const OracleOpts& oracle_opts) {
  Corpus corpus = load_corpus(corpus_path);
  std::vector<FactClaim> claims = parse_fact_claims(slurp(claims_path));
  auto oracle = make_oracle(oracle_opts);
  FactBatchReport report = verify_facts(claims, corpus, config, *oracle);
  std::size_t accepted = 0, missing = 0;
  for (const FactResult& result : report.results) {
    accepted += result.accepted ? 1 : 0;
    missing += result.missing ? 1 : 0;
  }
  std::cout << "verified " << report.results.size() << " claims: " << accepted
            << " accepted, " << missing << " missing (missing_rate "
            << report.missing_rate << ")\n";
  emit(out, fact_report_to_jsonl(report));
  return 0;
}

std::vector<RankedPrediction> parse_predictions(const std::string& jsonl) {
  std::vector<RankedPrediction> predictions;
  std::istringstream stream(jsonl);
  std::string line;
  int number = 0;
  while (std::getline(stream, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw SchemaViolationError("line " + std::to_string(number), e.what());
    }
    RankedPrediction p;
    p.target_id = j.value("target", "");
    if (j.contains("rank") && !j["rank"].is_null()) {
      p.rank_of_target = j["rank"].get<int>();
      predictions.push_back(std::move(p));
    } else if (j.contains("candidates")) {
      predictions.push_back(make_prediction(
          p.target_id, j["candidates"].get<std::vector<std::string>>()));
    } else {
      throw SchemaViolationError("line " + std::to_string(number),
                                 "need either rank or candidates");
    }
  }
  return predictions;
}

int do_eval(const std::string& predictions_path, std::vector<int> ks,
            const std::string& format, const std::string& out) {
  std::vector<RankedPrediction> predictions =
      parse_predictions(slurp(predictions_path));
  std::sort(ks.begin(), ks.end());
  MetricsReport report = rank_metrics(predictions, ks);
  if (format == "csv") {
    std::ostringstream csv;
    csv << "metric,value\n" << std::fixed << std::setprecision(6);
    for (const auto& [k, value] : report.hit_at) {
      csv << "hit@" << k << "," << value << "\n";
    }
    csv << "mr," << report.mr << "\n";
    csv << "mrr," << report.mrr << "\n";
    csv << "median_rank," << report.median_rank << "\n";
    csv << "sample_count," << report.sample_count << "\n";
    emit(out, csv.str());
    return 0;
  }
  ordered_json doc;
  doc["hit_at"] = ordered_json::object();
  for (const auto& [k, value] : report.hit_at) {
    doc["hit_at"][std::to_string(k)] = value;
  }
  doc["mr"] = report.mr;
  doc["mrr"] = report.mrr;
  doc["median_rank"] = report.median_rank;
  doc["sample_count"] = report.sample_count;
  emit(out, doc.dump(2) + "\n");
  return 0;
}

int do_inspect(const std::string& tree_path, const std::string& format,
               const std::string& out) {
  TheTree tree = load_tree(tree_path);
  report_violations(tree.validate());
  if (format == "dot") {
    emit(out, to_dot(tree));
    return 0;
  }

  std::size_t evolves = 0, enables = 0, cites = 0;
  for (const EvolutionEdge& edge : tree.edges()) {
    switch (edge.kind) {
      case RelationKind::evolves_into: ++evolves; break;
      case RelationKind::enables: ++enables; break;
      case RelationKind::cites_plain: ++cites; break;
    }
  }
  int min_year = 0, max_year = 0;
  std::vector<const PaperNode*> ranked;
  for (const auto& [id, node] : tree.nodes()) {
    if (min_year == 0 || node.year < min_year) min_year = node.year;
    max_year = std::max(max_year, node.year);
    ranked.push_back(&node);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
    double left = a->importance ? a->importance->combined : -1.0;
    double right = b->importance ? b->importance->combined : -1.0;
    if (left != right) return left > right;
    return a->id < b->id;
  });

  if (format == "json") {
    ordered_json doc;
    doc["topic"] = tree.topic();
    doc["nodes"] = tree.node_count();
    doc["edges"] = {{"evolves_into", evolves},
                    {"enables", enables},
                    {"cites_plain", cites}};
    if (!tree.nodes().empty()) doc["years"] = {min_year, max_year};
    emit(out, doc.dump(2) + "\n");
    return 0;
  }

  std::ostringstream text;
  text << "topic: " << tree.topic() << "\n";
  text << "nodes: " << tree.node_count() << "\n";
  text << "edges: " << tree.edge_count() << " (evolves_into " << evolves
       << ", enables " << enables << ", cites_plain " << cites << ")\n";
  if (!tree.nodes().empty()) {
    text << "years: " << min_year << "-" << max_year << "\n";
  }
  if (!ranked.empty() && ranked.front()->importance) {
    text << "top nodes by importance:\n" << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < ranked.size() && i < 5; ++i) {
      if (!ranked[i]->importance) break;
      text << "  " << ranked[i]->importance->combined << "  " << ranked[i]->id
           << " (" << ranked[i]->year << ")  " << ranked[i]->title << "\n";
    }
  }
  emit(out, text.str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"verifiable technology-evolution trees over paper corpora"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "surveys -> corpus JSONL");
  std::vector<std::string> survey_files;
  std::string ingest_out = "corpus.jsonl";
  OracleOpts ingest_oracle;
  ingest->add_option("--surveys", survey_files, "survey text files")
      ->required()
      ->expected(-1);
  ingest->add_option("--out", ingest_out, "output path or -")->capture_default_str();
  add_oracle_flags(ingest, ingest_oracle);

  // score
  auto* score = app.add_subcommand("score", "annotate corpus papers with importance");
  std::string score_corpus, score_topic;
  double score_gamma = 0.5;
  std::string score_out = "scored.jsonl";
  OracleOpts score_oracle;
  score->add_option("--corpus", score_corpus, "corpus JSONL")->required();
  score->add_option("--topic", score_topic, "topic context for scoring")->required();
  score->add_option("--gamma", score_gamma, "graph/LLM blend weight")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  score->add_option("--out", score_out, "output path or -")->capture_default_str();
  add_oracle_flags(score, score_oracle);

  // build
  auto* build = app.add_subcommand("build", "run the tree search over a corpus");
  std::string build_corpus_path, build_topic, build_config;
  std::string build_out = "tree.json";
  OracleOpts build_oracle;
  build->add_option("--corpus", build_corpus_path, "corpus JSONL")->required();
  build->add_option("--topic", build_topic, "root concept / tree topic")->required();
  build->add_option("--config", build_config, "pipeline config JSON");
  build->add_option("--out", build_out, "output path or -")->capture_default_str();
  add_oracle_flags(build, build_oracle);

  // retrospect
  auto* retrospect = app.add_subcommand("retrospect", "trace evolution paths for a query paper");
  std::string retro_dir, retro_ranking = "similarity";
  std::string retro_out = "paths.json";
  RetroQuery retro_query;
  OracleOpts retro_oracle;
  retrospect->add_option("--trees-dir", retro_dir, "directory of tree JSON files")->required();
  retrospect->add_option("--title", retro_query.title, "query paper title")->required();
  retrospect->add_option("--abstract", retro_query.abstract, "query paper abstract");
  retrospect->add_option("--n-topics", retro_query.n_topics)->capture_default_str();
  retrospect->add_option("--m-recent", retro_query.m_recent)->capture_default_str();
  retrospect->add_option("--n-terminals", retro_query.n_terminals)->capture_default_str();
  retrospect->add_option("--min-sim", retro_query.theta_sim)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  retrospect->add_option("--max-path-len", retro_query.max_path_len)->capture_default_str();
  retrospect->add_option("--n-paths", retro_query.n_paths)->capture_default_str();
  retrospect->add_option("--ranking", retro_ranking, "path ranking rule")
      ->check(CLI::IsMember({"similarity", "cumulative"}))
      ->capture_default_str();
  retrospect->add_option("--out", retro_out, "output path or -")->capture_default_str();
  add_oracle_flags(retrospect, retro_oracle);

  // verify-facts
  auto* verify = app.add_subcommand("verify-facts", "batch claim verification against the corpus");
  std::string verify_corpus, verify_claims;
  std::string verify_out = "results.jsonl";
  RanliConfig verify_config;
  OracleOpts verify_oracle;
  verify->add_option("--corpus", verify_corpus, "corpus JSONL")->required();
  verify->add_option("--claims", verify_claims, "claims JSONL: {claim, doc_id, evidence?}")->required();
  verify->add_option("--alpha", verify_config.alpha, "NLI/LLM blend")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  verify->add_option("--threshold", verify_config.attr_threshold, "acceptance threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  verify->add_flag("--strict-blend", verify_config.strict_blend,
                   "blend the LLM verifier into every label");
  verify->add_option("--out", verify_out, "output path or -")->capture_default_str();
  add_oracle_flags(verify, verify_oracle);

  // eval
  auto* eval = app.add_subcommand("eval", "rank metrics over a predictions file");
  std::string eval_predictions, eval_format = "json";
  std::string eval_out = "-";
  std::vector<int> eval_ks = {1, 3, 5, 10};
  eval->add_option("--predictions", eval_predictions,
                   "JSONL: {rank} or {target, candidates}")
      ->required();
  eval->add_option("--ks", eval_ks, "hit@k cutoffs")
      ->delimiter(',')
      ->capture_default_str();
  eval->add_option("--format", eval_format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  eval->add_option("--out", eval_out, "output path or -")->capture_default_str();

  // inspect
  auto* inspect = app.add_subcommand("inspect", "summarize or export a tree file");
  std::string inspect_tree, inspect_format = "text";
  std::string inspect_out = "-";
  inspect->add_option("--tree", inspect_tree, "tree JSON file")->required();
  inspect->add_option("--format", inspect_format, "output format")
      ->check(CLI::IsMember({"text", "json", "dot"}))
      ->capture_default_str();
  inspect->add_option("--out", inspect_out, "output path or -")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) return do_ingest(survey_files, ingest_out, ingest_oracle);
    if (*score) return do_score(score_corpus, score_topic, score_gamma,
                                score_out, score_oracle);
    if (*build) {
      return do_build(build_corpus_path, build_topic, build_config,
                      build->count("--seed") > 0, build_out, build_oracle);
    }
    if (*retrospect) {
      return do_retrospect(retro_dir, retro_query, retro_ranking, retro_out,
                           retro_oracle);
    }
    if (*verify) {
      return do_verify_facts(verify_corpus, verify_claims, verify_config,
                             verify_out, verify_oracle);
    }
    if (*eval) return do_eval(eval_predictions, eval_ks, eval_format, eval_out);
    if (*inspect) return do_inspect(inspect_tree, inspect_format, inspect_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace evotree
