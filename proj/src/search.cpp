#include "evotree/search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "evotree/errors.hpp"
#include "evotree/importance.hpp"

namespace evotree {

namespace {

using nlohmann::json;

double importance_of(const PaperNode& node, const std::string& topic,
                     Oracle& oracle) {
  if (node.importance) return node.importance->combined;
  return oracle.importance_judgment(node, topic);
}

}  // namespace

void SearchConfig::validate() const {
  if (!(c0 > 0.0)) throw OutOfRangeError("c0 must be > 0");
  if (lambda < 0.0) throw OutOfRangeError("lambda must be >= 0");
  if (!(tau > 0.0)) throw OutOfRangeError("tau must be > 0");
  if (max_iterations < 0) throw OutOfRangeError("max_iterations must be >= 0");
  if (max_path_length < 1) throw OutOfRangeError("max_path_length must be >= 1");
  if (reward_sensitivity < 0.0) {
    throw OutOfRangeError("reward_sensitivity must be >= 0");
  }
}

SearchNode* SearchNode::add_child(std::string id, int child_year,
                                  std::optional<double> priority) {
  auto child = std::make_unique<SearchNode>();
  child->paper_id = std::move(id);
  child->year = child_year;
  child->parent = this;
  child->cached_priority = priority;
  children.push_back(std::move(child));
  return children.back().get();
}

double temp_coherence(int candidate_year, int path_tail_year, double tau) {
  if (!(tau > 0.0)) throw OutOfRangeError("tau must be > 0");
  if (candidate_year < path_tail_year) return 0.0;
  int gap = candidate_year - path_tail_year;
  return std::exp(-std::max(0, gap - 1) / tau);
}

double sgt_uct(const SearchNode& node, int parent_visits, double c,
               double lambda, double priority, double coherence) {
  if (node.visits == 0) {
    throw UnvisitedNodeError("sgt_uct on unvisited node " + node.paper_id);
  }
  if (parent_visits < node.visits) {
    throw std::invalid_argument("parent visits below node visits");
  }
  double exploit = node.total_reward / node.visits;
  double explore =
      c * std::sqrt(std::log(static_cast<double>(parent_visits)) / node.visits);
  return (exploit + explore + lambda * priority) * coherence;
}

double exploration_coefficient(double c0, double avg_reward,
                               double sensitivity) {
  return c0 * (1.0 + sensitivity * std::max(0.0, avg_reward));
}

SearchNode& select(SearchNode& root, const SearchConfig& config) {
  double avg_reward =
      root.visits > 0 ? root.total_reward / root.visits : 0.0;
  double c = exploration_coefficient(config.c0, avg_reward,
                                     config.reward_sensitivity);
  SearchNode* node = &root;
  while (!node->children.empty()) {
    // First-visit rule: any unvisited child outranks every visited one,
    // ordered by semantic guidance so the most promising is tried first.
    SearchNode* unvisited = nullptr;
    double best_guidance = 0.0;
    for (const auto& child : node->children) {
      if (child->visits > 0) continue;
      double guidance = config.lambda * child->cached_priority.value_or(0.0) *
                        temp_coherence(child->year, node->year, config.tau);
      if (unvisited == nullptr || guidance > best_guidance ||
          (guidance == best_guidance &&
           child->paper_id < unvisited->paper_id)) {
        unvisited = child.get();
        best_guidance = guidance;
      }
    }
    if (unvisited != nullptr) return *unvisited;

    SearchNode* best = nullptr;
    double best_score = 0.0;
    for (const auto& child : node->children) {
      double score = sgt_uct(
          *child, node->visits, c, config.lambda,
          child->cached_priority.value_or(0.0),
          temp_coherence(child->year, node->year, config.tau));
      if (best == nullptr || score > best_score ||
          (score == best_score && child->paper_id < best->paper_id)) {
        best = child.get();
        best_score = score;
      }
    }
    node = best;
  }
  return *node;
}

void backpropagate(SearchNode& leaf, double reward) {
  for (SearchNode* node = &leaf; node != nullptr; node = node->parent) {
    node->visits += 1;
    node->total_reward += reward;
  }
}

PathReward path_reward(const std::vector<PaperNode>& path,
                       const std::vector<EvolutionEdge>& edges, Oracle& oracle,
                       const SearchConfig& config) {
  if (path.empty()) throw std::invalid_argument("path_reward: empty path");
  if (edges.size() + 1 != path.size()) {
    throw std::invalid_argument("path_reward: need exactly one edge per step");
  }
  PathReward reward;
  std::vector<PaperNode> prefix;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const PaperNode& node = path[i];
    if (i > 0) {
      if (node.year < path[i - 1].year) {
        throw AchronologicalPathError("year falls from " +
                                      std::to_string(path[i - 1].year) +
                                      " to " + std::to_string(node.year) +
                                      " at " + node.id);
      }
      const EvolutionEdge& edge = edges[i - 1];
      if (edge.source_id != path[i - 1].id || edge.target_id != node.id) {
        throw std::invalid_argument("path_reward: edge " + edge.source_id +
                                    "->" + edge.target_id +
                                    " does not match the path step");
      }
      if (!edge.attribution_score) {
        throw MissingAttributionError("edge " + edge.source_id + "->" +
                                      edge.target_id);
      }
      reward.attr += *edge.attribution_score;
      reward.gen += oracle.continuation_score(prefix, node) *
                    temp_coherence(node.year, path[i - 1].year, config.tau);
    }
    if (!node.importance) {
      throw MissingImportanceError("node " + node.id + " lacks importance");
    }
    reward.node_sum += node.importance->combined;
    prefix.push_back(node);
  }
  reward.total = reward.node_sum + reward.gen + reward.attr;
  return reward;
}

double simulate(const std::vector<PaperNode>& path,
                const std::vector<EvolutionEdge>& edges, const Corpus& corpus,
                const std::string& topic, Oracle& oracle,
                const SearchConfig& config) {
  PathReward base = path_reward(path, edges, oracle, config);
  double total = base.total;

  std::set<std::string> used;
  for (const PaperNode& node : path) used.insert(node.id);
  std::vector<PaperNode> rolled = path;
  while (static_cast<int>(rolled.size()) < config.max_path_length) {
    const PaperNode* pick = nullptr;
    double pick_priority = 0.0;
    for (const auto& [id, paper] : corpus.papers) {
      if (used.count(id) || paper.year < rolled.back().year) continue;
      double priority = oracle.priority(node_statement(paper), topic);
      if (pick == nullptr || priority > pick_priority ||
          (priority == pick_priority && id < pick->id)) {
        pick = &paper;
        pick_priority = priority;
      }
    }
    if (pick == nullptr) break;
    // Rollout steps add importance and generation terms; attribution stays
    // absent because no link was verified.
    total += importance_of(*pick, topic, oracle);
    total += oracle.continuation_score(rolled, *pick) *
             temp_coherence(pick->year, rolled.back().year, config.tau);
    used.insert(pick->id);
    rolled.push_back(*pick);
  }
  return total;
}

void PipelineConfig::validate() const {
  search.validate();
  if (tvcv.theta_cite < 0.0 || tvcv.theta_cite > 1.0) {
    throw OutOfRangeError("theta_cite must lie in [0,1]");
  }
  if (tvcv.top_n_docs < 1) throw OutOfRangeError("top_n_docs must be >= 1");
  if (tvcv.max_retries < 1) throw OutOfRangeError("max_retries must be >= 1");
  if (tvcv.summary_max_chars < 1) {
    throw OutOfRangeError("summary_max_chars must be >= 1");
  }
  if (tvcv.ranli.alpha < 0.0 || tvcv.ranli.alpha > 1.0) {
    throw OutOfRangeError("alpha must lie in [0,1]");
  }
  if (tvcv.ranli.attr_threshold < 0.0 || tvcv.ranli.attr_threshold > 1.0) {
    throw OutOfRangeError("attr_threshold must lie in [0,1]");
  }
  if (tvcv.ranli.retrieve_k < 1) throw OutOfRangeError("retrieve_k must be >= 1");
  if (gamma < 0.0 || gamma > 1.0) throw OutOfRangeError("gamma must lie in [0,1]");
}

namespace {

double field_double(const json& value, const std::string& path) {
  if (!value.is_number()) throw SchemaViolationError(path, "expected a number");
  return value.get<double>();
}

int field_int(const json& value, const std::string& path) {
  if (!value.is_number_integer()) {
    throw SchemaViolationError(path, "expected an integer");
  }
  return value.get<int>();
}

bool field_bool(const json& value, const std::string& path) {
  if (!value.is_boolean()) throw SchemaViolationError(path, "expected a bool");
  return value.get<bool>();
}

void parse_search(const json& obj, SearchConfig& out, const std::string& base) {
  if (!obj.is_object()) throw SchemaViolationError(base, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    std::string path = base + "." + key;
    if (key == "c0") out.c0 = field_double(value, path);
    else if (key == "lambda") out.lambda = field_double(value, path);
    else if (key == "tau") out.tau = field_double(value, path);
    else if (key == "max_iterations") out.max_iterations = field_int(value, path);
    else if (key == "max_path_length") out.max_path_length = field_int(value, path);
    else if (key == "seed") out.seed = static_cast<std::uint64_t>(field_int(value, path));
    else if (key == "reward_sensitivity") out.reward_sensitivity = field_double(value, path);
    else throw SchemaViolationError(path, "unknown key");
  }
}

void parse_ranli(const json& obj, RanliConfig& out, const std::string& base) {
  if (!obj.is_object()) throw SchemaViolationError(base, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    std::string path = base + "." + key;
    if (key == "alpha") out.alpha = field_double(value, path);
    else if (key == "attr_threshold") out.attr_threshold = field_double(value, path);
    else if (key == "retrieve_k") out.retrieve_k = field_int(value, path);
    else if (key == "strict_blend") out.strict_blend = field_bool(value, path);
    else throw SchemaViolationError(path, "unknown key");
  }
}

void parse_tvcv(const json& obj, TvcvConfig& out, const std::string& base) {
  if (!obj.is_object()) throw SchemaViolationError(base, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    std::string path = base + "." + key;
    if (key == "theta_cite") out.theta_cite = field_double(value, path);
    else if (key == "top_n_docs") out.top_n_docs = field_int(value, path);
    else if (key == "max_retries") out.max_retries = field_int(value, path);
    else if (key == "summary_max_chars") out.summary_max_chars = field_int(value, path);
    else if (key == "ranli") parse_ranli(value, out.ranli, path);
    else throw SchemaViolationError(path, "unknown key");
  }
}

}  // namespace

PipelineConfig pipeline_config_from_json(const std::string& text) {
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaViolationError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!parsed.is_object()) throw SchemaViolationError("$", "expected an object");
  PipelineConfig config;
  for (const auto& [key, value] : parsed.items()) {
    if (key == "search") parse_search(value, config.search, "search");
    else if (key == "tvcv") parse_tvcv(value, config.tvcv, "tvcv");
    else if (key == "gamma") config.gamma = field_double(value, key);
    else throw SchemaViolationError(key, "unknown key");
  }
  config.validate();
  return config;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableFileError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return pipeline_config_from_json(buffer.str());
}

namespace {

/// All search state that run_search threads through its iterations.
struct Engine {
  const Corpus& corpus;
  const std::string& topic;
  const PipelineConfig& config;
  Oracle& oracle;
  std::map<std::string, PaperNode> papers;  // importance-annotated copies
  std::map<std::pair<std::string, std::string>, EvolutionEdge> verified;
  SearchNode root;

  std::vector<PaperNode> path_nodes(const SearchNode& node) const {
    std::vector<const SearchNode*> chain;
    for (const SearchNode* cur = &node; cur != nullptr; cur = cur->parent) {
      chain.push_back(cur);
    }
    std::vector<PaperNode> path;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      path.push_back(papers.at((*it)->paper_id));
    }
    return path;
  }

  std::vector<EvolutionEdge> path_edges(const std::vector<PaperNode>& path) const {
    std::vector<EvolutionEdge> edges;
    for (std::size_t i = 1; i < path.size(); ++i) {
      edges.push_back(verified.at({path[i - 1].id, path[i].id}));
    }
    return edges;
  }

  /// Materializes every verified TVCV candidate as a child, exactly once.
  void expand(SearchNode& leaf) {
    leaf.exhausted = true;
    std::vector<PaperNode> path = path_nodes(leaf);
    std::set<std::string> on_path;
    for (const PaperNode& node : path) on_path.insert(node.id);

    std::vector<Candidate> thoughts;
    try {
      thoughts = think(path, topic, oracle, config.tvcv.max_retries);
    } catch (const NoCandidatesError&) {
      return;
    }
    for (Candidate& candidate : thoughts) {
      Candidate cited;
      try {
        cited = cite(verbalize(std::move(candidate), oracle,
                               config.tvcv.summary_max_chars),
                     corpus, oracle, config.tvcv.theta_cite,
                     config.tvcv.top_n_docs);
      } catch (const NoSupportFoundError&) {
        continue;
      }
      const std::string id = cited.proposed_paper->id;
      if (on_path.count(id)) continue;
      bool already_child = false;
      for (const auto& child : leaf.children) {
        if (child->paper_id == id) { already_child = true; break; }
      }
      if (already_child) continue;
      Candidate outcome =
          verify(std::move(cited), path.back(), corpus, config.tvcv.ranli,
                 oracle);
      if (outcome.status != CandidateStatus::verified) continue;

      const PaperNode& paper = papers.at(id);
      EvolutionEdge edge;
      edge.source_id = leaf.paper_id;
      edge.target_id = id;
      edge.kind = RelationKind::evolves_into;
      edge.nli_verdict = outcome.attribution->nli.label;
      edge.attribution_score = outcome.attribution->r_attr;
      edge.evidence = outcome.attribution->passages;
      verified.emplace(std::make_pair(leaf.paper_id, id), std::move(edge));
      leaf.add_child(id, paper.year,
                     oracle.priority(node_statement(paper), topic));
    }
  }

  void iterate() {
    SearchNode& leaf = select(root, config.search);
    if (!leaf.exhausted) expand(leaf);

    // Simulate from the freshly selected frontier: the best unvisited child
    // if expansion produced one, otherwise the leaf itself.
    SearchNode* target = &leaf;
    if (leaf.visits == 0 || !leaf.children.empty()) {
      SearchNode* unvisited = nullptr;
      double best_guidance = 0.0;
      for (const auto& child : leaf.children) {
        if (child->visits > 0) continue;
        double guidance =
            config.search.lambda * child->cached_priority.value_or(0.0) *
            temp_coherence(child->year, leaf.year, config.search.tau);
        if (unvisited == nullptr || guidance > best_guidance ||
            (guidance == best_guidance &&
             child->paper_id < unvisited->paper_id)) {
          unvisited = child.get();
          best_guidance = guidance;
        }
      }
      if (unvisited != nullptr) target = unvisited;
    }

    std::vector<PaperNode> path = path_nodes(*target);
    double reward = simulate(path, path_edges(path), corpus, topic, oracle,
                             config.search);
    backpropagate(*target, reward);
  }
};

}  // namespace

TheTree citation_skeleton(const Corpus& corpus, const std::string& topic) {
  TheTree skeleton(topic);
  for (const auto& [id, paper] : corpus.papers) skeleton.add_node(paper);
  std::set<std::pair<std::string, std::string>> seen;
  for (const SentenceCitationPair& pair : corpus.pairs) {
    std::vector<const PaperNode*> cited;
    for (const std::string& id : pair.cited_paper_ids) {
      auto it = corpus.papers.find(id);
      if (it != corpus.papers.end()) cited.push_back(&it->second);
    }
    std::sort(cited.begin(), cited.end(), [](const auto* a, const auto* b) {
      if (a->year != b->year) return a->year < b->year;
      return a->id < b->id;
    });
    for (std::size_t i = 1; i < cited.size(); ++i) {
      std::pair<std::string, std::string> key{cited[i - 1]->id, cited[i]->id};
      if (key.first == key.second || !seen.insert(key).second) continue;
      EvolutionEdge edge;
      edge.source_id = key.first;
      edge.target_id = key.second;
      edge.kind = RelationKind::cites_plain;
      skeleton.add_edge(std::move(edge));
    }
  }
  return skeleton;
}

TheTree run_search(const Corpus& corpus, const std::string& root_concept,
                   const PipelineConfig& config, Oracle& oracle) {
  if (corpus.papers.empty()) {
    throw EmptyCorpusError("search needs at least one corpus paper");
  }
  config.validate();

  // Importance annotation over the corpus citation skeleton: every paper,
  // plus plain citation edges between papers co-cited by one sentence.
  TheTree skeleton = citation_skeleton(corpus, root_concept);
  annotate_importance(skeleton, oracle, root_concept, config.gamma);

  Engine engine{corpus, root_concept, config, oracle, {}, {}, {}};
  for (const auto& [id, paper] : skeleton.nodes()) engine.papers[id] = paper;

  // Root: the paper most similar to the concept, ties to the smallest id.
  const PaperNode* root_paper = nullptr;
  double best_similarity = 0.0;
  for (const auto& [id, paper] : engine.papers) {
    double s = oracle.similarity(root_concept, node_statement(paper));
    if (root_paper == nullptr || s > best_similarity) {
      root_paper = &paper;
      best_similarity = s;
    }
  }
  engine.root.paper_id = root_paper->id;
  engine.root.year = root_paper->year;
  engine.root.cached_priority =
      oracle.priority(node_statement(*root_paper), root_concept);

  for (int i = 0; i < config.search.max_iterations; ++i) engine.iterate();

  // Merge the explored search tree into the output graph. The same paper can
  // occur on several branches, so a merged edge may close a cycle between
  // same-year papers; those are skipped deterministically (map order).
  TheTree out(root_concept);
  std::set<std::string> discovered;
  std::vector<const SearchNode*> stack = {&engine.root};
  while (!stack.empty()) {
    const SearchNode* node = stack.back();
    stack.pop_back();
    discovered.insert(node->paper_id);
    for (const auto& child : node->children) stack.push_back(child.get());
  }
  for (const std::string& id : discovered) out.add_node(engine.papers.at(id));
  for (const auto& [key, edge] : engine.verified) {
    try {
      out.add_edge(edge);
    } catch (const CycleIntroducedError&) {
      // Cross-branch edge closing a same-year cycle; drop it.
    }
  }
  return out;
}

}  // namespace evotree
