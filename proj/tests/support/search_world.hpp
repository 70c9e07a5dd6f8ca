#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "evotree/corpus.hpp"
#include "evotree/oracle.hpp"
#include "evotree/search.hpp"
#include "builders.hpp"

namespace evotree::testsupport {

/// A fully scripted toy corpus: every oracle judgment the search pipeline can
/// ask for is pinned, so the objective value of any path is computable in
/// closed form and the true optimum falls out of exhaustive enumeration.
struct World {
  Corpus corpus;
  std::vector<std::string> ids;
  std::vector<std::string> titles;
  std::vector<int> years;
  std::vector<double> importance_llm;  // fixture for the LLM judgment
  std::vector<double> attr;            // attribution earned by edges into i
  std::vector<bool> blocked;           // i can never be verified
  std::map<std::pair<int, int>, double> continuation;
  int root = 0;
  std::string focus = "survey focus";

  double node_score(int i) const { return 0.5 * 0.5 + 0.5 * importance_llm[i]; }

  double coherence(int from, int to) const {
    int gap = years[to] - years[from];
    return gap <= 1 ? 1.0 : std::exp(-(gap - 1) / 5.0);
  }

  double reward_of(const std::vector<int>& path) const {
    double node_sum = 0.0, gen = 0.0, attr_sum = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
      node_sum += node_score(path[k]);
      if (k > 0) {
        gen += continuation.at({path[k - 1], path[k]}) *
               coherence(path[k - 1], path[k]);
        attr_sum += attr[path[k]];
      }
    }
    return node_sum + gen + attr_sum;
  }

  void enumerate(std::vector<int>& path, std::vector<std::vector<int>>& out) const {
    out.push_back(path);
    for (int j = 0; j < static_cast<int>(ids.size()); ++j) {
      if (blocked[j] || years[j] <= years[path.back()]) continue;
      bool used = false;
      for (int seen : path) used = used || seen == j;
      if (used) continue;
      path.push_back(j);
      enumerate(path, out);
      path.pop_back();
    }
  }
};

inline World make_world(std::uint64_t trial) {
  std::mt19937_64 rng(trial * 7919 + 13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  World world;
  int n = 2 + static_cast<int>(rng() % 6);
  int year = 2000;
  for (int i = 0; i < n; ++i) {
    std::string id = "p" + std::to_string(i);
    std::string title =
        "tok" + std::to_string(i) + "a tok" + std::to_string(i) + "b";
    world.ids.push_back(id);
    world.titles.push_back(title);
    world.years.push_back(year);
    year += 1 + static_cast<int>(rng() % 2);
    world.corpus.papers[id] = paper(id, world.years.back(), title);
    world.importance_llm.push_back(0.05 + 0.9 * unit(rng));
    bool blocked = i != 0 && unit(rng) < 0.3;
    world.blocked.push_back(blocked);
    world.attr.push_back(blocked ? 0.0
                                 : (unit(rng) < 0.4 ? 0.65 + 0.35 * unit(rng)
                                                    : 1.0));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) world.continuation[{i, j}] = unit(rng);
    }
  }
  return world;
}

inline void pin_world(const World& world, MockOracle& oracle) {
  oracle.set_similarity(world.focus, world.titles[world.root], 0.95);
  for (std::size_t i = 0; i < world.ids.size(); ++i) {
    oracle.set_importance(world.ids[i], world.importance_llm[i]);
    oracle.set_priority(world.titles[i], 0.2 + 0.6 * world.importance_llm[i]);
    if (world.blocked[i]) {
      oracle.set_nli(world.titles[i], world.titles[i],
                     {NliLabel::contradiction, 0.9});
    } else if (world.attr[i] < 1.0) {
      oracle.set_nli(world.titles[i], world.titles[i],
                     {NliLabel::entailment, world.attr[i]});
    }
  }
  std::vector<std::string> pool = world.titles;
  oracle.set_proposals(pool);
  for (const auto& [pair, value] : world.continuation) {
    oracle.set_continuation(world.ids[pair.first], world.ids[pair.second],
                            value);
  }
}

/// Best closed-form reward over root-anchored simple paths along the produced
/// tree's reasoning edges.
inline double best_tree_path_reward(const World& world, const TheTree& tree) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < world.ids.size(); ++i) {
    index[world.ids[i]] = static_cast<int>(i);
  }
  double best = -1.0;
  std::vector<int> path = {world.root};
  // DFS over reasoning edges of the produced tree.
  std::function<void()> walk = [&] {
    best = std::max(best, world.reward_of(path));
    for (const EvolutionEdge* edge :
         tree.out_edges(world.ids[path.back()])) {
      if (edge->kind == RelationKind::cites_plain) continue;
      int next = index.at(edge->target_id);
      bool used = false;
      for (int seen : path) used = used || seen == next;
      if (used) continue;
      path.push_back(next);
      walk();
      path.pop_back();
    }
  };
  walk();
  return best;
}

}  // namespace evotree::testsupport
