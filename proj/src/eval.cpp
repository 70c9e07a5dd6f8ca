#include "evotree/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "evotree/errors.hpp"

namespace evotree {
namespace {

bool is_reasoning(const EvolutionEdge& edge) {
  return edge.kind != RelationKind::cites_plain;
}

double checked_accuracy(const StatusCounts& counts, double proportion,
                        const std::string& what) {
  if (counts.correct < 0 || counts.total < 0 || counts.correct > counts.total) {
    throw InconsistentProportionsError("invalid confusion counts for " + what);
  }
  if (counts.total == 0) {
    if (proportion > 0.0) {
      throw InconsistentProportionsError(
          what + " has probability mass but no observations");
    }
    return 0.0;
  }
  return static_cast<double>(counts.correct) /
         static_cast<double>(counts.total);
}

}  // namespace

RankedPrediction make_prediction(std::string target_id,
                                 std::vector<std::string> ranked_candidates) {
  RankedPrediction prediction;
  prediction.target_id = std::move(target_id);
  prediction.ranked_candidates = std::move(ranked_candidates);
  for (std::size_t i = 0; i < prediction.ranked_candidates.size(); ++i) {
    if (prediction.ranked_candidates[i] == prediction.target_id) {
      prediction.rank_of_target = static_cast<int>(i) + 1;
      break;
    }
  }
  return prediction;
}

MetricsReport rank_metrics(const std::vector<RankedPrediction>& predictions,
                           const std::vector<int>& ks,
                           MissingRankPolicy policy) {
  std::vector<int> ranks;
  for (const RankedPrediction& prediction : predictions) {
    if (prediction.rank_of_target.has_value()) {
      ranks.push_back(*prediction.rank_of_target);
    } else if (policy == MissingRankPolicy::pessimistic) {
      ranks.push_back(static_cast<int>(prediction.ranked_candidates.size()) + 1);
    }
  }
  if (ranks.empty()) {
    throw EmptyPredictionsError("rank_metrics needs at least one prediction");
  }
  MetricsReport report;
  report.sample_count = ranks.size();
  const double n = static_cast<double>(ranks.size());
  for (int k : ks) {
    long hits = std::count_if(ranks.begin(), ranks.end(),
                              [k](int rank) { return rank <= k; });
    report.hit_at[k] = static_cast<double>(hits) / n;
  }
  report.mr = std::accumulate(ranks.begin(), ranks.end(), 0.0) / n;
  report.mrr = std::accumulate(ranks.begin(), ranks.end(), 0.0,
                               [](double acc, int rank) {
                                 return acc + 1.0 / static_cast<double>(rank);
                               }) /
               n;
  std::sort(ranks.begin(), ranks.end());
  std::size_t mid = ranks.size() / 2;
  report.median_rank = ranks.size() % 2 == 1
                           ? static_cast<double>(ranks[mid])
                           : (static_cast<double>(ranks[mid - 1]) +
                              static_cast<double>(ranks[mid])) /
                                 2.0;
  return report;
}

SetMetrics set_metrics(
    const std::set<std::string>& predicted, const std::set<std::string>& truth,
    const std::optional<std::vector<std::pair<int, int>>>& time_pairs) {
  if (truth.empty()) {
    throw EmptyTruthError("set_metrics requires a non-empty truth set");
  }
  std::size_t common = 0;
  for (const std::string& item : predicted) common += truth.count(item);
  SetMetrics metrics;
  metrics.recall =
      static_cast<double>(common) / static_cast<double>(truth.size());
  metrics.precision =
      predicted.empty()
          ? 0.0
          : static_cast<double>(common) / static_cast<double>(predicted.size());
  double denom = metrics.precision + metrics.recall;
  metrics.f1 = denom > 0.0 ? 2.0 * metrics.precision * metrics.recall / denom
                           : 0.0;
  if (time_pairs.has_value() && !time_pairs->empty()) {
    double total = 0.0;
    for (const auto& [year_pred, year_truth] : *time_pairs) {
      total += std::abs(year_pred - year_truth);
    }
    metrics.avg_time_diff = total / static_cast<double>(time_pairs->size());
  }
  return metrics;
}

double avg_temporal_interval(const TheTree& tree) {
  double total = 0.0;
  std::size_t count = 0;
  for (const EvolutionEdge& edge : tree.edges()) {
    if (!is_reasoning(edge)) continue;
    total += tree.node(edge.target_id).year - tree.node(edge.source_id).year;
    ++count;
  }
  if (count == 0) {
    throw NoEdgesError("avg_temporal_interval requires reasoning edges");
  }
  return total / static_cast<double>(count);
}

MaskResult mask_by_year(const TheTree& tree, int year) {
  MaskResult result;
  result.history = TheTree(tree.topic(), tree.horizon_year());
  bool found = false;
  for (const auto& [id, node] : tree.nodes()) {
    if (node.year < year) {
      result.history.add_node(node);
    } else if (node.year == year) {
      found = true;
      result.targets.push_back({node, {}});
    }
  }
  if (!found) {
    throw NoTargetsError("no node published in " + std::to_string(year));
  }
  for (const EvolutionEdge& edge : tree.edges()) {
    bool source_in_history = result.history.has_node(edge.source_id);
    if (source_in_history && result.history.has_node(edge.target_id)) {
      result.history.add_edge(edge);
      continue;
    }
    if (!source_in_history) continue;
    for (MaskedTarget& target : result.targets) {
      if (target.node.id == edge.target_id) {
        target.incident_edges.push_back(edge);
        break;
      }
    }
  }
  return result;
}

ReviewTotals review_accuracy(const ReviewCounts& counts,
                             const ReviewProportions& proportions) {
  auto bounded = [](double value, const std::string& what) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw InconsistentProportionsError(what + " must lie in [0,1]");
    }
    return value;
  };
  bounded(proportions.p_accept, "p_accept");
  bounded(proportions.p_reject, "p_reject");
  if (std::abs(proportions.p_accept + proportions.p_reject - 1.0) > 1e-9) {
    throw InconsistentProportionsError("accept/reject proportions must sum to 1");
  }
  double accept_accuracy =
      checked_accuracy(counts.accept, proportions.p_accept, "actual-accept");
  double reject_accuracy =
      checked_accuracy(counts.reject, proportions.p_reject, "actual-reject");

  ReviewTotals totals;
  totals.total_accept_reject = proportions.p_accept * accept_accuracy +
                               proportions.p_reject * reject_accuracy;

  double status_sum = 0.0;
  double share_sum = 0.0;
  for (const auto& [status, share] : proportions.status_given_accept) {
    bounded(share, "P(" + status + "|accept)");
    share_sum += share;
    auto it = counts.statuses.find(status);
    if (it == counts.statuses.end()) {
      if (share > 0.0) {
        throw InconsistentProportionsError("no confusion counts for status " +
                                           status);
      }
      continue;
    }
    status_sum += share * checked_accuracy(it->second, share, status);
  }
  if (!proportions.status_given_accept.empty() &&
      std::abs(share_sum - 1.0) > 1e-9) {
    throw InconsistentProportionsError(
        "status proportions within accept must sum to 1");
  }
  totals.total_status = proportions.p_accept * status_sum +
                        proportions.p_reject * reject_accuracy;
  return totals;
}

Ranker baseline_ranker(Oracle& oracle) {
  return [&oracle](const TheTree& history,
                   const std::vector<std::string>& context_ids,
                   const std::vector<PaperNode>& candidates) {
    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(candidates.size());
    for (const PaperNode& candidate : candidates) {
      double score = 0.0;
      for (const std::string& context_id : context_ids) {
        score += oracle.similarity(node_statement(history.node(context_id)),
                                   node_statement(candidate));
      }
      if (candidate.importance.has_value()) {
        score += 0.1 * candidate.importance->combined;
      }
      scored.emplace_back(score, candidate.id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    std::vector<std::string> out;
    out.reserve(scored.size());
    for (const auto& [score, id] : scored) out.push_back(id);
    return out;
  };
}

namespace {

MetricsReport evaluate_graph(const TheTree& tree, const Ranker& ranker,
                             const std::vector<int>& years,
                             const std::vector<int>& ks) {
  std::vector<RankedPrediction> predictions;
  for (int year : years) {
    MaskResult masked = mask_by_year(tree, year);
    std::vector<PaperNode> candidates;
    for (const MaskedTarget& target : masked.targets) {
      candidates.push_back(target.node);
    }
    for (const MaskedTarget& target : masked.targets) {
      std::set<std::string> context;
      for (const EvolutionEdge& edge : target.incident_edges) {
        context.insert(edge.source_id);
      }
      std::vector<std::string> context_ids(context.begin(), context.end());
      predictions.push_back(make_prediction(
          target.node.id, ranker(masked.history, context_ids, candidates)));
    }
  }
  if (predictions.empty()) return {};
  return rank_metrics(predictions, ks);
}

}  // namespace

GraphComparison compare_graphs(const TheTree& tree_reasoning,
                               const TheTree& tree_citation,
                               const Ranker& ranker,
                               const std::vector<int>& years,
                               const std::vector<int>& ks) {
  auto ids_of = [](const TheTree& tree) {
    std::set<std::string> ids;
    for (const auto& [id, node] : tree.nodes()) ids.insert(id);
    return ids;
  };
  if (ids_of(tree_reasoning) != ids_of(tree_citation)) {
    throw std::invalid_argument(
        "compare_graphs requires the same node universe on both sides");
  }
  GraphComparison comparison;
  comparison.reasoning = evaluate_graph(tree_reasoning, ranker, years, ks);
  comparison.citation = evaluate_graph(tree_citation, ranker, years, ks);
  return comparison;
}

}  // namespace evotree
