#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evotree/oracle.hpp"
#include "evotree/tree.hpp"

namespace evotree {

struct RankedPrediction {
  std::string target_id;
  std::vector<std::string> ranked_candidates;
  std::optional<int> rank_of_target;  // 1-based position when present
};

/// Builds a prediction with rank_of_target derived from the candidate list.
RankedPrediction make_prediction(std::string target_id,
                                 std::vector<std::string> ranked_candidates);

struct MetricsReport {
  std::map<int, double> hit_at;
  double mr = 0.0;
  double mrr = 0.0;
  double median_rank = 0.0;
  std::size_t sample_count = 0;

  bool operator==(const MetricsReport&) const = default;
};

/// What to do with predictions whose target never appears in the candidate
/// list: score them at |candidates| + 1, or drop them from the aggregate.
enum class MissingRankPolicy { pessimistic, drop };

/// hit@k / MR / MRR / median over the predictions. Median of an even count
/// is the midpoint of the two middle ranks.
MetricsReport rank_metrics(const std::vector<RankedPrediction>& predictions,
                           const std::vector<int>& ks,
                           MissingRankPolicy policy = MissingRankPolicy::pessimistic);

struct SetMetrics {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;  // 0 when precision + recall == 0
  std::optional<double> avg_time_diff;  // mean |year_pred - year_truth|

  bool operator==(const SetMetrics&) const = default;
};

SetMetrics set_metrics(
    const std::set<std::string>& predicted, const std::set<std::string>& truth,
    const std::optional<std::vector<std::pair<int, int>>>& time_pairs =
        std::nullopt);

/// Mean year delta over the tree's reasoning edges (evolves_into / enables);
/// plain citation edges do not describe evolutionary pace and are skipped.
double avg_temporal_interval(const TheTree& tree);

struct MaskedTarget {
  PaperNode node;
  std::vector<EvolutionEdge> incident_edges;  // edges from history into node
};

struct MaskResult {
  TheTree history;                    // strictly-earlier subgraph
  std::vector<MaskedTarget> targets;  // nodes at the masked year, by id
};

MaskResult mask_by_year(const TheTree& tree, int year);

// --- review accuracy -------------------------------------------------------

struct StatusCounts {
  long correct = 0;  // predictions matching the actual status
  long total = 0;    // papers with that actual status
};

struct ReviewCounts {
  StatusCounts accept;  // binary accept-vs-reject confusion, actual-accept row
  StatusCounts reject;  // actual-reject row
  std::map<std::string, StatusCounts> statuses;  // per accepted status
};

struct ReviewProportions {
  double p_accept = 0.0;  // share of actually-accepted papers
  double p_reject = 0.0;
  std::map<std::string, double> status_given_accept;
};

struct ReviewTotals {
  double total_accept_reject = 0.0;
  double total_status = 0.0;
};

/// Weighted overall accuracies:
///   total_accept_reject = P(acc)*Acc% + P(rej)*Rej%
///   total_status = P(acc) * sum_s P(s|acc)*Acc_s% + P(rej)*Rej%
/// Accuracies come from the confusion counts; proportions are supplied
/// separately (population rates, not necessarily the sample's).
ReviewTotals review_accuracy(const ReviewCounts& counts,
                             const ReviewProportions& proportions);

// --- graph comparison ------------------------------------------------------

/// Orders candidate ids best-first for one masked target. `context_ids` are
/// the history-side endpoints of the target's true edges; candidates are the
/// masked year's nodes.
using Ranker = std::function<std::vector<std::string>(
    const TheTree& history, const std::vector<std::string>& context_ids,
    const std::vector<PaperNode>& candidates)>;

/// Baseline: similarity of each candidate to the context nodes plus a small
/// importance prior, ties by id. Desk-scale stand-in for model rankers.
Ranker baseline_ranker(Oracle& oracle);

struct GraphComparison {
  MetricsReport reasoning;
  MetricsReport citation;
};

/// Masks each listed year on both graphs, ranks every target with `ranker`,
/// and aggregates one report per graph. Both graphs must cover the same
/// node ids. An empty year list yields empty reports.
GraphComparison compare_graphs(const TheTree& tree_reasoning,
                               const TheTree& tree_citation,
                               const Ranker& ranker,
                               const std::vector<int>& years,
                               const std::vector<int>& ks = {1, 3, 5, 10});

}  // namespace evotree
