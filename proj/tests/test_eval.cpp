#include "evotree/eval.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

#include "evotree/errors.hpp"
#include "support/builders.hpp"

namespace evotree {
namespace {

using testsupport::citation_edge;
using testsupport::paper;
using testsupport::reasoning_edge;

TEST(MakePrediction, DerivesRankFromPosition) {
  RankedPrediction hit = make_prediction("b", {"a", "b", "c"});
  ASSERT_TRUE(hit.rank_of_target.has_value());
  EXPECT_EQ(*hit.rank_of_target, 2);
  RankedPrediction miss = make_prediction("z", {"a", "b", "c"});
  EXPECT_FALSE(miss.rank_of_target.has_value());
}

TEST(RankMetrics, HandExample) {
  std::vector<RankedPrediction> predictions = {
      make_prediction("a", {"a", "x", "y"}),
      make_prediction("b", {"x", "y", "b"}),
      make_prediction("c", {"1", "2", "3", "4", "5", "6", "c"}),
  };
  MetricsReport report = rank_metrics(predictions, {1, 3, 5});
  EXPECT_NEAR(report.hit_at[1], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(report.hit_at[3], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(report.hit_at[5], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(report.mr, 11.0 / 3.0, 1e-12);
  EXPECT_NEAR(report.mrr, (1.0 + 1.0 / 3.0 + 1.0 / 7.0) / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(report.median_rank, 3.0);
  EXPECT_EQ(report.sample_count, 3u);
}

TEST(RankMetrics, PerfectAndSingle) {
  std::vector<RankedPrediction> perfect = {make_prediction("a", {"a", "b"}),
                                           make_prediction("c", {"c", "d"})};
  MetricsReport report = rank_metrics(perfect, {1, 5});
  EXPECT_DOUBLE_EQ(report.hit_at[1], 1.0);
  EXPECT_DOUBLE_EQ(report.hit_at[5], 1.0);
  EXPECT_DOUBLE_EQ(report.mr, 1.0);
  EXPECT_DOUBLE_EQ(report.mrr, 1.0);

  MetricsReport single =
      rank_metrics({make_prediction("b", {"a", "b"})}, {1, 2});
  EXPECT_DOUBLE_EQ(single.hit_at[1], 0.0);
  EXPECT_DOUBLE_EQ(single.hit_at[2], 1.0);
  EXPECT_DOUBLE_EQ(single.mrr, 0.5);
}

TEST(RankMetrics, MedianOfEvenCountIsMidpoint) {
  std::vector<RankedPrediction> predictions = {
      make_prediction("a", {"a"}),
      make_prediction("b", {"x", "b"}),
      make_prediction("c", {"x", "y", "z", "w", "c"}),
      make_prediction("d", {"x", "y", "z", "w", "v", "u", "t", "s", "d"}),
  };
  // Ranks 1, 2, 5, 9 -> median (2 + 5) / 2.
  EXPECT_DOUBLE_EQ(rank_metrics(predictions, {1}).median_rank, 3.5);
}

TEST(RankMetrics, MissingTargetPolicies) {
  std::vector<RankedPrediction> predictions = {
      make_prediction("a", {"a", "b"}),
      make_prediction("z", {"a", "b"}),  // absent -> pessimistic rank 3
  };
  MetricsReport pessimistic = rank_metrics(predictions, {1});
  EXPECT_DOUBLE_EQ(pessimistic.mr, 2.0);
  EXPECT_EQ(pessimistic.sample_count, 2u);

  MetricsReport dropped =
      rank_metrics(predictions, {1}, MissingRankPolicy::drop);
  EXPECT_DOUBLE_EQ(dropped.mr, 1.0);
  EXPECT_EQ(dropped.sample_count, 1u);

  EXPECT_THROW(rank_metrics({}, {1}), EmptyPredictionsError);
  EXPECT_THROW(rank_metrics({make_prediction("z", {"a"})}, {1},
                            MissingRankPolicy::drop),
               EmptyPredictionsError);
}

TEST(RankMetrics, InvariantsOnRandomInputs) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> rank_dist(1, 20);
  std::uniform_int_distribution<int> count_dist(1, 30);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RankedPrediction> predictions;
    int n = count_dist(rng);
    for (int i = 0; i < n; ++i) {
      int rank = rank_dist(rng);
      std::vector<std::string> candidates;
      for (int j = 1; j < rank; ++j) {
        candidates.push_back("filler" + std::to_string(j));
      }
      candidates.push_back("t");
      predictions.push_back(make_prediction("t", candidates));
    }
    MetricsReport report = rank_metrics(predictions, {1, 2, 3, 5, 10, 25});
    double previous = 0.0;
    for (const auto& [k, value] : report.hit_at) {
      EXPECT_GE(value, previous);
      previous = value;
    }
    EXPECT_DOUBLE_EQ(report.hit_at[25], 1.0);  // all ranks <= 20
    EXPECT_GE(report.mrr, report.hit_at[1]);
    EXPECT_LE(report.mrr, 1.0);
    EXPECT_GE(report.mr, 1.0);
  }
}

TEST(SetMetrics, ReportedPrecisionRecallGiveReportedF1) {
  // 1407 shared items, 2100 predicted, 1675 true: P = 0.67, R = 0.84 exactly.
  std::set<std::string> predicted;
  std::set<std::string> truth;
  for (int i = 0; i < 1407; ++i) {
    predicted.insert("s" + std::to_string(i));
    truth.insert("s" + std::to_string(i));
  }
  for (int i = 0; i < 693; ++i) predicted.insert("p" + std::to_string(i));
  for (int i = 0; i < 268; ++i) truth.insert("t" + std::to_string(i));
  SetMetrics metrics = set_metrics(predicted, truth);
  EXPECT_NEAR(metrics.precision, 0.67, 1e-12);
  EXPECT_NEAR(metrics.recall, 0.84, 1e-12);
  EXPECT_NEAR(metrics.f1, 2.0 * 0.67 * 0.84 / (0.67 + 0.84), 1e-12);
  EXPECT_NEAR(metrics.f1, 0.75, 0.005);
}

TEST(SetMetrics, IdentityAndDisjoint) {
  std::set<std::string> items = {"a", "b", "c"};
  SetMetrics same = set_metrics(items, items);
  EXPECT_DOUBLE_EQ(same.precision, 1.0);
  EXPECT_DOUBLE_EQ(same.recall, 1.0);
  EXPECT_DOUBLE_EQ(same.f1, 1.0);

  SetMetrics none = set_metrics({"x", "y"}, items);
  EXPECT_DOUBLE_EQ(none.precision, 0.0);
  EXPECT_DOUBLE_EQ(none.recall, 0.0);
  EXPECT_DOUBLE_EQ(none.f1, 0.0);

  EXPECT_THROW(set_metrics(items, {}), EmptyTruthError);
}

TEST(SetMetrics, SwapExchangesPrecisionAndRecall) {
  std::mt19937_64 rng(22);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::set<std::string> a, b;
    for (int i = 0; i < 20; ++i) {
      if (coin(rng)) a.insert("i" + std::to_string(i));
      if (coin(rng)) b.insert("i" + std::to_string(i));
    }
    if (a.empty() || b.empty()) continue;
    SetMetrics forward = set_metrics(a, b);
    SetMetrics backward = set_metrics(b, a);
    EXPECT_DOUBLE_EQ(forward.precision, backward.recall);
    EXPECT_DOUBLE_EQ(forward.recall, backward.precision);
    EXPECT_DOUBLE_EQ(forward.f1, backward.f1);
  }
}

TEST(SetMetrics, TimeDiffIsMeanAbsoluteYears) {
  std::set<std::string> items = {"a"};
  std::vector<std::pair<int, int>> pairs = {{2020, 2018}, {2019, 2020}};
  SetMetrics metrics = set_metrics(items, items, pairs);
  ASSERT_TRUE(metrics.avg_time_diff.has_value());
  EXPECT_DOUBLE_EQ(*metrics.avg_time_diff, 1.5);
}

TEST(AvgTemporalInterval, HandExamples) {
  TheTree tree("t");
  tree.add_node(paper("a", 2000));
  tree.add_node(paper("b", 2001));
  tree.add_node(paper("c", 2003));
  tree.add_node(paper("d", 2009));
  tree.add_edge(reasoning_edge("a", "b"));  // delta 1
  tree.add_edge(reasoning_edge("b", "c"));  // delta 2
  tree.add_edge(reasoning_edge("c", "d"));  // delta 6
  EXPECT_DOUBLE_EQ(avg_temporal_interval(tree), 3.0);

  TheTree single("s");
  single.add_node(paper("a", 2000));
  single.add_node(paper("b", 2004));
  single.add_edge(reasoning_edge("a", "b"));
  EXPECT_DOUBLE_EQ(avg_temporal_interval(single), 4.0);

  TheTree flat("f");
  flat.add_node(paper("a", 2000));
  flat.add_node(paper("b", 2000));
  flat.add_edge(reasoning_edge("a", "b"));
  EXPECT_DOUBLE_EQ(avg_temporal_interval(flat), 0.0);
}

TEST(AvgTemporalInterval, CitationEdgesDoNotCount) {
  TheTree tree("t");
  tree.add_node(paper("a", 2000));
  tree.add_node(paper("b", 2005));
  tree.add_edge(citation_edge("a", "b"));
  EXPECT_THROW(avg_temporal_interval(tree), NoEdgesError);
}

TheTree three_year_tree() {
  TheTree tree("t");
  tree.add_node(paper("p18a", 2018));
  tree.add_node(paper("p18b", 2018));
  tree.add_node(paper("p19", 2019));
  tree.add_node(paper("p20", 2020));
  tree.add_edge(reasoning_edge("p18a", "p19"));
  tree.add_edge(reasoning_edge("p19", "p20"));
  tree.add_edge(citation_edge("p18b", "p20"));
  return tree;
}

TEST(MaskByYear, PartitionsHistoryAndTargets) {
  MaskResult masked = mask_by_year(three_year_tree(), 2020);
  EXPECT_EQ(masked.history.nodes().size(), 3u);
  ASSERT_EQ(masked.history.edges().size(), 1u);
  EXPECT_EQ(masked.history.edges()[0].target_id, "p19");
  ASSERT_EQ(masked.targets.size(), 1u);
  EXPECT_EQ(masked.targets[0].node.id, "p20");
  // Both the reasoning edge from p19 and the citation from p18b reach p20.
  EXPECT_EQ(masked.targets[0].incident_edges.size(), 2u);
  EXPECT_TRUE(masked.history.validate().empty());
}

TEST(MaskByYear, MinYearLeavesEmptyHistory) {
  MaskResult masked = mask_by_year(three_year_tree(), 2018);
  EXPECT_TRUE(masked.history.nodes().empty());
  EXPECT_EQ(masked.targets.size(), 2u);
  EXPECT_EQ(masked.targets[0].node.id, "p18a");
  EXPECT_TRUE(masked.targets[0].incident_edges.empty());
}

TEST(MaskByYear, AbsentYearRejected) {
  EXPECT_THROW(mask_by_year(three_year_tree(), 2021), NoTargetsError);
}

TEST(ReviewAccuracy, HandExamples) {
  ReviewCounts counts;
  counts.accept = {9, 10};   // 0.9
  counts.reject = {2, 10};   // 0.2
  ReviewProportions proportions;
  proportions.p_accept = 0.3;
  proportions.p_reject = 0.7;
  ReviewTotals totals = review_accuracy(counts, proportions);
  EXPECT_NEAR(totals.total_accept_reject, 0.41, 1e-12);

  ReviewCounts status_counts;
  status_counts.accept = {10, 10};
  status_counts.reject = {10, 10};  // Rej% = 1
  status_counts.statuses["poster"] = {10, 10};
  status_counts.statuses["spotlight"] = {0, 10};
  status_counts.statuses["oral"] = {0, 10};
  ReviewProportions status_props;
  status_props.p_accept = 0.5;
  status_props.p_reject = 0.5;
  status_props.status_given_accept = {
      {"poster", 0.8}, {"spotlight", 0.15}, {"oral", 0.05}};
  ReviewTotals status_totals = review_accuracy(status_counts, status_props);
  EXPECT_NEAR(status_totals.total_status, 0.9, 1e-12);
}

TEST(ReviewAccuracy, PerfectClassifier) {
  ReviewCounts counts;
  counts.accept = {25, 25};
  counts.reject = {75, 75};
  counts.statuses["poster"] = {20, 20};
  counts.statuses["oral"] = {5, 5};
  ReviewProportions proportions;
  proportions.p_accept = 0.25;
  proportions.p_reject = 0.75;
  proportions.status_given_accept = {{"poster", 0.8}, {"oral", 0.2}};
  ReviewTotals totals = review_accuracy(counts, proportions);
  EXPECT_DOUBLE_EQ(totals.total_accept_reject, 1.0);
  EXPECT_DOUBLE_EQ(totals.total_status, 1.0);
}

TEST(ReviewAccuracy, InconsistentInputsRejected) {
  ReviewCounts counts;
  counts.accept = {5, 10};
  counts.reject = {5, 10};
  ReviewProportions proportions;
  proportions.p_accept = 0.6;
  proportions.p_reject = 0.6;  // sums to 1.2
  EXPECT_THROW(review_accuracy(counts, proportions),
               InconsistentProportionsError);

  proportions.p_reject = 0.4;
  counts.accept = {11, 10};  // correct > total
  EXPECT_THROW(review_accuracy(counts, proportions),
               InconsistentProportionsError);

  counts.accept = {5, 10};
  proportions.status_given_accept = {{"poster", 0.5}, {"oral", 0.1}};
  counts.statuses["poster"] = {1, 2};
  counts.statuses["oral"] = {1, 2};
  EXPECT_THROW(review_accuracy(counts, proportions),
               InconsistentProportionsError);  // statuses sum to 0.6
}

// With empirical proportions, the weighted totals must equal plain
// correct-over-N accuracy on the underlying population.
TEST(ReviewAccuracy, MatchesBruteForcePopulationAccuracy) {
  std::mt19937_64 rng(23);
  const std::vector<std::string> kStatuses = {"poster", "spotlight", "oral"};
  std::uniform_int_distribution<int> status_pick(0, 3);  // 3 = reject
  std::bernoulli_distribution correct_coin(0.6);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 200;
    ReviewCounts counts;
    long correct_binary = 0;
    long correct_status = 0;
    long accepted = 0;
    std::map<std::string, long> per_status;
    for (int i = 0; i < n; ++i) {
      int actual = status_pick(rng);
      bool predicted_right = correct_coin(rng);
      if (actual == 3) {
        counts.reject.total += 1;
        if (predicted_right) {
          counts.reject.correct += 1;
          correct_binary += 1;
          correct_status += 1;
        }
        continue;
      }
      accepted += 1;
      const std::string& status = kStatuses[actual];
      per_status[status] += 1;
      counts.accept.total += 1;
      counts.statuses[status].total += 1;
      // Treat binary accept-prediction as right whenever the fine status is.
      if (predicted_right) {
        counts.accept.correct += 1;
        counts.statuses[status].correct += 1;
        correct_binary += 1;
        correct_status += 1;
      }
    }
    if (accepted == 0 || counts.reject.total == 0) continue;
    ReviewProportions proportions;
    proportions.p_accept = static_cast<double>(accepted) / n;
    proportions.p_reject = static_cast<double>(counts.reject.total) / n;
    for (const auto& [status, count] : per_status) {
      proportions.status_given_accept[status] =
          static_cast<double>(count) / static_cast<double>(accepted);
    }
    ReviewTotals totals = review_accuracy(counts, proportions);
    EXPECT_NEAR(totals.total_accept_reject,
                static_cast<double>(correct_binary) / n, 1e-12);
    EXPECT_NEAR(totals.total_status, static_cast<double>(correct_status) / n,
                1e-12);
  }
}

PaperNode titled(const std::string& id, int year, const std::string& title) {
  PaperNode node = paper(id, year);
  node.title = title;
  return node;
}

TEST(CompareGraphs, IdenticalGraphsGiveIdenticalReports) {
  TheTree tree = three_year_tree();
  MockOracle oracle(3);
  GraphComparison comparison =
      compare_graphs(tree, tree, baseline_ranker(oracle), {2019, 2020});
  EXPECT_EQ(comparison.reasoning, comparison.citation);
  EXPECT_EQ(comparison.reasoning.sample_count, 2u);
}

TEST(CompareGraphs, ReasoningContextBeatsUninformativeCitations) {
  // Shared universe; the reasoning graph links each target to its true
  // predecessor while the citation graph crosses the pairs.
  auto nodes = [] {
    return std::vector<PaperNode>{
        titled("h1", 2018, "alpha decoding methods"),
        titled("h2", 2018, "beta compression codec"),
        titled("t1", 2019, "alpha decoding improved"),
        titled("t2", 2019, "beta compression refined"),
    };
  };
  TheTree reasoning("topic");
  TheTree citation("topic");
  for (const PaperNode& node : nodes()) {
    reasoning.add_node(node);
    citation.add_node(node);
  }
  reasoning.add_edge(reasoning_edge("h1", "t1"));
  reasoning.add_edge(reasoning_edge("h2", "t2"));
  citation.add_edge(citation_edge("h1", "t2"));
  citation.add_edge(citation_edge("h2", "t1"));

  MockOracle oracle(4);
  GraphComparison comparison =
      compare_graphs(reasoning, citation, baseline_ranker(oracle), {2019});
  EXPECT_DOUBLE_EQ(comparison.reasoning.hit_at[1], 1.0);
  EXPECT_DOUBLE_EQ(comparison.citation.hit_at[1], 0.0);
  EXPECT_GT(comparison.reasoning.hit_at[1], comparison.citation.hit_at[1]);
}

TEST(CompareGraphs, EmptyYearListGivesEmptyReport) {
  TheTree tree = three_year_tree();
  MockOracle oracle(5);
  GraphComparison comparison =
      compare_graphs(tree, tree, baseline_ranker(oracle), {});
  EXPECT_EQ(comparison.reasoning.sample_count, 0u);
  EXPECT_TRUE(comparison.reasoning.hit_at.empty());
}

TEST(CompareGraphs, DifferentUniversesRejected) {
  TheTree a("t");
  a.add_node(paper("x", 2000));
  TheTree b("t");
  b.add_node(paper("y", 2000));
  MockOracle oracle(6);
  EXPECT_THROW(compare_graphs(a, b, baseline_ranker(oracle), {2000}),
               std::invalid_argument);
}

}  // namespace
}  // namespace evotree
