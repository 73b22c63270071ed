#include "effiara/simulator.h"

#include <cmath>

#include "effiara/agreement.h"
#include "effiara/errors.h"
#include "effiara/reliability.h"
#include "gtest/gtest.h"

namespace effiara {
namespace {

SimScenario perfect_scenario(std::uint64_t seed) {
  SimScenario scenario = standard_scenario(seed);
  for (auto& a : scenario.annotators) {
    a.accuracy = 1.0;
    a.consistency = 1.0;
  }
  return scenario;
}

TEST(Simulate, PerfectAnnotatorsAgreeFully) {
  const SimulationResult sim = simulate_campaign(perfect_scenario(1));
  AnnotatorGraph graph = build_graph(sim.store);
  for (const auto& [key, edge] : graph.edges()) EXPECT_EQ(edge.agreement, 1.0);
  for (const auto& [id, node] : graph.nodes()) EXPECT_EQ(*node.intra_agreement, 1.0);
  const ReliabilityResult result = compute_reliability(graph, ReliabilityConfig{});
  for (const auto& [id, r] : result.reliabilities) EXPECT_EQ(r, 1.0) << id;
}

TEST(Simulate, ChanceAnnotatorsAgreeAtChance) {
  double total = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SimScenario scenario = standard_scenario(seed);
    scenario.class_prior = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    for (auto& a : scenario.annotators) a.accuracy = 1.0 / 3.0;
    const SimulationResult sim = simulate_campaign(scenario);
    const AnnotatorGraph graph = build_graph(sim.store);
    for (const auto& [key, edge] : graph.edges()) {
      total += edge.agreement;
      ++count;
    }
  }
  EXPECT_NEAR(total / count, 0.0, 0.05);
}

TEST(Simulate, Deterministic) {
  const SimulationResult a = simulate_campaign(standard_scenario(77));
  const SimulationResult b = simulate_campaign(standard_scenario(77));
  EXPECT_EQ(a.store, b.store);
  EXPECT_EQ(a.ground_truth, b.ground_truth);
  EXPECT_EQ(a.plan, b.plan);
  const SimulationResult c = simulate_campaign(standard_scenario(78));
  EXPECT_FALSE(a.store == c.store);
}

TEST(Simulate, StandardScenarioShape) {
  const SimScenario scenario = standard_scenario(0);
  EXPECT_EQ(compute_sample_count(scenario.campaign), 600);
  const SimulationResult sim = simulate_campaign(scenario);
  EXPECT_TRUE(verify_plan(sim.plan).ok);
  // 6 x (single + re + two double projects); each double project counted twice.
  const auto& sizes = sim.plan.sizes;
  const std::size_t expected =
      6 * (sizes.single_project + sizes.reannotation + 4 * sizes.double_project);
  EXPECT_EQ(sim.store.size(), expected);
  for (const auto& [sample, truth] : sim.ground_truth) EXPECT_LT(truth, 3u);
  EXPECT_EQ(sim.samples.size(), sim.ground_truth.size());
}

TEST(Simulate, PlansAlwaysVerify) {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    SimScenario scenario = standard_scenario(seed);
    scenario.campaign.double_prop = 0.1 + 0.08 * static_cast<double>(seed - 100);
    scenario.campaign.reanno_prop = 0.05 * static_cast<double>(seed - 100);
    const SimulationResult sim = simulate_campaign(scenario);
    const PlanReport report = verify_plan(sim.plan);
    EXPECT_TRUE(report.ok) << ::testing::PrintToString(report.violations);
  }
}

TEST(Simulate, SecondaryOnlyOnLowConfidence) {
  const SimulationResult sim = simulate_campaign(standard_scenario(9));
  for (const Annotation& a : sim.store.annotations()) {
    if (a.secondary) {
      EXPECT_LE(a.confidence, 3);
      EXPECT_NE(*a.secondary, a.primary);
    } else {
      EXPECT_GT(a.confidence, 3);
    }
  }
}

TEST(Simulate, InvalidScenario) {
  SimScenario scenario = standard_scenario(1);
  scenario.annotators.pop_back();
  EXPECT_THROW(simulate_campaign(scenario), ValidationError);
  scenario = standard_scenario(1);
  scenario.class_prior = {0.5, 0.5, 0.5};
  EXPECT_THROW(simulate_campaign(scenario), ValidationError);
  scenario = standard_scenario(1);
  scenario.annotators[0].accuracy = 0.0;
  EXPECT_THROW(simulate_campaign(scenario), ValidationError);
}

TEST(Spearman, ExtremesAndTies) {
  const std::vector<double> a = {1, 2, 3, 4};
  const std::vector<double> b = {10, 20, 30, 40};
  const std::vector<double> rev = {4, 3, 2, 1};
  EXPECT_NEAR(spearman_rho(a, b), 1.0, 1e-12);
  EXPECT_NEAR(spearman_rho(a, rev), -1.0, 1e-12);
  const std::vector<double> flat = {1, 1, 1, 1};
  EXPECT_EQ(spearman_rho(a, flat), 0.0);
  // Ties get average ranks: ranks (1, 2.5, 2.5, 4) vs (1, 2, 3, 4).
  const std::vector<double> tied = {1, 2, 2, 4};
  EXPECT_NEAR(spearman_rho(a, tied), 0.9486832980505138, 1e-12);
}

TEST(Recovery, ProportionalAndReversed) {
  const SimScenario scenario = standard_scenario(0);
  std::map<std::string, double> proportional;
  std::map<std::string, double> reversed;
  for (const auto& a : scenario.annotators) {
    proportional[a.id] = 2.0 * a.accuracy;
    reversed[a.id] = 1.0 - a.accuracy;
  }
  EXPECT_NEAR(evaluate_recovery(proportional, scenario), 1.0, 1e-12);
  EXPECT_NEAR(evaluate_recovery(reversed, scenario), -1.0, 1e-12);
  proportional.erase("a3");
  EXPECT_THROW(evaluate_recovery(proportional, scenario), ValidationError);
}

TEST(Recovery, BestAnnotatorBeatsWorstOnAverage) {
  double best = 0.0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RecoveryRun run = run_recovery(standard_scenario(seed), ReliabilityConfig{});
    best += run.reliability.reliabilities.at("a1");
    worst += run.reliability.reliabilities.at("a6");
  }
  EXPECT_GT(best, worst);
}

TEST(ScenarioJson, RoundTripAndDefaults) {
  const SimScenario scenario = standard_scenario(123);
  EXPECT_EQ(scenario_from_json(scenario_to_json(scenario)), scenario);
  const SimScenario minimal = scenario_from_json(R"({
    "campaign": {"num_annotators": 5, "time_per_annotator": 2, "annotation_rate": 60,
                 "double_prop": 0.5, "reanno_prop": 0.5, "max_confidence": 5},
    "labels": ["yes", "no"],
    "class_prior": [0.5, 0.5],
    "annotators": [{"id": "p", "accuracy": 0.9}, {"id": "q", "accuracy": 0.8},
                   {"id": "r", "accuracy": 0.7}, {"id": "s", "accuracy": 0.6},
                   {"id": "t", "accuracy": 0.99}]
  })");
  EXPECT_EQ(minimal.annotators.size(), 5u);
  EXPECT_EQ(minimal.annotators[0].confidence, ConfidenceModel::standard(5));
  EXPECT_NO_THROW(simulate_campaign(minimal));
  EXPECT_THROW(scenario_from_json("{}"), ValidationError);
}

}  // namespace
}  // namespace effiara
