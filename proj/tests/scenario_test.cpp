#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gpack/experiment.hpp"
#include "gpack/scenario.hpp"

using namespace gpack;

namespace {

json minimal_doc() {
  json doc;
  doc["cluster"]["machines"] = json::array({json{{"slots", 2}}});
  doc["job_types"] = json::array({json{{"nodes", 1}, {"arrival_rate", 1.0}}});
  return doc;
}

std::string error_message(const json& doc) {
  try {
    load_scenario(doc);
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected the scenario to be rejected";
  return "";
}

testing::AssertionResult contains(const std::string& hay, const std::string& needle) {
  if (hay.find(needle) != std::string::npos) return testing::AssertionSuccess();
  return testing::AssertionFailure() << "missing '" << needle << "' in:\n" << hay;
}

std::size_t count_lines(const std::string& msg) {
  std::size_t n = 0;
  for (std::size_t at = msg.find("\n  - "); at != std::string::npos;
       at = msg.find("\n  - ", at + 1))
    ++n;
  return n;
}

}  // namespace

TEST(ScenarioDefaults, MinimalDocumentFillsEveryDefault) {
  Scenario s = load_scenario(minimal_doc());
  EXPECT_EQ(s.name, "scenario");
  EXPECT_EQ(s.cluster.total_slots(), 2);
  ASSERT_EQ(s.jobs.size(), 1u);
  EXPECT_EQ(s.jobs[0].id, 0);
  EXPECT_EQ(s.jobs[0].node_count, 1);
  EXPECT_DOUBLE_EQ(s.jobs[0].arrival_rate, 1.0);
  EXPECT_DOUBLE_EQ(s.jobs[0].service_rate, 1.0);

  EXPECT_EQ(s.policy.variant, PolicyVariant::Dgp);
  EXPECT_EQ(s.policy.mode, WeightMode::Live);
  const SchedulerParams& p = s.policy.params;
  EXPECT_DOUBLE_EQ(p.beta, 0.5);
  EXPECT_DOUBLE_EQ(p.alpha, 0.25);  // tracks beta^2 when not given
  EXPECT_DOUBLE_EQ(p.epsilon, 0.1);
  EXPECT_DOUBLE_EQ(p.h, std::exp(1.0));
  EXPECT_DOUBLE_EQ(p.b, 0.5);
  EXPECT_DOUBLE_EQ(p.frame_length, 1.0);
  EXPECT_DOUBLE_EQ(p.clock_base_rate, 1.0);

  EXPECT_EQ(s.engine, "continuous");
  EXPECT_DOUBLE_EQ(s.horizon, 1000.0);
  EXPECT_EQ(s.steps, 100000u);
  EXPECT_EQ(s.seeds, std::vector<std::uint64_t>{1});
  EXPECT_DOUBLE_EQ(s.warmup_fraction, 0.1);
  EXPECT_EQ(s.max_states, 100000u);
  EXPECT_TRUE(s.track_occupancy);
  EXPECT_TRUE(s.sweep.empty());
}

TEST(ScenarioDefaults, ScalarSeedAndExplicitAlphaAreHonored) {
  json doc = minimal_doc();
  doc["seed"] = 9;
  doc["policy"] = json{{"beta", 0.25}, {"alpha", 0.7}};
  Scenario s = load_scenario(doc);
  EXPECT_EQ(s.seeds, std::vector<std::uint64_t>{9});
  EXPECT_DOUBLE_EQ(s.policy.params.beta, 0.25);
  EXPECT_DOUBLE_EQ(s.policy.params.alpha, 0.7);
}

TEST(ScenarioValidation, CollectsEveryViolationInOneThrow) {
  json doc;
  doc["surprise"] = 1;
  doc["cluster"]["machines"] = json::array({
      json{{"id", 0}, {"slots", 4}},
      json{{"id", 0}, {"slots", 2}},
      json{{"id", 2}, {"slots", 0}},
  });
  doc["job_types"] =
      json::array({json{{"nodes", 1}, {"edges", json::array({json::array({0})})}}});
  doc["policy"] = json{{"variant", "greedy"}, {"weights", "frozen"}, {"mystery", 1}};
  doc["engine"] = "discrete";
  doc["warmup_fraction"] = 1.5;
  doc["sweep"] = json{{"gamma", json::array({1.0})},
                      {"preset", true},
                      {"alpha", json::array({0.1})}};

  std::string msg = error_message(doc);
  EXPECT_TRUE(contains(msg, "scenario validation failed:"));
  EXPECT_TRUE(contains(msg, "scenario: unknown key 'surprise'"));
  EXPECT_TRUE(contains(msg, "cluster.machines[2]: slots must be >= 1"));
  EXPECT_TRUE(contains(msg, "cluster.machines[1]: duplicate machine id"));
  EXPECT_TRUE(contains(msg, "job_types[0].edges: entries must be [u, v] or [u, v, weight]"));
  EXPECT_TRUE(contains(msg, "policy: unknown key 'mystery'"));
  EXPECT_TRUE(contains(msg, "policy.variant: must be dgp, adgp, frame or round-robin"));
  EXPECT_TRUE(contains(msg, "policy.weights: must be live or fixed"));
  EXPECT_TRUE(contains(msg, "engine: must be continuous, jump or loss"));
  EXPECT_TRUE(contains(msg, "warmup_fraction: must lie in [0, 1)"));
  EXPECT_TRUE(contains(msg, "sweep: unknown key 'gamma'"));
  EXPECT_TRUE(contains(msg, "sweep.preset: needs a beta list to derive from"));
  EXPECT_TRUE(contains(msg, "sweep.preset: alpha/epsilon/h are derived and cannot also be swept"));
  EXPECT_EQ(count_lines(msg), 12u);
}

TEST(ScenarioValidation, JumpChainRefusesClockAndFrameVariants) {
  json doc = minimal_doc();
  doc["engine"] = "jump";
  doc["policy"] = json{{"variant", "adgp"}};
  EXPECT_TRUE(contains(error_message(doc),
                       "engine: the jump chain supports only dgp and round-robin policies"));
  doc["policy"] = json{{"variant", "frame"}};
  EXPECT_TRUE(contains(error_message(doc), "jump chain supports only"));
  doc["policy"] = json{{"variant", "round-robin"}};
  EXPECT_NO_THROW(load_scenario(doc));
}

TEST(ScenarioValidation, BadKnobsStepsAndSeeds) {
  json doc = minimal_doc();
  doc["policy"] = json{{"beta", -1.0}};
  EXPECT_TRUE(contains(error_message(doc), "beta must be > 0"));

  doc = minimal_doc();
  doc["steps"] = 0;
  EXPECT_TRUE(contains(error_message(doc), "steps: must be a positive integer"));
  doc["steps"] = -5;
  EXPECT_TRUE(contains(error_message(doc), "steps: must be a positive integer"));

  doc = minimal_doc();
  doc["seeds"] = json::array();
  EXPECT_TRUE(contains(error_message(doc), "seeds: must be a nonempty array"));

  doc = minimal_doc();
  doc["horizon"] = -1.0;
  EXPECT_TRUE(contains(error_message(doc), "horizon: must be >= 0"));
}

TEST(FixedWeights, PerTypeNeedsOneValuePerType) {
  json doc = minimal_doc();
  doc["job_types"].push_back(json{{"id", 1}, {"nodes", 1}});
  doc["policy"] = json{{"weights", "fixed"},
                       {"fixed_weights", json{{"per_type", json::array({0.5})}}}};
  EXPECT_TRUE(
      contains(error_message(doc), "fixed_weights.per_type: need one value per job type"));

  doc["policy"]["fixed_weights"]["per_type"] = json::array({0.5, 1.5});
  Scenario s = load_scenario(doc);
  EXPECT_EQ(s.policy.mode, WeightMode::Fixed);
  EXPECT_EQ(s.policy.fixed_per_type, (std::vector<double>{0.5, 1.5}));

  doc["policy"].erase("fixed_weights");
  EXPECT_TRUE(contains(error_message(doc), "fixed_weights: required when weights = fixed"));

  doc["policy"]["fixed_weights"] = json::object();
  EXPECT_TRUE(contains(error_message(doc), "fixed_weights: need per_type or table"));
}

namespace {

// one machine, two slots, a single-node type with the external id 7
json table_doc() {
  json doc;
  doc["cluster"]["machines"] = json::array({json{{"id", 0}, {"slots", 2}}});
  doc["job_types"] = json::array({json{{"id", 7}, {"nodes", 1}, {"arrival_rate", 1.0}}});
  json rows = json::array(
      {json{{"type", 7}, {"assignment", json::array({json::array({0, 0})})}, {"weight", 0.25}},
       json{{"type", 7}, {"assignment", json::array({json::array({0, 1})})}, {"weight", 0.75}}});
  doc["policy"] = json{{"variant", "dgp"},
                       {"weights", "fixed"},
                       {"fixed_weights", json{{"table", rows}}}};
  return doc;
}

}  // namespace

TEST(FixedWeights, TableRowsMapExternalIdsToPlacements) {
  Scenario s = load_scenario(table_doc());
  ASSERT_EQ(s.policy.fixed_table.size(), 2u);
  EXPECT_DOUBLE_EQ(s.policy.fixed_table.at({0, std::vector<int>{0}}), 0.25);
  EXPECT_DOUBLE_EQ(s.policy.fixed_table.at({0, std::vector<int>{1}}), 0.75);
}

TEST(FixedWeights, TableRowsAreCheckedPieceByPiece) {
  json doc = table_doc();
  doc["policy"]["fixed_weights"]["table"][0]["type"] = 9;
  EXPECT_TRUE(contains(error_message(doc), "unknown job type id 9"));

  doc = table_doc();
  doc["policy"]["fixed_weights"]["table"][0]["assignment"] = json::array({json::array({0})});
  EXPECT_TRUE(contains(error_message(doc), "entries must be [machine, slot]"));

  doc = table_doc();
  doc["policy"]["fixed_weights"]["table"][0]["assignment"] =
      json::array({json::array({0, 5})});
  EXPECT_TRUE(contains(error_message(doc), "slot 5 out of range on machine 0"));

  doc = table_doc();
  doc["policy"]["fixed_weights"]["table"][0].erase("weight");
  EXPECT_TRUE(contains(error_message(doc), "need type, assignment and weight"));
}

TEST(FixedWeights, TableMustCoverEveryFeasiblePlacement) {
  json doc = table_doc();
  doc["policy"]["fixed_weights"]["table"].erase(1);
  std::string msg = error_message(doc);
  std::string needle = "no weight for a feasible placement of job type 7";
  EXPECT_TRUE(contains(msg, needle));
  // the missing-placement message is reported once per type, not per placement
  std::size_t first = msg.find(needle);
  EXPECT_EQ(msg.find(needle, first + 1), std::string::npos);
}

TEST(FixedWeights, TableCoverageRespectsTheStateBudget) {
  json doc;
  doc["cluster"]["machines"] = json::array({json{{"slots", 2}}, json{{"slots", 2}}});
  doc["job_types"] = json::array(
      {json{{"nodes", 3},
            {"edges", json::array({json::array({0, 1}), json::array({1, 2})})},
            {"arrival_rate", 0.5}}});
  json row = json{{"type", 0},
                  {"assignment", json::array({json::array({0, 0}), json::array({0, 1}),
                                              json::array({1, 0})})},
                  {"weight", 1.0}};
  doc["policy"] = json{{"weights", "fixed"},
                       {"fixed_weights", json{{"table", json::array({row})}}}};
  doc["max_states"] = 10;
  EXPECT_TRUE(contains(error_message(doc), "too many to cover explicitly (max_states = 10)"));
}

TEST(FixedWeights, ClockVariantRejectsTables) {
  json doc = table_doc();
  doc["policy"]["variant"] = "adgp";
  EXPECT_TRUE(contains(error_message(doc),
                       "per-type queue terms, not per-template tables"));
}

TEST(ScenarioRoundTrip, LoadDumpLoadPreservesEverything) {
  json doc;
  doc["name"] = "roundtrip";
  doc["cluster"]["machines"] =
      json::array({json{{"id", 3}, {"slots", 2}}, json{{"id", 5}, {"slots", 1}}});
  doc["job_types"] = json::array(
      {json{{"id", 2}, {"nodes", 1}, {"arrival_rate", 0.4}, {"service_rate", 2.0}},
       json{{"id", 4},
            {"nodes", 2},
            {"edges", json::array({json::array({0, 1, 2.5})})},
            {"arrival_rate", 0.3}}});
  doc["policy"] = json{{"variant", "adgp"},
                       {"weights", "fixed"},
                       {"beta", 0.25},
                       {"alpha", 0.3},
                       {"clock_base_rate", 2.0},
                       {"fixed_weights", json{{"per_type", json::array({0.5, -1.0})}}}};
  doc["engine"] = "continuous";
  doc["horizon"] = 250.0;
  doc["steps"] = 7500;
  doc["seeds"] = json::array({4, 8});
  doc["warmup_fraction"] = 0.2;
  doc["max_states"] = 500;
  doc["track_occupancy"] = false;
  doc["sweep"] = json{{"beta", json::array({0.5, 0.25})}, {"h", json::array({3.0, 5.0})}};

  Scenario a = load_scenario(doc);
  Scenario b = load_scenario(scenario_to_json(a));

  EXPECT_EQ(b.name, a.name);
  ASSERT_EQ(b.cluster.machines().size(), a.cluster.machines().size());
  for (std::size_t i = 0; i < a.cluster.machines().size(); ++i) {
    EXPECT_EQ(b.cluster.machines()[i].id, a.cluster.machines()[i].id);
    EXPECT_EQ(b.cluster.machines()[i].slot_count, a.cluster.machines()[i].slot_count);
  }
  ASSERT_EQ(b.jobs.size(), a.jobs.size());
  for (std::size_t j = 0; j < a.jobs.size(); ++j) {
    EXPECT_EQ(b.jobs[j].id, a.jobs[j].id);
    EXPECT_EQ(b.jobs[j].node_count, a.jobs[j].node_count);
    EXPECT_DOUBLE_EQ(b.jobs[j].arrival_rate, a.jobs[j].arrival_rate);
    EXPECT_DOUBLE_EQ(b.jobs[j].service_rate, a.jobs[j].service_rate);
    ASSERT_EQ(b.jobs[j].edges.size(), a.jobs[j].edges.size());
    for (std::size_t e = 0; e < a.jobs[j].edges.size(); ++e) {
      EXPECT_EQ(b.jobs[j].edges[e].u, a.jobs[j].edges[e].u);
      EXPECT_EQ(b.jobs[j].edges[e].v, a.jobs[j].edges[e].v);
      EXPECT_DOUBLE_EQ(b.jobs[j].edges[e].weight, a.jobs[j].edges[e].weight);
    }
  }
  EXPECT_EQ(b.policy.variant, a.policy.variant);
  EXPECT_EQ(b.policy.mode, a.policy.mode);
  EXPECT_DOUBLE_EQ(b.policy.params.beta, a.policy.params.beta);
  EXPECT_DOUBLE_EQ(b.policy.params.alpha, a.policy.params.alpha);
  EXPECT_DOUBLE_EQ(b.policy.params.epsilon, a.policy.params.epsilon);
  EXPECT_DOUBLE_EQ(b.policy.params.h, a.policy.params.h);
  EXPECT_DOUBLE_EQ(b.policy.params.b, a.policy.params.b);
  EXPECT_DOUBLE_EQ(b.policy.params.frame_length, a.policy.params.frame_length);
  EXPECT_DOUBLE_EQ(b.policy.params.clock_base_rate, a.policy.params.clock_base_rate);
  EXPECT_EQ(b.policy.fixed_per_type, a.policy.fixed_per_type);
  EXPECT_EQ(b.engine, a.engine);
  EXPECT_DOUBLE_EQ(b.horizon, a.horizon);
  EXPECT_EQ(b.steps, a.steps);
  EXPECT_EQ(b.seeds, a.seeds);
  EXPECT_DOUBLE_EQ(b.warmup_fraction, a.warmup_fraction);
  EXPECT_EQ(b.max_states, a.max_states);
  EXPECT_EQ(b.track_occupancy, a.track_occupancy);
  EXPECT_EQ(b.sweep.beta, a.sweep.beta);
  EXPECT_EQ(b.sweep.alpha, a.sweep.alpha);
  EXPECT_EQ(b.sweep.h, a.sweep.h);
  EXPECT_EQ(b.sweep.preset, a.sweep.preset);
}

TEST(ScenarioRoundTrip, FixedTablesSurviveTheCycle) {
  Scenario a = load_scenario(table_doc());
  Scenario b = load_scenario(scenario_to_json(a));
  EXPECT_EQ(b.policy.fixed_table, a.policy.fixed_table);
}

TEST(ExpandSweep, EmptySweepYieldsTheBasePoint) {
  json doc = minimal_doc();
  doc["policy"] = json{{"beta", 0.75}, {"alpha", 0.3}};
  Scenario s = load_scenario(doc);
  auto points = expand_sweep(s);
  ASSERT_EQ(points.size(), 1u);
  EXPECT_DOUBLE_EQ(points[0].beta, 0.75);
  EXPECT_DOUBLE_EQ(points[0].alpha, 0.3);
  EXPECT_DOUBLE_EQ(points[0].epsilon, 0.1);
}

TEST(ExpandSweep, AlphaTracksBetaOnlyWhenNotSweptItself) {
  json doc = minimal_doc();
  doc["sweep"] = json{{"beta", json::array({1.0, 0.5, 0.25})}};
  auto points = expand_sweep(load_scenario(doc));
  ASSERT_EQ(points.size(), 3u);
  EXPECT_DOUBLE_EQ(points[0].alpha, 1.0);
  EXPECT_DOUBLE_EQ(points[1].alpha, 0.25);
  EXPECT_DOUBLE_EQ(points[2].alpha, 0.0625);

  doc["sweep"]["alpha"] = json::array({0.3});
  points = expand_sweep(load_scenario(doc));
  ASSERT_EQ(points.size(), 3u);
  for (const auto& p : points) EXPECT_DOUBLE_EQ(p.alpha, 0.3);

  // an h-only sweep keeps the base alpha rather than re-deriving it
  doc = minimal_doc();
  doc["policy"] = json{{"alpha", 0.4}};
  doc["sweep"] = json{{"h", json::array({3.0, 5.0})}};
  points = expand_sweep(load_scenario(doc));
  ASSERT_EQ(points.size(), 2u);
  EXPECT_DOUBLE_EQ(points[0].alpha, 0.4);
  EXPECT_DOUBLE_EQ(points[0].h, 3.0);
  EXPECT_DOUBLE_EQ(points[1].h, 5.0);
}

TEST(ExpandSweep, CrossProductIteratesBetaOutermost) {
  json doc = minimal_doc();
  doc["sweep"] = json{{"beta", json::array({0.5, 0.25})},
                      {"epsilon", json::array({0.1, 0.2})},
                      {"h", json::array({3.0, 5.0})}};
  auto points = expand_sweep(load_scenario(doc));
  ASSERT_EQ(points.size(), 8u);
  const double expect[8][3] = {{0.5, 0.1, 3.0},  {0.5, 0.1, 5.0},  {0.5, 0.2, 3.0},
                               {0.5, 0.2, 5.0},  {0.25, 0.1, 3.0}, {0.25, 0.1, 5.0},
                               {0.25, 0.2, 3.0}, {0.25, 0.2, 5.0}};
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_DOUBLE_EQ(points[i].beta, expect[i][0]) << i;
    EXPECT_DOUBLE_EQ(points[i].epsilon, expect[i][1]) << i;
    EXPECT_DOUBLE_EQ(points[i].h, expect[i][2]) << i;
    EXPECT_DOUBLE_EQ(points[i].alpha, expect[i][0] * expect[i][0]) << i;
  }
}

TEST(ExpandSweep, PresetDerivesTheCoupledKnobs) {
  json doc = minimal_doc();
  doc["policy"] = json{{"clock_base_rate", 2.0}};
  doc["sweep"] = json{{"preset", true},
                      {"beta", json::array({0.5, 0.25})},
                      {"frame_length", json::array({1.0, 10.0})}};
  auto points = expand_sweep(load_scenario(doc));
  ASSERT_EQ(points.size(), 4u);
  const double betas[4] = {0.5, 0.5, 0.25, 0.25};
  const double frames[4] = {1.0, 10.0, 1.0, 10.0};
  for (std::size_t i = 0; i < 4; ++i) {
    SchedulerParams want = preset_from_beta(betas[i], 0.5);
    EXPECT_DOUBLE_EQ(points[i].beta, want.beta) << i;
    EXPECT_DOUBLE_EQ(points[i].alpha, want.alpha) << i;
    EXPECT_DOUBLE_EQ(points[i].epsilon, want.epsilon) << i;
    EXPECT_DOUBLE_EQ(points[i].h, want.h) << i;
    EXPECT_DOUBLE_EQ(points[i].frame_length, frames[i]) << i;
    EXPECT_DOUBLE_EQ(points[i].clock_base_rate, 2.0) << i;
  }
}

namespace {

json demo_doc(double horizon = 60.0) {
  json doc = minimal_doc();
  doc["name"] = "demo";
  doc["horizon"] = horizon;
  doc["seeds"] = json::array({1, 2, 3});
  return doc;
}

}  // namespace

TEST(Experiment, RunsEverySeedAndAggregatesPerPoint) {
  ExperimentResult r = run_experiment(load_scenario(demo_doc()));
  ASSERT_EQ(r.runs.size(), 3u);
  ASSERT_EQ(r.aggregates.size(), 1u);
  EXPECT_TRUE(r.occupancy_tracked);
  EXPECT_EQ(r.reference, "");  // live weights have no frozen stationary law

  double qsum = 0, csum = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const RunRecord& run = r.runs[i];
    EXPECT_EQ(run.scenario_id, "demo");
    EXPECT_EQ(run.policy, "dgp");
    EXPECT_EQ(run.engine, "continuous");
    EXPECT_DOUBLE_EQ(run.beta, 0.5);
    EXPECT_EQ(run.seed, i + 1);
    ASSERT_EQ(run.avg_queue.size(), 1u);
    EXPECT_FALSE(run.tv_to_reference.has_value());
    qsum += run.total_queue();
    csum += run.avg_cost;
  }
  const AggregateRecord& agg = r.aggregates[0];
  EXPECT_EQ(agg.n_runs, 3u);
  EXPECT_DOUBLE_EQ(agg.mean_queue, qsum / 3.0);
  EXPECT_DOUBLE_EQ(agg.mean_cost, csum / 3.0);
  EXPECT_GE(agg.queue_halfwidth, 0.0);
}

TEST(Experiment, SweepPointsGetTheirOwnAggregates) {
  json doc = demo_doc();
  doc["sweep"] = json{{"beta", json::array({0.5, 0.25})}};
  ExperimentResult r = run_experiment(load_scenario(doc));
  ASSERT_EQ(r.runs.size(), 6u);
  ASSERT_EQ(r.aggregates.size(), 2u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(r.runs[i].beta, 0.5);
  for (std::size_t i = 3; i < 6; ++i) EXPECT_DOUBLE_EQ(r.runs[i].beta, 0.25);
  EXPECT_DOUBLE_EQ(r.aggregates[0].beta, 0.5);
  EXPECT_DOUBLE_EQ(r.aggregates[1].beta, 0.25);
  EXPECT_DOUBLE_EQ(r.aggregates[1].alpha, 0.0625);
}

TEST(Experiment, LossRunsCompareAgainstTheFreeProcess) {
  json doc = demo_doc(2000.0);
  doc["engine"] = "loss";
  ExperimentResult r = run_experiment(load_scenario(doc));
  EXPECT_EQ(r.reference, "free-process");
  ASSERT_EQ(r.runs.size(), 3u);
  for (const RunRecord& run : r.runs) {
    ASSERT_TRUE(run.tv_to_reference.has_value());
    EXPECT_GE(*run.tv_to_reference, 0.0);
    EXPECT_LT(*run.tv_to_reference, 0.2);
  }
}

TEST(Experiment, FixedWeightRunsCompareAgainstTheTiltedLaw) {
  json doc = demo_doc(2000.0);
  doc["policy"] = json{{"weights", "fixed"},
                       {"fixed_weights", json{{"per_type", json::array({0.0})}}}};
  ExperimentResult r = run_experiment(load_scenario(doc));
  EXPECT_EQ(r.reference, "tilted-stationary");
  for (const RunRecord& run : r.runs) {
    ASSERT_TRUE(run.tv_to_reference.has_value());
    EXPECT_GE(*run.tv_to_reference, 0.0);
    EXPECT_LT(*run.tv_to_reference, 0.5);
  }
}

TEST(Experiment, UntrackedRunsLeaveTheGapColumnEmpty) {
  json doc = demo_doc();
  doc["engine"] = "loss";
  doc["track_occupancy"] = false;
  ExperimentResult r = run_experiment(load_scenario(doc));
  EXPECT_FALSE(r.occupancy_tracked);
  EXPECT_EQ(r.reference, "");
  for (const RunRecord& run : r.runs) EXPECT_FALSE(run.tv_to_reference.has_value());

  // a state budget too small for the space falls back to the same untracked run
  doc["track_occupancy"] = true;
  doc["max_states"] = 2;
  r = run_experiment(load_scenario(doc));
  EXPECT_FALSE(r.occupancy_tracked);
  for (const RunRecord& run : r.runs) EXPECT_FALSE(run.tv_to_reference.has_value());
}

TEST(Csv, RunRowsFollowTheGoldenShape) {
  RunRecord a;
  a.scenario_id = "demo";
  a.policy = "dgp";
  a.engine = "continuous";
  a.beta = 0.5;
  a.alpha = 0.25;
  a.epsilon = 0.1;
  a.h = 2.718281828459045;
  a.frame_length = 1.0;
  a.seed = 7;
  a.avg_queue = {1.5, 0.25};
  a.avg_cost = 0.125;
  a.interruptions = 2;
  a.drops = 0;
  a.tv_to_reference = 0.03125;
  RunRecord b = a;
  b.seed = 8;
  b.tv_to_reference.reset();

  std::ostringstream out;
  write_runs_csv(out, {a, b});
  EXPECT_EQ(out.str(),
            "scenario_id,policy,engine,beta,alpha,epsilon,h,T,seed,avg_queue_per_type,"
            "avg_cost,interruptions,drops,tv_to_reference\n"
            "demo,dgp,continuous,0.5,0.25,0.1,2.71828182846,1,7,1.5;0.25,0.125,2,0,0.03125\n"
            "demo,dgp,continuous,0.5,0.25,0.1,2.71828182846,1,8,1.5;0.25,0.125,2,0,\n");
}

TEST(Csv, AggregateRowsFollowTheGoldenShape) {
  AggregateRecord a;
  a.scenario_id = "demo";
  a.policy = "frame";
  a.engine = "continuous";
  a.beta = 0.25;
  a.alpha = 0.0625;
  a.epsilon = 0.1;
  a.h = 4.0;
  a.frame_length = 10.0;
  a.n_runs = 5;
  a.mean_queue = 2.5;
  a.queue_halfwidth = 0.5;
  a.mean_cost = 0.75;
  a.cost_halfwidth = 0.0625;
  a.mean_interruptions = 12.0;
  a.mean_drops = 0.0;

  std::ostringstream out;
  write_aggregates_csv(out, {a});
  EXPECT_EQ(out.str(),
            "scenario_id,policy,engine,beta,alpha,epsilon,h,T,n_runs,mean_queue,"
            "queue_halfwidth,mean_cost,cost_halfwidth,mean_interruptions,mean_drops\n"
            "demo,frame,continuous,0.25,0.0625,0.1,4,10,5,2.5,0.5,0.75,0.0625,12,0\n");
}

TEST(Csv, ReportsAreByteStableAcrossRuns) {
  Scenario s = load_scenario(demo_doc(300.0));
  ExperimentResult r1 = run_experiment(s);
  ExperimentResult r2 = run_experiment(s);
  std::ostringstream a1, a2, b1, b2;
  write_runs_csv(a1, r1.runs);
  write_runs_csv(a2, r2.runs);
  write_aggregates_csv(b1, r1.aggregates);
  write_aggregates_csv(b2, r2.aggregates);
  EXPECT_EQ(a1.str(), a2.str());
  EXPECT_EQ(b1.str(), b2.str());
  EXPECT_GT(a1.str().size(), std::string(kRunsCsvHeader).size() + 3);
}

TEST(TraceIo, JsonlRoundTripsExactly) {
  json doc = demo_doc(150.0);
  doc["seeds"] = json::array({1, 2});
  Scenario s = load_scenario(doc);
  ExperimentResult r = run_experiment(s, /*collect_traces=*/true);
  ASSERT_EQ(r.traces.size(), 2u);
  EXPECT_EQ(r.traces[0].first, "demo_b0.5_s1");
  EXPECT_EQ(r.traces[1].first, "demo_b0.5_s2");
  const std::vector<TraceRecord>& trace = r.traces[0].second;
  ASSERT_GT(trace.size(), 10u);

  std::ostringstream out;
  write_trace_jsonl(out, trace);
  std::istringstream in(out.str());
  std::vector<TraceRecord> back = parse_trace_jsonl(in);
  EXPECT_EQ(back, trace);

  // and the parsed trace still reproduces the run's report bit for bit
  MetricsReport again = summarize_trace(back, s.jobs.size(), s.policy.params.h,
                                        s.policy.params.b, s.horizon, s.warmup_fraction);
  std::ostringstream c1, c2;
  write_runs_csv(c1, {r.runs[0]});
  RunRecord rec = r.runs[0];
  rec.avg_queue = again.avg_queue_warm;
  rec.avg_cost = again.avg_cost_warm;
  write_runs_csv(c2, {rec});
  EXPECT_EQ(c1.str(), c2.str());
}

TEST(TraceIo, MalformedLinesAreRejectedWithTheLineNumber) {
  json doc = demo_doc(50.0);
  Scenario s = load_scenario(doc);
  ExperimentResult r = run_experiment(s, /*collect_traces=*/true);
  ASSERT_FALSE(r.traces.empty());
  std::ostringstream out;
  write_trace_jsonl(out, r.traces[0].second);

  std::string good = out.str();
  std::string first_line = good.substr(0, good.find('\n') + 1);

  std::istringstream bad1(first_line + "not json\n");
  try {
    parse_trace_jsonl(bad1);
    FAIL() << "expected a parse error";
  } catch (const MalformedTraceError& e) {
    EXPECT_TRUE(contains(e.what(), "trace line 2"));
  }

  std::istringstream bad2("{\"time\": 0.5}\n");
  try {
    parse_trace_jsonl(bad2);
    FAIL() << "expected a parse error";
  } catch (const MalformedTraceError& e) {
    EXPECT_TRUE(contains(e.what(), "trace line 1"));
    EXPECT_TRUE(contains(e.what(), "missing fields"));
  }

  // blank lines are tolerated
  std::istringstream sparse(first_line + "\n" + first_line);
  EXPECT_EQ(parse_trace_jsonl(sparse).size(), 2u);
}
