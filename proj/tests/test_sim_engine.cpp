#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "wsn/config.hpp"
#include "wsn/errors.hpp"
#include "wsn/report.hpp"

using namespace wsn;
using wsn::testing::fixed_plan;
using wsn::testing::model_for;

namespace {

SimOptions event_opts(long horizon = std::numeric_limits<long>::max()) {
  SimOptions o;
  o.mode = SimMode::event;
  o.horizon_cycles = horizon;
  return o;
}

}  // namespace

TEST(Deploy, DeterministicAndInBounds) {
  const PlanningModel m = model_for(Preset::physical);
  const DeploymentPlan plan = compute_plan(m);
  const Population a = deploy(plan, m.area, 1000, 42, 3);
  const Population b = deploy(plan, m.area, 1000, 42, 3);
  const Population c = deploy(plan, m.area, 1000, 43, 3);
  ASSERT_EQ(a.segments.size(), 10u);
  bool differs = false;
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    const Segment& sa = a.segments[i];
    EXPECT_EQ(static_cast<long>(sa.nodes.size()), plan.node_count[i] + 3);
    EXPECT_EQ(sa.pool.size(), 3u);
    for (std::size_t j = 0; j < sa.nodes.size(); ++j) {
      const Point p = sa.nodes[j].position;
      EXPECT_EQ(p.x, b.segments[i].nodes[j].position.x);
      EXPECT_EQ(p.y, b.segments[i].nodes[j].position.y);
      differs = differs || p.x != c.segments[i].nodes[j].position.x;
      EXPECT_GE(p.x, 10.0 * static_cast<double>(i));
      EXPECT_LE(p.x, 10.0 * static_cast<double>(i + 1));
      EXPECT_GE(p.y, 0.0);
      EXPECT_LE(p.y, 60.0);
      EXPECT_EQ(sa.nodes[j].battery, to_pj(1000));
    }
  }
  EXPECT_TRUE(differs);
  EXPECT_THROW(deploy(plan, m.area, 1000, 1, -1), DomainError);
}

TEST(RunCycle, DeliversKPacketsFaultFree) {
  for (Preset p : {Preset::paper, Preset::physical}) {
    const PlanningModel m = model_for(p);
    NetworkState st = make_network(m, compute_plan(m), 5, event_opts());
    for (int c = 0; c < 30; ++c) {
      const CycleReport r = run_cycle(st);
      EXPECT_EQ(r.delivered, 10);
      EXPECT_EQ(r.chain_collisions, 0);
      EXPECT_EQ(r.overrun_s, 0.0);
    }
  }
}

TEST(NetworkAlive, Cases) {
  const PlanningModel m = model_for(Preset::physical, 3, 1000, 3);
  const DeploymentPlan plan = fixed_plan(m, {6, 6, 6});
  NetworkState st = make_network(m, plan, 1, event_opts());
  EXPECT_TRUE(network_alive(st));

  NetworkState drained = st;
  for (Node& n : drained.segment(2).nodes) n.battery = 0;
  EXPECT_FALSE(network_alive(drained));

  // The window holds serials 0..2; leave only two of the six healthy.
  NetworkState short_one = st;
  for (long j = 0; j < 4; ++j) short_one.segment(3).nodes[static_cast<std::size_t>(j)].battery = 0;
  EXPECT_FALSE(network_alive(short_one));

  NetworkState spare = st;
  for (long j = 3; j < 6; ++j) spare.segment(3).nodes[static_cast<std::size_t>(j)].battery = 0;
  EXPECT_TRUE(network_alive(spare));
}

TEST(Run, FastForwardMatchesEvent) {
  struct Case {
    int K, s;
    std::vector<long> N;
    double E_o;
  };
  const std::vector<Case> cases{
      {1, 1, {3}, 0.004},          {2, 2, {4, 4}, 0.01},       {3, 2, {4, 4, 4}, 0.02},
      {3, 3, {6, 6, 3}, 0.03},     {3, 3, {6, 3, 3}, 0.011},   {2, 3, {6, 6}, 0.05},
      {3, 2, {6, 4, 2}, 0.017},    {3, 1, {5, 3, 2}, 0.009},
  };
  for (const Case& c : cases) {
    for (Preset p : {Preset::paper, Preset::physical}) {
      for (DeathCriterion death : {DeathCriterion::segment_starved, DeathCriterion::first_node_dies}) {
        for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
          const PlanningModel m = model_for(p, c.K, c.E_o, c.s);
          const DeploymentPlan plan = fixed_plan(m, c.N);
          SimOptions o = event_opts();
          o.death = death;
          const SimMetrics ev = run(m, plan, seed, o);
          o.mode = SimMode::fast_forward;
          const SimMetrics ff = run(m, plan, seed, o);
          SCOPED_TRACE(::testing::Message() << "K=" << c.K << " s=" << c.s << " E_o=" << c.E_o
                                          << " " << to_string(p) << " " << to_string(death)
                                          << " seed " << seed);
          EXPECT_GT(ev.cycles_completed, 2L * c.N[0]);
          EXPECT_EQ(ff.achieved_lifetime_s, ev.achieved_lifetime_s);
          EXPECT_EQ(ff.cycles_completed, ev.cycles_completed);
          EXPECT_EQ(ff.residual_pj, ev.residual_pj);
          EXPECT_EQ(ff.death_segment, ev.death_segment);
          EXPECT_GT(ff.cycles_skipped, 0);
        }
      }
    }
  }
}

TEST(Run, LifetimeScalesWithInitialEnergy) {
  for (Preset p : {Preset::paper, Preset::physical}) {
    const PlanningModel m1 = model_for(p, 3, 0.05, 3);
    const PlanningModel m2 = model_for(p, 3, 0.10, 3);
    const DeploymentPlan plan = fixed_plan(m1, {3, 3, 3});
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
      const SimMetrics a = run(m1, plan, seed, event_opts());
      const SimMetrics b = run(m2, plan, seed, event_opts());
      const double round = m1.s * m1.life.T_d;
      EXPECT_NEAR(b.achieved_lifetime_s, 2 * a.achieved_lifetime_s, round + 1e-9)
          << to_string(p) << " seed " << seed;
    }
  }
}

TEST(Run, LedgerBalancesEveryCycle) {
  const PlanningModel m = model_for(Preset::physical, 4, 0.02, 3);
  const DeploymentPlan plan = fixed_plan(m, {9, 9, 6, 6});
  SimOptions o = event_opts();
  o.audit_every_cycle = true;
  o.redundant_per_segment = 2;
  o.faults = {{3, ProtocolPhase::chain, 2, 1, FaultKind::node},
              {8, ProtocolPhase::transfer, 3, 0, FaultKind::link}};
  const SimMetrics r = run(m, plan, 9, o);
  EXPECT_EQ(r.supplied_pj, r.used_pj + r.residual_pj);
  EXPECT_NEAR(r.utilization_eta, static_cast<double>(r.used_pj) / r.supplied_pj, 1e-12);
  EXPECT_GT(r.utilization_eta, 0.5);
  EXPECT_LE(r.utilization_eta, 1.0);

  NetworkState st = make_network(m, plan, 9, event_opts());
  run_cycle(st);
  EXPECT_NO_THROW(audit_ledger(st));
  st.segment(1).nodes[0].battery -= 1;  // a drain with no ledger entry
  EXPECT_THROW(audit_ledger(st), AccountingError);
}

TEST(Run, Deterministic) {
  const PlanningModel m = model_for(Preset::physical, 4, 0.03, 3);
  const DeploymentPlan plan = fixed_plan(m, {6, 6, 6, 3});
  SimOptions o = event_opts();
  o.record_events = true;
  o.redundant_per_segment = 1;
  o.faults = {{2, ProtocolPhase::sensing, 1, 0, FaultKind::node}};
  const SimMetrics a = run(m, plan, 77, o);
  const SimMetrics b = run(m, plan, 77, o);
  EXPECT_EQ(a.achieved_lifetime_s, b.achieved_lifetime_s);
  EXPECT_EQ(a.residual_pj, b.residual_pj);
  EXPECT_EQ(a.energy_used_J, b.energy_used_J);
  EXPECT_EQ(a.delivered_per_cycle, b.delivered_per_cycle);
  ASSERT_FALSE(a.event_log.empty());
  EXPECT_EQ(event_log_table(a.event_log).to_csv(), event_log_table(b.event_log).to_csv());
  EXPECT_EQ(fault_table(a.faults).to_csv(), fault_table(b.faults).to_csv());
}

TEST(Run, TransferCollisionsOnlyBeyondTwoSegments) {
  for (int K : {1, 2}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const PlanningModel m = model_for(Preset::physical, K);
      const SimMetrics r = run(m, compute_plan(m), seed, event_opts(50));
      EXPECT_EQ(r.collision_count, 0) << "K=" << K << " seed " << seed;
    }
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PlanningModel m = model_for(Preset::physical);
    const SimMetrics r = run(m, compute_plan(m), seed, event_opts(20));
    EXPECT_EQ(r.chain_collisions, 0);
    EXPECT_EQ(r.collision_count, r.chain_collisions + r.transfer_collisions);
  }
}

TEST(Run, DeliveredEveryCycleUntilDeath) {
  const PlanningModel m = model_for(Preset::physical, 5, 0.02, 4);
  const DeploymentPlan plan = fixed_plan(m, {8, 8, 8, 4, 4});
  const SimMetrics r = run(m, plan, 3, event_opts());
  ASSERT_EQ(static_cast<long>(r.delivered_per_cycle.size()), r.cycles_completed);
  for (int d : r.delivered_per_cycle) EXPECT_EQ(d, 5);
  EXPECT_EQ(r.delivered_total, 5 * r.cycles_completed);
  EXPECT_NEAR(r.achieved_lifetime_s, r.cycles_completed * m.life.T_d, 1e-9);
}

TEST(Run, FollowersSleepPerTimetable) {
  const PlanningModel m = model_for(Preset::paper);
  NetworkState st = make_network(m, compute_plan(m), 2, event_opts());
  const double target = cycle_duration_min_printed(m) - sleep_time_active(m);
  for (int c = 0; c < 10; ++c) {
    const CycleReport r = run_cycle(st);
    for (const auto& seg : r.segments) {
      for (const auto& [serial, awake] : seg.awake_s) {
        if (serial == seg.leader) continue;
        EXPECT_NEAR(awake, target, m.guard_s() + 1e-9) << "cycle " << c << " serial " << serial;
      }
    }
  }
}

TEST(Run, DriftWithinGuardSlot) {
  for (Preset p : {Preset::paper, Preset::physical}) {
    const PlanningModel m = model_for(p);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      EXPECT_EQ(count_drift_misses(m, 0.2e-3, seed), 0);
    }
    long misses = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) misses += count_drift_misses(m, 0.05, seed);
    EXPECT_GT(misses, 0) << "large drift should break the timetable";
  }
}

TEST(Run, RejectsShortCycle) {
  PlanningModel m = model_for(Preset::paper);
  m.life.T_d = 4.3;
  try {
    run(m, compute_plan(model_for(Preset::paper)), 1, event_opts(1));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "life.T_d_s");
  }
}

TEST(Run, SegmentKLeaderMatchesPlanner) {
  const PlanningModel m = model_for(Preset::physical);
  const SimMetrics r = run(m, compute_plan(m), 4, event_opts(40));
  for (int i = 1; i <= m.K(); ++i) {
    const double planned = leader_cycle_energy(m, i);
    EXPECT_NEAR(r.leader_cycle_energy_J[static_cast<std::size_t>(i - 1)], planned, 0.01 * planned)
        << "segment " << i;
  }
}
