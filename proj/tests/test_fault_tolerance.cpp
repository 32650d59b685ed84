#include <gtest/gtest.h>

#include "wsn/errors.hpp"
#include "wsn/fault_tolerance.hpp"

using namespace wsn;

namespace {

RedundancySpec unit_spec() {
  RedundancySpec r;
  r.c = 1;
  r.d = 1;
  r.connected_outer = 1;
  r.tau = 1;
  r.n_active = 1;
  r.t_total_sense = 100;
  r.e_node = 10;
  r.t_between = 10;
  return r;
}

LinkEvents failed_link(BeaconOutcome beacon, bool third = true, double silence = 0) {
  LinkEvents ev;
  ev.transmitter = {3, 7};
  ev.receiver = {2, 4};
  ev.failed_attempts = 10;
  ev.max_attempts = 10;
  ev.third_neighbor_available = third;
  ev.beacon = beacon;
  ev.receiver_silence_s = silence;
  ev.guard_slot_s = 0.0512;
  return ev;
}

}  // namespace

TEST(RedundantCount, Examples) {
  EXPECT_EQ(redundant_count(unit_spec()), 1);
  RedundancySpec r = unit_spec();
  r.t_total_sense = 0;
  EXPECT_EQ(redundant_count(r), 0);
  r = unit_spec();
  r.t_total_sense = 1000;
  EXPECT_EQ(redundant_count(r), 10);
  r.e_node = 20;
  EXPECT_EQ(redundant_count(r), 5);
  r.t_total_sense = 1010;  // 5.05 rounds up
  EXPECT_EQ(redundant_count(r), 6);
}

TEST(RedundantCount, Errors) {
  RedundancySpec r = unit_spec();
  r.e_node = 0;
  EXPECT_THROW(redundant_count(r), DomainError);
  r = unit_spec();
  r.t_between = 0;
  EXPECT_THROW(redundant_count(r), DomainError);
  r = unit_spec();
  r.c = -1;
  EXPECT_THROW(redundant_count(r), DomainError);
}

TEST(RedundantCount, Monotone) {
  RedundancySpec r = unit_spec();
  long prev = -1;
  for (int k = 0; k < 200; ++k) {
    r.t_total_sense = 37.0 * k;
    const long n = redundant_count(r);
    EXPECT_GE(n, prev);
    prev = n;
  }
  r = unit_spec();
  r.t_total_sense = 5000;
  prev = 1L << 40;
  for (int k = 1; k < 200; ++k) {
    r.e_node = 0.5 * k;
    const long n = redundant_count(r);
    EXPECT_LE(n, prev);
    prev = n;
  }
}

TEST(DetectFailure, BeaconFailsBlamesTransmitter) {
  const FaultDiagnosis d = detect_failure(failed_link(BeaconOutcome::failed));
  EXPECT_EQ(d.verdict, Verdict::transmitter_failed);
  EXPECT_EQ(d.suspect, (NodeRef{3, 7}));
  EXPECT_EQ(d.detector, (NodeRef{2, 4}));
  EXPECT_EQ(d.retries, 10);
  EXPECT_FALSE(d.degraded);
}

TEST(DetectFailure, BeaconSucceedsBlamesReceiverOrLink) {
  const FaultDiagnosis d = detect_failure(failed_link(BeaconOutcome::succeeded));
  EXPECT_EQ(d.verdict, Verdict::receiver_or_link_failed);
  EXPECT_EQ(d.suspect, (NodeRef{2, 4}));
  EXPECT_EQ(d.detector, (NodeRef{3, 7}));
}

TEST(DetectFailure, ReceiverTimeout) {
  EXPECT_NEAR(receiver_timeout(10, 2 * 512 / 20000.0), 0.512, 1e-12);
  const FaultDiagnosis d =
      detect_failure(failed_link(BeaconOutcome::not_attempted, false, 0.512));
  EXPECT_TRUE(d.degraded);
  EXPECT_TRUE(d.receiver_timer_expired);
  EXPECT_EQ(d.verdict, Verdict::transmitter_failed);
  EXPECT_EQ(d.suspect, (NodeRef{3, 7}));
}

TEST(DetectFailure, Errors) {
  EXPECT_THROW(detect_failure(failed_link(BeaconOutcome::not_attempted, false, 0.3)),
               DomainError);
  LinkEvents ev = failed_link(BeaconOutcome::failed);
  ev.failed_attempts = 9;
  EXPECT_THROW(detect_failure(ev), DomainError);
  ev.max_attempts = 0;
  EXPECT_THROW(detect_failure(ev), DomainError);
  EXPECT_EQ(to_string(Verdict::transmitter_failed), "transmitter_failed");
}

TEST(Substitute, Rules) {
  EXPECT_FALSE(substitute({0, 0}, {}).has_value());
  const std::vector<SubstituteCandidate> one{{12, {5, 5}}};
  EXPECT_EQ(substitute({0, 0}, one), 12);
  const std::vector<SubstituteCandidate> tied{{9, {1, 0}}, {4, {-1, 0}}, {2, {3, 0}}};
  EXPECT_EQ(substitute({0, 0}, tied), 4);
  const std::vector<SubstituteCandidate> near{{1, {9, 9}}, {8, {0.5, 0}}};
  EXPECT_EQ(substitute({0, 0}, near), 8);
}
