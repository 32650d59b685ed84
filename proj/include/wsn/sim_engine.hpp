#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wsn/deployment_planner.hpp"
#include "wsn/fault_tolerance.hpp"
#include "wsn/geometry.hpp"
#include "wsn/schedule.hpp"

namespace wsn {

// Batteries and the ledger are kept in integer picojoules so that whole
// Sets can be skipped by multiplication without drifting from a
// cycle-by-cycle run.
using Picojoules = std::int64_t;

Picojoules to_pj(double joules);
inline double to_joules(Picojoules pj) { return static_cast<double>(pj) * 1e-12; }

enum class NodeState { sensing, transmitting, receiving, idle, sleeping, failed };

struct Node {
  int segment = 0;   // 1..K
  long serial = 0;   // S[i][j]; redundant nodes continue after N_i - 1
  Point position;
  Picojoules battery = 0;
  Picojoules used = 0;
  NodeState state = NodeState::sleeping;
  bool redundant = false;
  bool failed = false;  // known to the network (diagnosed or depleted)

  double battery_J() const { return to_joules(battery); }
};

struct Segment {
  int index = 0;
  long scheduled = 0;                     // N_i
  std::vector<Node> nodes;                // indexed by serial
  std::vector<long> logical_to_physical;  // serial slot -> node currently filling it
  std::vector<long> pool;                 // unused redundant serials, ascending
  bool starved = false;
};

struct Population {
  std::vector<Segment> segments;  // index 0 is segment 1
};

/// Scatters N_i scheduled nodes (plus `redundant_per_segment` spares) uniformly
/// over each segment rectangle [(i-1)b, ib] x [0, a]. Deterministic in seed.
Population deploy(const DeploymentPlan& plan, const AreaSpec& area, double initial_energy_J,
                  std::uint64_t seed, long redundant_per_segment = 0);

enum class ProtocolPhase { sensing, chain, transfer };
enum class FaultKind { node, link };
enum class DeathCriterion { segment_starved, first_node_dies };
enum class SimMode { event, fast_forward };

std::string_view to_string(ProtocolPhase p);
std::string_view to_string(FaultKind k);
std::string_view to_string(DeathCriterion d);
std::string_view to_string(SimMode m);

// A node (kind=node) dies, or the next link it transmits over breaks
// (kind=link), at the start of `phase` in `cycle`.
struct FaultSpec {
  long cycle = 0;
  ProtocolPhase phase = ProtocolPhase::sensing;
  int segment = 1;
  long serial = 0;
  FaultKind kind = FaultKind::node;
};

struct SimOptions {
  SimMode mode = SimMode::event;
  DeathCriterion death = DeathCriterion::segment_starved;
  long horizon_cycles = std::numeric_limits<long>::max();
  long redundant_per_segment = 0;
  int max_attempts = 10;  // m
  bool record_events = false;
  bool audit_every_cycle = false;  // recount the energy ledger after each cycle
  std::vector<FaultSpec> faults;
};

struct EventRecord {
  double time_s = 0;
  int segment = 0;
  long serial = 0;
  std::string event;
  double energy_uJ = 0;
  double battery_J = 0;
};

struct FaultRecord {
  long cycle = 0;
  ProtocolPhase phase = ProtocolPhase::sensing;
  FaultDiagnosis diagnosis;
  NodeRef failed;                     // node taken out of service
  std::optional<long> substitute;     // redundant serial that took over
  bool injected = true;               // false for battery depletion
};

struct SimMetrics {
  double achieved_lifetime_s = 0;
  long cycles_completed = 0;   // cycles that delivered all K packets
  long cycles_event = 0;       // cycles simulated one by one
  long cycles_skipped = 0;     // cycles advanced in whole Sets
  std::string death_reason;
  int death_segment = 0;

  std::vector<std::vector<double>> energy_used_J;  // [segment-1][serial]
  Picojoules supplied_pj = 0;
  Picojoules used_pj = 0;
  Picojoules residual_pj = 0;
  double utilization_eta = 0;

  std::vector<int> delivered_per_cycle;  // event-simulated cycles only
  long delivered_total = 0;
  long collision_count = 0;   // event-simulated cycles only
  long chain_collisions = 0;
  long transfer_collisions = 0;
  long long_chain_edges = 0;
  double overrun_s = 0;       // schedule extension spent on fault recovery

  // Mean energy per cycle (J) spent by the leader, and by an average active
  // node, per segment; only fault-free event cycles contribute.
  std::vector<double> leader_cycle_energy_J;
  std::vector<double> active_node_cycle_energy_J;

  std::vector<FaultRecord> faults;
  std::vector<EventRecord> event_log;
};


// Per-segment outcome of one cycle.
struct SegmentCycleReport {
  long leader = -1;                 // serial filling the leader slot
  std::vector<long> chain;          // node serials, leader first
  Picojoules leader_energy = 0;
  std::vector<std::pair<long, double>> awake_s;  // serial -> non-sleep time
  bool had_fault = false;
};

struct CycleReport {
  long cycle = 0;
  int delivered = 0;
  long collisions = 0;
  long chain_collisions = 0;
  long transfer_collisions = 0;
  double overrun_s = 0;
  std::vector<SegmentCycleReport> segments;
};

struct NetworkState {
  PlanningModel model;
  DeploymentPlan plan;
  SimOptions options;
  Population population;
  long cycle = 0;
  double overrun_total_s = 0;

  // Ground-truth faults the protocol has not necessarily discovered yet.
  std::set<std::pair<int, long>> dead;                          // (segment, serial)
  std::set<std::pair<int, long>> pending_link_faults;           // armed on next send
  std::set<std::pair<std::pair<int, long>, std::pair<int, long>>> broken_links;

  SimMetrics metrics;
  std::vector<double> leader_energy_sum_J;
  std::vector<long> leader_energy_samples;
  std::vector<double> active_energy_sum_J;
  std::vector<long> active_energy_samples;

  Segment& segment(int i) { return population.segments.at(static_cast<std::size_t>(i - 1)); }
  const Segment& segment(int i) const {
    return population.segments.at(static_cast<std::size_t>(i - 1));
  }
  int K() const { return model.K(); }
};

NetworkState make_network(const PlanningModel& model, const DeploymentPlan& plan,
                          std::uint64_t seed, const SimOptions& options);

/// True iff every segment can field s non-failed nodes whose batteries cover
/// the segment's worst per-role energy for the next cycle. Under
/// first-node-dies any known failure also ends the network.
bool network_alive(const NetworkState& state);

CycleReport run_cycle(NetworkState& state);

/// Throws AccountingError if supplied != used + residual.
void audit_ledger(const NetworkState& state);

SimMetrics finalize_metrics(const NetworkState& state);

/// Runs until network death or the horizon. Throws ConfigError if T_d is
/// below the minimum cycle duration.
SimMetrics run(const PlanningModel& model, const DeploymentPlan& plan, std::uint64_t seed,
               const SimOptions& options);

// Clock-drift audit of one cycle's slot timetable: every node draws a drift
// rate uniformly in [-bound, bound] (s/s); a hop is missed when the packet,
// centred in its guard slot, does not fall inside the receiver's listening
// window. Returns the number of missed hops.
long count_drift_misses(const PlanningModel& model, double drift_bound, std::uint64_t seed);

}  // namespace wsn
