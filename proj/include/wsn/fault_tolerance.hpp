#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "wsn/geometry.hpp"

namespace wsn {

// Inputs to the redundant-node sizing rule. The per-layer sum of the
// layered model collapses to one connected-outer-node count for a single
// layer.
struct RedundancySpec {
  double c = 1.0;
  double d = 0;                // inter-layer distance, m
  double connected_outer = 1;  // outer nodes connected to a node
  double tau = 0;              // one packet transmission, s
  double n_active = 0;
  double t_total_sense = 0;    // monitoring period, s
  double e_node = 0;           // initial energy per node, J
  double t_between = 0;        // period between two transmissions of a node, s
};

long redundant_count(const RedundancySpec& spec);

struct NodeRef {
  int segment = 0;  // 0 is the sink
  long serial = -1;

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

enum class BeaconOutcome { not_attempted, failed, succeeded };

// What the two ends of a failed transfer observed.
struct LinkEvents {
  NodeRef transmitter;
  NodeRef receiver;
  int failed_attempts = 0;
  int max_attempts = 10;  // m
  bool third_neighbor_available = true;
  BeaconOutcome beacon = BeaconOutcome::not_attempted;
  double receiver_silence_s = 0;  // time the receiver's timer ran without a packet
  double guard_slot_s = 0;        // 2B/D
};

enum class Verdict {
  transmitter_failed,       // beacon also failed, or receiver timer only
  receiver_or_link_failed,  // beacon reached a third neighbour
};

std::string_view to_string(Verdict v);

struct FaultDiagnosis {
  NodeRef suspect;
  NodeRef detector;  // node that runs the substitution
  Verdict verdict = Verdict::transmitter_failed;
  int retries = 0;
  BeaconOutcome beacon = BeaconOutcome::not_attempted;
  bool receiver_timer_expired = false;
  bool degraded = false;  // no third neighbour: decided on timer evidence only
};

/// Receiver timeout after which the transmitter is presumed dead: m * 2B/D.
double receiver_timeout(int max_attempts, double guard_slot_s);

/// Classifies a transfer that failed m consecutive attempts.
FaultDiagnosis detect_failure(const LinkEvents& events);

struct SubstituteCandidate {
  long serial = 0;
  Point position;
};

/// Redundant node nearest to the detecting node, ties by lowest serial;
/// nullopt when the pool is empty.
std::optional<long> substitute(Point detector, std::span<const SubstituteCandidate> pool);

}  // namespace wsn
