#pragma once

#include <span>
#include <vector>

#include "wsn/geometry.hpp"

namespace wsn {

// Contiguous block of serial numbers on duty for one Round.
struct SerialWindow {
  long first = 0;
  int count = 0;

  long last() const { return first + count - 1; }
  bool contains(long serial) const { return serial >= first && serial <= last(); }
};

struct RotationState {
  long rounds_completed = 0;
  long sets_completed = 0;
  int cycle_in_round = 0;
};

// Rotation bookkeeping at a given global cycle for a segment of n_nodes.
RotationState rotation_at(long cycle, long n_nodes, int s);

/// Serials on duty after `rounds_completed` Rounds. n_nodes must be a
/// multiple of s; the window wraps to serial 0 after each Set.
SerialWindow active_window(long n_nodes, int s, long rounds_completed);

long leader_for_cycle(const SerialWindow& window, int cycle_in_round);

struct ChainMember {
  long serial = 0;
  Point position;
};

struct Chain {
  // Leader first; data flows from the back toward the front.
  std::vector<long> order;
  // hop_length[k] is the edge between order[k] and order[k+1].
  std::vector<double> hop_length;
  // Indices into hop_length of edges longer than the radio range.
  std::vector<int> long_edges;
};

/// Greedy nearest-neighbour chain grown from the leader. Ties go to the
/// lower serial. Edges longer than `radio_range` are reported, not refused.
Chain build_chain(std::span<const ChainMember> active, long leader_serial, double radio_range);

enum class Parity { odd, even };

struct TransferLink {
  int from_segment = 0;
  int to_segment = 0;  // 0 is the sink
};

struct TransferStep {
  int step_index = 0;  // 1-based
  Parity transmitting_parity = Parity::odd;
  std::vector<TransferLink> links;
};

/// Parity-alternating relay of one packet per segment to the sink in 2K-1
/// steps. Segment 1's parity transmits first; a segment transmits whenever
/// its parity is up and it holds a packet.
std::vector<TransferStep> transfer_schedule(int K);

}  // namespace wsn
