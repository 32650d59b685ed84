#include "wsn/schedule.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "wsn/errors.hpp"

namespace wsn {

RotationState rotation_at(long cycle, long n_nodes, int s) {
  if (s < 1 || n_nodes < s || n_nodes % s != 0) {
    throw DomainError("node count must be a positive multiple of the active count");
  }
  if (cycle < 0) throw DomainError("cycle index must be non-negative");
  RotationState r;
  r.rounds_completed = cycle / s;
  r.cycle_in_round = static_cast<int>(cycle % s);
  r.sets_completed = r.rounds_completed / (n_nodes / s);
  return r;
}

SerialWindow active_window(long n_nodes, int s, long rounds_completed) {
  if (s < 1 || n_nodes < s || n_nodes % s != 0) {
    throw DomainError("node count " + std::to_string(n_nodes) + " is not a multiple of s=" +
                      std::to_string(s));
  }
  if (rounds_completed < 0) throw DomainError("round count must be non-negative");
  const long rounds_per_set = n_nodes / s;
  const long sets = rounds_completed / rounds_per_set;
  return SerialWindow{s * rounds_completed - sets * n_nodes, s};
}

long leader_for_cycle(const SerialWindow& window, int cycle_in_round) {
  if (cycle_in_round < 0 || cycle_in_round >= window.count) {
    throw DomainError("cycle index within the Round is out of range");
  }
  return window.first + cycle_in_round;
}

Chain build_chain(std::span<const ChainMember> active, long leader_serial, double radio_range) {
  if (active.empty()) throw DomainError("cannot build a chain over no nodes");
  const std::size_t n = active.size();
  std::vector<bool> used(n, false);
  std::size_t current = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (active[k].serial == leader_serial) current = k;
  }
  if (current == n) throw DomainError("leader is not among the active nodes");

  Chain chain;
  chain.order.reserve(n);
  chain.order.push_back(active[current].serial);
  used[current] = true;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (used[k]) continue;
      const double d = distance(active[current].position, active[k].position);
      if (d < best_d || (d == best_d && active[k].serial < active[best].serial)) {
        best = k;
        best_d = d;
      }
    }
    used[best] = true;
    if (best_d > radio_range) chain.long_edges.push_back(static_cast<int>(chain.hop_length.size()));
    chain.hop_length.push_back(best_d);
    chain.order.push_back(active[best].serial);
    current = best;
  }
  return chain;
}

std::vector<TransferStep> transfer_schedule(int K) {
  if (K < 1) throw DomainError("need at least one segment");
  // held[i] = packets waiting at segment i's leader (index 0 unused).
  std::vector<int> held(static_cast<std::size_t>(K) + 1, 1);
  held[0] = 0;
  int at_sink = 0;
  std::vector<TransferStep> steps;
  for (int step = 1; at_sink < K; ++step) {
    TransferStep ts;
    ts.step_index = step;
    ts.transmitting_parity = (step % 2 == 1) ? Parity::odd : Parity::even;
    const int first = (step % 2 == 1) ? 1 : 2;
    for (int i = first; i <= K; i += 2) {
      if (held[static_cast<std::size_t>(i)] > 0) ts.links.push_back({i, i - 1});
    }
    // Receivers are the other parity, so updating in place is safe.
    for (const auto& link : ts.links) {
      --held[static_cast<std::size_t>(link.from_segment)];
      if (link.to_segment == 0) {
        ++at_sink;
      } else {
        ++held[static_cast<std::size_t>(link.to_segment)];
      }
    }
    steps.push_back(std::move(ts));
  }
  return steps;
}

}  // namespace wsn
