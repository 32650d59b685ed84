#include "wsn/fault_tolerance.hpp"

#include <cmath>
#include <limits>

#include "wsn/errors.hpp"

namespace wsn {

long redundant_count(const RedundancySpec& spec) {
  const double denom = spec.e_node * spec.t_between;
  if (!(denom > 0)) throw DomainError("redundancy rule needs positive node energy and period");
  if (spec.c < 0 || spec.d < 0 || spec.connected_outer < 0 || spec.tau < 0 || spec.n_active < 0 ||
      spec.t_total_sense < 0) {
    throw DomainError("redundancy inputs must be non-negative");
  }
  const double raw = spec.c * spec.d * spec.d *
                     (spec.connected_outer * spec.tau * spec.n_active * spec.t_total_sense) / denom;
  return static_cast<long>(std::ceil(raw - 1e-12));
}

std::string_view to_string(Verdict v) {
  return v == Verdict::transmitter_failed ? "transmitter_failed" : "receiver_or_link_failed";
}

double receiver_timeout(int max_attempts, double guard_slot_s) {
  return max_attempts * guard_slot_s;
}

FaultDiagnosis detect_failure(const LinkEvents& ev) {
  if (ev.max_attempts < 1) throw DomainError("retry limit must be positive");
  if (ev.failed_attempts < ev.max_attempts) {
    throw DomainError("diagnosis starts only after m failed attempts");
  }
  FaultDiagnosis d;
  d.retries = ev.failed_attempts;
  d.beacon = ev.beacon;
  d.receiver_timer_expired =
      ev.receiver_silence_s + 1e-12 >= receiver_timeout(ev.max_attempts, ev.guard_slot_s);

  if (ev.third_neighbor_available && ev.beacon != BeaconOutcome::not_attempted) {
    if (ev.beacon == BeaconOutcome::failed) {
      d.verdict = Verdict::transmitter_failed;
      d.suspect = ev.transmitter;
      d.detector = ev.receiver;
    } else {
      d.verdict = Verdict::receiver_or_link_failed;
      d.suspect = ev.receiver;
      d.detector = ev.transmitter;
    }
    return d;
  }

  // No self-check possible: only the receiver's timer speaks.
  if (!d.receiver_timer_expired) {
    throw DomainError("no third neighbour and the receiver timer has not expired");
  }
  d.degraded = true;
  d.verdict = Verdict::transmitter_failed;
  d.suspect = ev.transmitter;
  d.detector = ev.receiver;
  return d;
}

std::optional<long> substitute(Point detector, std::span<const SubstituteCandidate> pool) {
  std::optional<long> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& c : pool) {
    const double d = distance(detector, c.position);
    if (d < best_d || (d == best_d && c.serial < *best)) {
      best = c.serial;
      best_d = d;
    }
  }
  return best;
}

}  // namespace wsn
