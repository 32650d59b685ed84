#include "wsn/deployment_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "wsn/errors.hpp"

namespace wsn {

void LifetimeSpec::validate() const {
  if (!(T_life > 0)) throw DomainError("lifetime target must be positive");
  if (!(E_o > 0)) throw DomainError("initial node energy must be positive");
  if (!(T_sense >= 0)) throw DomainError("sensing time must be non-negative");
  if (!(T_d > 0)) throw DomainError("cycle duration must be positive");
}

std::string_view to_string(Preset p) { return p == Preset::paper ? "paper" : "physical"; }

Preset parse_preset(std::string_view text) {
  if (text == "paper") return Preset::paper;
  if (text == "physical") return Preset::physical;
  throw DomainError("unknown preset '" + std::string(text) + "' (expected paper|physical)");
}

PlannerOptions PlannerOptions::for_preset(Preset preset, const RadioParams& radio) {
  PlannerOptions o;
  o.preset = preset;
  const double packet_ms = radio.packet_time() * 1000.0;
  if (preset == Preset::paper) {
    o.chain_distance = ChainDistance::breadth_a;
    o.leader_receptions = LeaderReceptions::printed;
    o.leader_idle = LeaderIdle::slot_formula;
    o.follower_sensing = false;
    o.density_rounding = DensityRounding::three_decimals_up;
    o.slot_ms = std::max(1.0, std::floor(packet_ms + 1e-9));
  } else {
    o.chain_distance = ChainDistance::segment_width_b;
    o.leader_receptions = LeaderReceptions::per_protocol;
    o.leader_idle = LeaderIdle::per_reception_guard;
    o.follower_sensing = true;
    o.density_rounding = DensityRounding::exact;
    o.slot_ms = packet_ms;
  }
  return o;
}

double PlanningModel::chain_hop_distance() const {
  return options.chain_distance == ChainDistance::breadth_a ? area.breadth_a : area.seg_width_b;
}

PlanningModel make_model(const AreaSpec& area, const RadioParams& radio, const LifetimeSpec& life,
                         const PlannerOptions& options, std::optional<int> s_override) {
  area.validate();
  radio.validate();
  life.validate();
  if (!(options.slot_ms > 0)) throw DomainError("slot length must be positive");
  if (options.slot_ms / 1000.0 < radio.packet_time() * (1.0 - 0.05)) {
    // The slot may round B/D down (25 ms for 25.6 ms) but not by more.
    throw DomainError("slot is shorter than the packet time");
  }
  PlanningModel m;
  m.area = area;
  m.radio = radio;
  m.life = life;
  m.options = options;
  const CoveragePlan cov = plan_coverage(area, options.density_rounding);
  m.lambda = cov.lambda;
  m.lambda_exact = cov.lambda_exact;
  m.s = s_override.value_or(cov.s);
  if (m.s < 1) throw DomainError("active count must be at least 1");
  return m;
}

namespace {

void check_segment(const PlanningModel& m, int i) {
  if (i < 1 || i > m.K()) {
    throw DomainError("segment index " + std::to_string(i) + " outside 1.." + std::to_string(m.K()));
  }
}

}  // namespace

double leader_receptions(const PlanningModel& m, int i) {
  check_segment(m, i);
  const int upstream = m.K() - i;
  if (m.options.leader_receptions == LeaderReceptions::printed) return upstream + 1;
  // Upstream leaders' packets plus the fused packet from its own chain.
  return upstream + (m.s >= 2 ? 1 : 0);
}

double leader_idle_time(const PlanningModel& m, int i) {
  check_segment(m, i);
  if (m.options.leader_idle == LeaderIdle::slot_formula) return idle_time_leader_max(m, i);
  // A receiver listens through the whole guard slot; the part not spent
  // receiving is idle.
  const double guard_idle = std::max(0.0, m.guard_s() - m.radio.packet_time());
  return leader_receptions(m, i) * guard_idle;
}

double leader_cycle_energy(const PlanningModel& m, int i) {
  check_segment(m, i);
  const double relays = m.K() - i + 1;
  const long B = m.radio.packet_bits;
  return relays * tx_packet_energy(m.radio, m.transfer_distance(), B) +
         leader_receptions(m, i) * rx_packet_energy(m.radio, B) +
         idle_energy(m.radio, leader_idle_time(m, i)) + sense_energy(m.radio, m.life.T_sense);
}

double follower_round_energy(const PlanningModel& m) {
  if (m.s < 2) throw DomainError("follower energy needs at least two active nodes");
  const double s = m.s;
  const long B = m.radio.packet_bits;
  const double idle = m.radio.packet_time() * (s - 2) * (s - 3) * m.radio.e_id;
  return idle + (s - 1) * rx_packet_energy(m.radio, B) +
         (s - 1) * tx_packet_energy(m.radio, m.chain_hop_distance(), B);
}

double segment_round_energy(const PlanningModel& m, int i) {
  double e = leader_cycle_energy(m, i);
  if (m.s >= 2) {
    e += follower_round_energy(m);
    if (m.options.follower_sensing) e += (m.s - 1) * sense_energy(m.radio, m.life.T_sense);
  }
  return e;
}

double segment_density(const PlanningModel& m, int i) {
  if (!(m.life.T_d > 0) || !(m.life.E_o > 0)) throw DomainError("T_d and E_o must be positive");
  return m.life.T_life * segment_round_energy(m, i) /
         (m.area.segment_area() * m.life.T_d * m.life.E_o);
}

double segment_node_count_exact(const PlanningModel& m, int i) {
  return segment_density(m, i) * m.area.segment_area();
}

long ceil_to_multiple(double x, int s) {
  if (s < 1) throw DomainError("multiple must be positive");
  if (!(x >= 0)) throw DomainError("count must be non-negative");
  // Tolerate float noise just above an exact multiple.
  const double groups = std::ceil(x / s - 1e-9);
  return static_cast<long>(std::max(0.0, groups)) * s;
}

long segment_node_count(const PlanningModel& m, int i) {
  return std::max<long>(m.s, ceil_to_multiple(segment_node_count_exact(m, i), m.s));
}

double idle_time_leader_max(const PlanningModel& m, int i) {
  check_segment(m, i);
  return m.slot_s() * (m.K() + m.s - i - 1);
}

double cycle_duration_min(const PlanningModel& m) {
  const double g = m.guard_s();
  return m.life.T_sense + 2.0 * g * (m.s - 1) + (2.0 * m.K() - 1) * g;
}

double cycle_duration_min_printed(const PlanningModel& m) {
  // T_sense + 100K + 50(s-1) ms, written in 25 ms slot units.
  return m.life.T_sense + m.slot_s() * (4.0 * m.K() + 2.0 * (m.s - 1));
}

double sleep_time_active(const PlanningModel& m) {
  return m.slot_s() * (4.0 * m.K() + 2.0 * (m.s - 2) + 1.0);
}

double sleep_time_leader_min(const PlanningModel& m, int i) {
  check_segment(m, i);
  return m.slot_s() * (4.0 * m.K() - (m.K() - i + 1));
}

DeploymentPlan compute_plan(const PlanningModel& m) {
  DeploymentPlan plan;
  plan.s = m.s;
  plan.lambda = m.lambda;
  const int K = m.K();
  double supported = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= K; ++i) {
    const double e = segment_round_energy(m, i);
    plan.round_energy_J.push_back(e);
    plan.density.push_back(segment_density(m, i));
    plan.node_count_exact.push_back(segment_node_count_exact(m, i));
    const long n = segment_node_count(m, i);
    plan.node_count.push_back(n);
    supported = std::min(supported, static_cast<double>(n) * m.life.E_o * m.life.T_d / e);
  }
  plan.total_N = total_nodes(plan);
  plan.supported_lifetime_s = supported;

  TimingTable& t = plan.timing;
  t.slot_s = m.slot_s();
  t.guard_s = m.guard_s();
  t.cycle_min_s = cycle_duration_min(m);
  t.cycle_min_printed_s = cycle_duration_min_printed(m);
  t.sleep_active_s = sleep_time_active(m);
  for (int i = 1; i <= K; ++i) {
    t.idle_leader_max_s.push_back(idle_time_leader_max(m, i));
    t.sleep_leader_min_s.push_back(sleep_time_leader_min(m, i));
  }
  return plan;
}

long total_nodes(const DeploymentPlan& plan) {
  return std::accumulate(plan.node_count.begin(), plan.node_count.end(), 0L);
}

}  // namespace wsn
