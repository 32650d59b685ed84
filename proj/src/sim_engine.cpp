#include "wsn/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "wsn/errors.hpp"
#include "wsn/rng.hpp"

namespace wsn {

Picojoules to_pj(double joules) { return std::llround(joules * 1e12); }

std::string_view to_string(ProtocolPhase p) {
  switch (p) {
    case ProtocolPhase::sensing: return "sensing";
    case ProtocolPhase::chain: return "chain";
    case ProtocolPhase::transfer: return "transfer";
  }
  return "?";
}

std::string_view to_string(FaultKind k) { return k == FaultKind::node ? "node" : "link"; }

std::string_view to_string(DeathCriterion d) {
  return d == DeathCriterion::segment_starved ? "segment-starved" : "first-node-dies";
}

std::string_view to_string(SimMode m) { return m == SimMode::event ? "event" : "fast-forward"; }

Population deploy(const DeploymentPlan& plan, const AreaSpec& area, double initial_energy_J,
                  std::uint64_t seed, long redundant_per_segment) {
  if (redundant_per_segment < 0) throw DomainError("redundant node count must be non-negative");
  if (!(initial_energy_J > 0)) throw DomainError("initial node energy must be positive");
  SplitMix64 rng(seed);
  const Picojoules e0 = to_pj(initial_energy_J);
  const double a = area.breadth_a;
  const double b = area.seg_width_b;
  Population pop;
  for (int i = 1; i <= plan.K(); ++i) {
    Segment seg;
    seg.index = i;
    seg.scheduled = plan.node_count[static_cast<std::size_t>(i - 1)];
    const long total = seg.scheduled + redundant_per_segment;
    seg.nodes.reserve(static_cast<std::size_t>(total));
    for (long j = 0; j < total; ++j) {
      Node n;
      n.segment = i;
      n.serial = j;
      n.position.x = rng.uniform((i - 1) * b, i * b);
      n.position.y = rng.uniform(0.0, a);
      n.battery = e0;
      n.redundant = j >= seg.scheduled;
      seg.nodes.push_back(n);
    }
    seg.logical_to_physical.resize(static_cast<std::size_t>(seg.scheduled));
    std::iota(seg.logical_to_physical.begin(), seg.logical_to_physical.end(), 0L);
    for (long j = seg.scheduled; j < total; ++j) seg.pool.push_back(j);
    pop.segments.push_back(std::move(seg));
  }
  return pop;
}

namespace {

struct Costs {
  Picojoules sense = 0;
  Picojoules rx = 0;          // one packet
  Picojoules guard_idle = 0;  // rest of a guard slot after a reception
  Picojoules slot_idle = 0;   // a whole guard slot listening in vain
  Picojoules tx_transfer = 0;
  double slot = 0;
  double guard = 0;
  double chain_range = 0;
  double transfer_range = 0;
};

Costs costs_for(const PlanningModel& m) {
  const RadioParams& r = m.radio;
  Costs c;
  c.slot = m.slot_s();
  c.guard = m.guard_s();
  c.sense = to_pj(sense_energy(r, m.life.T_sense));
  c.rx = to_pj(rx_packet_energy(r, r.packet_bits));
  c.guard_idle = to_pj(idle_energy(r, std::max(0.0, c.guard - r.packet_time())));
  c.slot_idle = to_pj(idle_energy(r, c.guard));
  c.tx_transfer = to_pj(tx_packet_energy(r, m.transfer_distance(), r.packet_bits));
  c.chain_range = m.area.seg_width_b;
  c.transfer_range = m.transfer_distance();
  return c;
}

Picojoules tx_cost(const PlanningModel& m, double d) {
  return to_pj(tx_packet_energy(m.radio, d, m.radio.packet_bits));
}

const Point kSinkOffset{-0.5, 0.5};  // in units of (b, a)

Point sink_position(const PlanningModel& m) {
  return {kSinkOffset.x * m.area.seg_width_b, kSinkOffset.y * m.area.breadth_a};
}

struct SegmentPlan {
  bool active = false;
  long leader_slot = -1;
  Chain chain;                   // over serial slots
  std::vector<Picojoules> cost;  // per chain position
  Picojoules worst = 0;
};

SegmentPlan plan_segment(const NetworkState& st, const Segment& seg, long cycle, const Costs& c) {
  SegmentPlan p;
  if (seg.starved) return p;
  const int s = st.model.s;
  const RotationState rot = rotation_at(cycle, seg.scheduled, s);
  const SerialWindow w = active_window(seg.scheduled, s, rot.rounds_completed);
  p.leader_slot = leader_for_cycle(w, rot.cycle_in_round);
  std::vector<ChainMember> members;
  members.reserve(static_cast<std::size_t>(s));
  for (long l = w.first; l <= w.last(); ++l) {
    const long phys = seg.logical_to_physical[static_cast<std::size_t>(l)];
    members.push_back({l, seg.nodes[static_cast<std::size_t>(phys)].position});
  }
  p.chain = build_chain(members, p.leader_slot, c.chain_range);
  const int K = st.K();
  const int i = seg.index;
  const std::size_t n = p.chain.order.size();
  p.cost.assign(n, c.sense);
  for (std::size_t k = 0; k < n; ++k) {
    if (k >= 1) p.cost[k] += tx_cost(st.model, p.chain.hop_length[k - 1]);
    if (k + 1 < n) p.cost[k] += c.rx + c.guard_idle;
  }
  p.cost[0] += (K - i + 1) * c.tx_transfer + (K - i) * (c.rx + c.guard_idle);
  p.worst = *std::max_element(p.cost.begin(), p.cost.end());
  p.active = true;
  return p;
}

Node& node_at(NetworkState& st, NodeRef r) {
  return st.segment(r.segment).nodes.at(static_cast<std::size_t>(r.serial));
}

long phys_of(const Segment& seg, long slot) {
  return seg.logical_to_physical.at(static_cast<std::size_t>(slot));
}

// Per-cycle execution context.
struct CycleCtx {
  NetworkState& st;
  Costs c;
  long cycle;
  double base_time;
  std::vector<SegmentPlan> plans;
  std::map<std::pair<int, long>, double> awake;
  std::vector<bool> seg_fault;
  Point sink;

  bool functional(NodeRef r) const {
    if (r.segment == 0) return true;
    const Node& n = st.segment(r.segment).nodes.at(static_cast<std::size_t>(r.serial));
    return !n.failed && st.dead.count({r.segment, r.serial}) == 0;
  }
  Point pos(NodeRef r) const {
    if (r.segment == 0) return sink;
    return st.segment(r.segment).nodes.at(static_cast<std::size_t>(r.serial)).position;
  }
  bool link_ok(NodeRef x, NodeRef y) const {
    return st.broken_links.count({{x.segment, x.serial}, {y.segment, y.serial}}) == 0;
  }

  void log(const Node& n, double t, std::string_view ev, Picojoules e) {
    if (!st.options.record_events) return;
    st.metrics.event_log.push_back(
        {base_time + t, n.segment, n.serial, std::string(ev), to_joules(e) * 1e6, n.battery_J()});
  }

  // Debits a node; a node that cannot pay is depleted and drops out.
  bool charge(NodeRef r, Picojoules e, double t, double busy, std::string_view ev) {
    if (r.segment == 0) return true;
    Node& n = node_at(st, r);
    if (n.failed) return false;
    if (n.battery < e) {
      n.failed = true;
      n.state = NodeState::failed;
      seg_fault[static_cast<std::size_t>(r.segment - 1)] = true;
      log(n, t, "deplete", 0);
      return false;
    }
    n.battery -= e;
    n.used += e;
    awake[{r.segment, r.serial}] += busy;
    log(n, t, ev, e);
    return true;
  }
};

void activate_faults(CycleCtx& ctx, ProtocolPhase phase) {
  for (const FaultSpec& f : ctx.st.options.faults) {
    if (f.cycle != ctx.cycle || f.phase != phase) continue;
    if (f.segment < 1 || f.segment > ctx.st.K()) throw DomainError("fault segment out of range");
    const Segment& seg = ctx.st.segment(f.segment);
    if (f.serial < 0 || f.serial >= static_cast<long>(seg.nodes.size())) {
      throw DomainError("fault serial out of range");
    }
    if (f.kind == FaultKind::node) {
      ctx.st.dead.insert({f.segment, f.serial});
    } else {
      ctx.st.pending_link_faults.insert({f.segment, f.serial});
    }
    ctx.seg_fault[static_cast<std::size_t>(f.segment - 1)] = true;
  }
}

// Fielded serial slots of a segment this cycle, in chain order.
std::vector<NodeRef> fielded(const CycleCtx& ctx, int i) {
  std::vector<NodeRef> out;
  const SegmentPlan& p = ctx.plans[static_cast<std::size_t>(i - 1)];
  if (!p.active) return out;
  const Segment& seg = ctx.st.segment(i);
  for (long slot : p.chain.order) out.push_back({i, phys_of(seg, slot)});
  return out;
}

// Takes `failed` out of service and brings in the redundant node nearest to
// `detector`. Returns the substitute, or nullopt when the pool is empty (the
// segment is then starved).
std::optional<long> replace_node(CycleCtx& ctx, NodeRef failed, Point detector) {
  Segment& seg = ctx.st.segment(failed.segment);
  Node& f = seg.nodes.at(static_cast<std::size_t>(failed.serial));
  f.failed = true;
  f.state = NodeState::failed;
  ctx.seg_fault[static_cast<std::size_t>(failed.segment - 1)] = true;
  std::vector<SubstituteCandidate> cands;
  for (long j : seg.pool) cands.push_back({j, seg.nodes[static_cast<std::size_t>(j)].position});
  const auto pick = substitute(detector, cands);
  if (!pick) {
    seg.starved = true;
    return std::nullopt;
  }
  seg.pool.erase(std::find(seg.pool.begin(), seg.pool.end(), *pick));
  for (auto& phys : seg.logical_to_physical) {
    if (phys == failed.serial) phys = *pick;
  }
  seg.nodes[static_cast<std::size_t>(*pick)].state = NodeState::idle;
  return pick;
}

// One transmission slot: x sends a packet to y. Charges both ends.
bool attempt(CycleCtx& ctx, NodeRef x, NodeRef y, Picojoules etx, double t, std::string_view ev) {
  if (ctx.st.pending_link_faults.erase({x.segment, x.serial}) > 0) {
    ctx.st.broken_links.insert({{x.segment, x.serial}, {y.segment, y.serial}});
  }
  bool x_ok = ctx.functional(x) && ctx.charge(x, etx, t, ctx.c.slot, ev);
  const bool y_up = ctx.functional(y);
  const bool through = x_ok && y_up && ctx.link_ok(x, y);
  if (!y_up) return false;
  if (through) return ctx.charge(y, ctx.c.rx + ctx.c.guard_idle, t, ctx.c.guard, "rx");
  ctx.charge(y, ctx.c.slot_idle, t, ctx.c.guard, "idle");
  return false;
}

// Sends x -> y with the retry, beacon, diagnosis and substitution protocol.
// `fixed_distance` > 0 charges transmissions at that distance (the leader
// relay); otherwise the actual hop length is used. Extra slots spent on
// recovery are added to `extra`. x and y are updated to their substitutes.
bool run_hop(CycleCtx& ctx, NodeRef& x, NodeRef& y, double fixed_distance, double t0,
             ProtocolPhase phase, double& extra) {
  const NetworkState& st = ctx.st;
  const int m = st.options.max_attempts;
  const double g = ctx.c.guard;
  auto etx_for = [&](NodeRef a, NodeRef b) {
    return tx_cost(st.model, fixed_distance > 0 ? fixed_distance : distance(ctx.pos(a), ctx.pos(b)));
  };

  for (int round = 0; round < 3; ++round) {
    double t = t0 + extra;
    if (round > 0) {
      extra += g;  // retransmission slot
    }
    const Picojoules etx = etx_for(x, y);
    if (attempt(ctx, x, y, etx, t, "tx")) return true;

    // m - 1 retries, the receiver listening through each.
    for (int a = 1; a < m; ++a) {
      t = t0 + extra + a * g;
      if (ctx.functional(x)) ctx.charge(x, etx, t, ctx.c.slot, "retry");
      if (ctx.functional(y)) ctx.charge(y, ctx.c.slot_idle, t, g, "idle");
    }
    extra += (m - 1) * g;
    t = t0 + extra;

    // Self-check: beacon to the nearest other fielded node of x's segment,
    // else to the next leader upstream.
    std::optional<NodeRef> third;
    double best = INFINITY;
    for (NodeRef r : fielded(ctx, x.segment)) {
      if (r == x || r == y || st.segment(r.segment).nodes[static_cast<std::size_t>(r.serial)].failed) {
        continue;
      }
      const double d = distance(ctx.pos(x), ctx.pos(r));
      if (d < best || (d == best && r.serial < third->serial)) {
        best = d;
        third = r;
      }
    }
    if (!third && x.segment > 1) {
      const auto& up = ctx.plans[static_cast<std::size_t>(x.segment - 2)];
      if (up.active) {
        NodeRef r{x.segment - 1, phys_of(st.segment(x.segment - 1), up.leader_slot)};
        if (!(r == y)) third = r;
      }
    }
    BeaconOutcome beacon = BeaconOutcome::not_attempted;
    if (third) {
      extra += g;
      bool ok = ctx.functional(x) &&
                ctx.charge(x, tx_cost(st.model, distance(ctx.pos(x), ctx.pos(*third))), t,
                           ctx.c.slot, "beacon");
      ok = ok && ctx.functional(*third) && ctx.link_ok(x, *third) &&
           ctx.charge(*third, ctx.c.rx + ctx.c.guard_idle, t, g, "rx");
      beacon = ok ? BeaconOutcome::succeeded : BeaconOutcome::failed;
    }

    LinkEvents ev;
    ev.transmitter = x;
    ev.receiver = y;
    ev.failed_attempts = m;
    ev.max_attempts = m;
    ev.third_neighbor_available = third.has_value();
    ev.beacon = beacon;
    ev.receiver_silence_s = m * g;
    ev.guard_slot_s = g;
    const FaultDiagnosis diag = detect_failure(ev);

    NodeRef failed = diag.suspect;
    NodeRef detector = diag.detector;
    if (failed.segment == 0) {
      // The sink cannot be replaced; the sender hands its role over instead.
      failed = x;
      detector = x;
    }
    const Point det_pos = ctx.pos(detector);
    const auto sub = replace_node(ctx, failed, det_pos);
    FaultRecord rec;
    rec.cycle = ctx.cycle;
    rec.phase = phase;
    rec.diagnosis = diag;
    rec.failed = failed;
    rec.substitute = sub;
    rec.injected = true;
    ctx.st.metrics.faults.push_back(rec);
    if (ctx.st.options.record_events) {
      const Node& fn = node_at(ctx.st, failed);
      ctx.log(fn, t, "fail", 0);
    }
    if (!sub) return false;
    const NodeRef d{failed.segment, *sub};
    ctx.log(node_at(ctx.st, d), t, "substitute", 0);

    // Notify the rest of the segment, the substitute included.
    extra += g;
    t = t0 + extra;
    std::vector<NodeRef> told;
    double reach = 0;
    for (NodeRef r : fielded(ctx, failed.segment)) {
      if (r == detector) continue;
      told.push_back(r);
      reach = std::max(reach, distance(det_pos, ctx.pos(r)));
    }
    if (!told.empty() && ctx.functional(detector)) {
      ctx.charge(detector, tx_cost(st.model, reach), t, ctx.c.slot, "notify");
      for (NodeRef r : told) {
        if (ctx.functional(r)) ctx.charge(r, ctx.c.rx + ctx.c.guard_idle, t, g, "rx");
      }
    }
    if (failed == x) {
      x = d;
    } else {
      y = d;
    }
  }
  return false;
}

void count_collisions(const std::vector<Point>& tx, const std::vector<Point>& rx, double range,
                      long& total) {
  for (const Point& r : rx) {
    int in_range = 0;
    for (const Point& t : tx) {
      if (distance(t, r) <= range) ++in_range;
    }
    if (in_range >= 2) ++total;
  }
}

// Replaces depleted fielded nodes before the cycle starts.
void replace_depleted(NetworkState& st, CycleCtx& ctx) {
  for (int i = 1; i <= st.K(); ++i) {
    Segment& seg = st.segment(i);
    while (!seg.starved) {
      SegmentPlan p = plan_segment(st, seg, ctx.cycle, ctx.c);
      std::optional<NodeRef> weak;
      for (std::size_t k = 0; k < p.chain.order.size(); ++k) {
        const NodeRef r{i, phys_of(seg, p.chain.order[k])};
        const Node& n = node_at(st, r);
        if (n.failed || n.battery < p.cost[k]) {
          weak = r;
          break;
        }
      }
      if (!weak) break;
      const Point at = node_at(st, *weak).position;
      ctx.log(node_at(st, *weak), 0, "deplete", 0);
      const auto sub = replace_node(ctx, *weak, at);
      FaultRecord rec;
      rec.cycle = ctx.cycle;
      rec.phase = ProtocolPhase::sensing;
      rec.diagnosis.suspect = *weak;
      rec.diagnosis.detector = *weak;
      rec.failed = *weak;
      rec.substitute = sub;
      rec.injected = false;
      st.metrics.faults.push_back(rec);
    }
  }
}

}  // namespace

NetworkState make_network(const PlanningModel& model, const DeploymentPlan& plan,
                          std::uint64_t seed, const SimOptions& options) {
  if (plan.K() != model.K()) throw DomainError("plan and model disagree on K");
  if (plan.s != model.s) throw DomainError("plan and model disagree on s");
  if (options.max_attempts < 1) throw DomainError("retry limit must be positive");
  for (long n : plan.node_count) {
    if (n < model.s || n % model.s != 0) {
      throw DomainError("segment node count must be a positive multiple of s");
    }
  }
  NetworkState st{model, plan, options, deploy(plan, model.area, model.life.E_o, seed,
                                               options.redundant_per_segment)};
  const auto K = static_cast<std::size_t>(model.K());
  st.leader_energy_sum_J.assign(K, 0.0);
  st.leader_energy_samples.assign(K, 0);
  st.active_energy_sum_J.assign(K, 0.0);
  st.active_energy_samples.assign(K, 0);
  for (const Segment& seg : st.population.segments) {
    for (const Node& n : seg.nodes) st.metrics.supplied_pj += n.battery;
  }
  return st;
}

bool network_alive(const NetworkState& st) {
  const Costs c = costs_for(st.model);
  const int s = st.model.s;
  for (const Segment& seg : st.population.segments) {
    if (seg.starved) return false;
    const SegmentPlan p = plan_segment(st, seg, st.cycle, c);
    if (st.options.death == DeathCriterion::first_node_dies) {
      for (const Node& n : seg.nodes) {
        if (n.failed) return false;
      }
      for (long slot : p.chain.order) {
        if (seg.nodes[static_cast<std::size_t>(phys_of(seg, slot))].battery < p.worst) return false;
      }
      continue;
    }
    long healthy = 0;
    for (long slot : p.chain.order) {
      const Node& n = seg.nodes[static_cast<std::size_t>(phys_of(seg, slot))];
      if (!n.failed && n.battery >= p.worst) ++healthy;
    }
    for (long j : seg.pool) {
      if (seg.nodes[static_cast<std::size_t>(j)].battery >= p.worst) ++healthy;
    }
    if (healthy < s) return false;
  }
  return true;
}

CycleReport run_cycle(NetworkState& st) {
  const int K = st.K();
  const int s = st.model.s;
  CycleCtx ctx{st, costs_for(st.model), st.cycle,
               static_cast<double>(st.cycle) * st.model.life.T_d + st.overrun_total_s};
  ctx.seg_fault.assign(static_cast<std::size_t>(K), false);
  ctx.sink = sink_position(st.model);
  const double g = ctx.c.guard;

  replace_depleted(st, ctx);
  for (int i = 1; i <= K; ++i) ctx.plans.push_back(plan_segment(st, st.segment(i), st.cycle, ctx.c));

  CycleReport rep;
  rep.cycle = st.cycle;
  rep.segments.resize(static_cast<std::size_t>(K));
  std::vector<Picojoules> used_before(static_cast<std::size_t>(K), 0);
  std::vector<Picojoules> leader_before(static_cast<std::size_t>(K), 0);
  std::vector<NodeRef> leader_at_start(static_cast<std::size_t>(K));
  for (int i = 1; i <= K; ++i) {
    const auto& p = ctx.plans[static_cast<std::size_t>(i - 1)];
    if (!p.active) continue;
    const NodeRef L{i, phys_of(st.segment(i), p.leader_slot)};
    leader_at_start[static_cast<std::size_t>(i - 1)] = L;
    leader_before[static_cast<std::size_t>(i - 1)] = node_at(st, L).used;
    for (NodeRef r : fielded(ctx, i)) used_before[static_cast<std::size_t>(i - 1)] += node_at(st, r).used;
    st.metrics.long_chain_edges += static_cast<long>(p.chain.long_edges.size());
  }

  // Sensing.
  activate_faults(ctx, ProtocolPhase::sensing);
  for (int i = 1; i <= K; ++i) {
    for (NodeRef r : fielded(ctx, i)) {
      if (ctx.functional(r)) ctx.charge(r, ctx.c.sense, 0, st.model.life.T_sense, "sense");
    }
  }

  // Intra-segment chains: odd segments, then even ones, one hop per slot.
  double shift = 0;
  activate_faults(ctx, ProtocolPhase::chain);
  const double chain_start = st.model.life.T_sense;
  for (int phase = 0; phase < 2; ++phase) {
    for (int k = 0; k + 1 < s; ++k) {
      const double t = chain_start + (phase * (s - 1) + k) * g + shift;
      std::vector<Point> txp, rxp;
      double slot_extra = 0;
      for (int i = 1 + phase; i <= K; i += 2) {
        const auto& p = ctx.plans[static_cast<std::size_t>(i - 1)];
        if (!p.active || st.segment(i).starved) continue;
        const Segment& seg = st.segment(i);
        NodeRef x{i, phys_of(seg, p.chain.order[static_cast<std::size_t>(s - 1 - k)])};
        NodeRef y{i, phys_of(seg, p.chain.order[static_cast<std::size_t>(s - 2 - k)])};
        if (ctx.functional(x)) txp.push_back(ctx.pos(x));
        if (ctx.functional(y)) rxp.push_back(ctx.pos(y));
        double extra = 0;
        run_hop(ctx, x, y, 0.0, t + slot_extra, ProtocolPhase::chain, extra);
        slot_extra += extra;
      }
      count_collisions(txp, rxp, ctx.c.chain_range, rep.chain_collisions);
      shift += slot_extra;
    }
  }

  // Leader relay toward the sink.
  activate_faults(ctx, ProtocolPhase::transfer);
  std::vector<int> held(static_cast<std::size_t>(K) + 1, 0);
  for (int i = 1; i <= K; ++i) held[static_cast<std::size_t>(i)] = st.segment(i).starved ? 0 : 1;
  const double transfer_start = chain_start + 2 * (s - 1) * g;
  auto leader_ref = [&](int i) {
    return NodeRef{i, phys_of(st.segment(i), ctx.plans[static_cast<std::size_t>(i - 1)].leader_slot)};
  };
  for (const TransferStep& step : transfer_schedule(K)) {
    const double t = transfer_start + (step.step_index - 1) * g + shift;
    std::vector<Point> txp, rxp;
    std::vector<TransferLink> live;
    for (const TransferLink& l : step.links) {
      if (held[static_cast<std::size_t>(l.from_segment)] == 0) continue;
      if (st.segment(l.from_segment).starved) {
        held[static_cast<std::size_t>(l.from_segment)] = 0;
        continue;
      }
      live.push_back(l);
      const NodeRef x = leader_ref(l.from_segment);
      if (ctx.functional(x)) txp.push_back(ctx.pos(x));
      if (l.to_segment == 0) {
        rxp.push_back(ctx.sink);
      } else if (!st.segment(l.to_segment).starved) {
        const NodeRef y = leader_ref(l.to_segment);
        if (ctx.functional(y)) rxp.push_back(ctx.pos(y));
      }
    }
    count_collisions(txp, rxp, ctx.c.transfer_range, rep.transfer_collisions);
    double step_extra = 0;
    for (const TransferLink& l : live) {
      auto& from = held[static_cast<std::size_t>(l.from_segment)];
      if (st.segment(l.from_segment).starved ||
          (l.to_segment != 0 && st.segment(l.to_segment).starved)) {
        from = 0;
        continue;
      }
      NodeRef x = leader_ref(l.from_segment);
      NodeRef y = l.to_segment == 0 ? NodeRef{0, -1} : leader_ref(l.to_segment);
      double extra = 0;
      const bool ok = run_hop(ctx, x, y, st.model.transfer_distance(), t + step_extra,
                              ProtocolPhase::transfer, extra);
      step_extra += extra;
      --from;
      if (ok) {
        if (l.to_segment == 0) {
          ++rep.delivered;
        } else {
          ++held[static_cast<std::size_t>(l.to_segment)];
        }
      }
    }
    shift += step_extra;
  }

  // Bookkeeping.
  rep.collisions = rep.chain_collisions + rep.transfer_collisions;
  st.metrics.chain_collisions += rep.chain_collisions;
  st.metrics.transfer_collisions += rep.transfer_collisions;
  const double busy_end = transfer_start + (2 * K - 1) * g + shift;
  rep.overrun_s = std::max(0.0, busy_end - st.model.life.T_d);
  st.overrun_total_s += rep.overrun_s;
  st.metrics.overrun_s += rep.overrun_s;
  st.metrics.collision_count += rep.collisions;
  st.metrics.delivered_per_cycle.push_back(rep.delivered);
  st.metrics.delivered_total += rep.delivered;
  ++st.metrics.cycles_event;

  for (int i = 1; i <= K; ++i) {
    const auto idx = static_cast<std::size_t>(i - 1);
    const auto& p = ctx.plans[idx];
    SegmentCycleReport& sr = rep.segments[idx];
    sr.had_fault = ctx.seg_fault[idx];
    if (!p.active) continue;
    const NodeRef L = leader_at_start[idx];
    sr.leader = L.serial;
    sr.leader_energy = node_at(st, L).used - leader_before[idx];
    Picojoules used_after = 0;
    for (NodeRef r : fielded(ctx, i)) {
      sr.chain.push_back(r.serial);
      used_after += node_at(st, r).used;
      const auto it = ctx.awake.find({r.segment, r.serial});
      sr.awake_s.emplace_back(r.serial, it == ctx.awake.end() ? 0.0 : it->second);
    }
    if (!sr.had_fault) {
      st.leader_energy_sum_J[idx] += to_joules(sr.leader_energy);
      ++st.leader_energy_samples[idx];
      st.active_energy_sum_J[idx] += to_joules(used_after - used_before[idx]) / s;
      ++st.active_energy_samples[idx];
    }
  }

  if (st.options.audit_every_cycle) audit_ledger(st);
  ++st.cycle;
  return rep;
}

void audit_ledger(const NetworkState& st) {
  Picojoules used = 0;
  Picojoules residual = 0;
  for (const Segment& seg : st.population.segments) {
    for (const Node& n : seg.nodes) {
      if (n.battery < 0) throw AccountingError("negative battery");
      used += n.used;
      residual += n.battery;
    }
  }
  if (used + residual != st.metrics.supplied_pj) {
    throw AccountingError("energy ledger does not balance: supplied " +
                          std::to_string(st.metrics.supplied_pj) + " pJ, used " +
                          std::to_string(used) + " pJ, residual " + std::to_string(residual) +
                          " pJ");
  }
}

SimMetrics finalize_metrics(const NetworkState& st) {
  audit_ledger(st);
  SimMetrics m = st.metrics;
  m.used_pj = 0;
  m.residual_pj = 0;
  m.energy_used_J.clear();
  for (const Segment& seg : st.population.segments) {
    std::vector<double> row;
    row.reserve(seg.nodes.size());
    for (const Node& n : seg.nodes) {
      row.push_back(to_joules(n.used));
      m.used_pj += n.used;
      m.residual_pj += n.battery;
    }
    m.energy_used_J.push_back(std::move(row));
  }
  m.utilization_eta =
      utilization_ratio(to_joules(m.used_pj), to_joules(m.supplied_pj));
  // Recovery overruns shift every later cycle back, so they count as elapsed time.
  m.achieved_lifetime_s =
      static_cast<double>(m.cycles_completed) * st.model.life.T_d + st.overrun_total_s;
  const auto K = static_cast<std::size_t>(st.K());
  m.leader_cycle_energy_J.assign(K, 0.0);
  m.active_node_cycle_energy_J.assign(K, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    if (st.leader_energy_samples[i] > 0) {
      m.leader_cycle_energy_J[i] = st.leader_energy_sum_J[i] / st.leader_energy_samples[i];
    }
    if (st.active_energy_samples[i] > 0) {
      m.active_node_cycle_energy_J[i] = st.active_energy_sum_J[i] / st.active_energy_samples[i];
    }
  }
  return m;
}

namespace {

// Steps cycles one by one until the network dies, the horizon or `stop`.
// Returns false once the network is dead.
bool step_until(NetworkState& st, long stop) {
  const long horizon = st.options.horizon_cycles;
  while (st.cycle < stop && st.cycle < horizon) {
    if (!network_alive(st)) {
      st.metrics.death_reason = "segment cannot field s healthy nodes";
      for (const Segment& seg : st.population.segments) {
        if (seg.starved) {
          st.metrics.death_segment = seg.index;
          st.metrics.death_reason = "segment starved";
          break;
        }
      }
      if (st.options.death == DeathCriterion::first_node_dies) {
        st.metrics.death_reason = "first node exhausted or failed";
      }
      return false;
    }
    const CycleReport rep = run_cycle(st);
    if (rep.delivered < st.K()) {
      st.metrics.death_reason = "packets lost";
      return false;
    }
    ++st.metrics.cycles_completed;
  }
  if (st.cycle >= horizon) st.metrics.death_reason = "horizon reached";
  return true;
}

// Jumps whole Sets ahead. Valid only while the population is untouched by
// faults: every node then drains the same amount each Set, and no node gets
// close enough to empty to change any decision.
void fast_forward(NetworkState& st, long first_fault) {
  const int K = st.K();
  const int s = st.model.s;
  long P = 0;
  for (const Segment& seg : st.population.segments) P = std::max(P, seg.scheduled);
  if (P >= first_fault || P >= st.options.horizon_cycles) return;

  // drain[i][slot][offset]: energy of node `slot` in the offset-th cycle of its Round.
  std::vector<std::vector<std::vector<Picojoules>>> drain(static_cast<std::size_t>(K));
  for (int i = 1; i <= K; ++i) {
    const Segment& seg = st.segment(i);
    drain[static_cast<std::size_t>(i - 1)].assign(static_cast<std::size_t>(seg.scheduled),
                                                   std::vector<Picojoules>(static_cast<std::size_t>(s), 0));
  }
  const long horizon = st.options.horizon_cycles;
  while (st.cycle < P) {
    std::vector<std::vector<Picojoules>> before(static_cast<std::size_t>(K));
    for (int i = 1; i <= K; ++i) {
      for (const Node& n : st.segment(i).nodes) before[static_cast<std::size_t>(i - 1)].push_back(n.used);
    }
    const long c = st.cycle;
    st.options.horizon_cycles = c + 1;
    const bool alive = step_until(st, c + 1);
    st.options.horizon_cycles = horizon;
    if (!alive) return;
    st.metrics.death_reason.clear();
    if (st.cycle != c + 1) return;
    if (!st.metrics.faults.empty()) return;
    for (int i = 1; i <= K; ++i) {
      const Segment& seg = st.segment(i);
      if (c >= seg.scheduled) continue;
      for (long j = 0; j < seg.scheduled; ++j) {
        const Picojoules d = seg.nodes[static_cast<std::size_t>(j)].used -
                             before[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
        if (d == 0) continue;
        if (j / s != c / s) throw InvariantViolation("node drained outside its Round");
        drain[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)]
             [static_cast<std::size_t>(c % s)] = d;
      }
    }
  }

  const Picojoules e0 = to_pj(st.model.life.E_o);
  long target = std::min(first_fault, horizon);
  for (int i = 1; i <= K; ++i) {
    const auto& dr = drain[static_cast<std::size_t>(i - 1)];
    const long N = st.segment(i).scheduled;
    Picojoules worst = 0;
    for (const auto& row : dr) worst = std::max(worst, *std::max_element(row.begin(), row.end()));
    long sets = std::numeric_limits<long>::max() / std::max<long>(N, 1);
    for (const auto& row : dr) {
      const Picojoules per_set = std::accumulate(row.begin(), row.end(), Picojoules{0});
      if (per_set > 0) sets = std::min<long>(sets, (e0 - worst) / per_set - 1);
    }
    target = std::min(target, std::max(0L, sets) * N);
  }
  if (target <= st.cycle) return;

  for (int i = 1; i <= K; ++i) {
    Segment& seg = st.segment(i);
    const auto& dr = drain[static_cast<std::size_t>(i - 1)];
    const long N = seg.scheduled;
    const long q = target / N;
    const long r = target % N;
    for (long j = 0; j < N; ++j) {
      const auto& row = dr[static_cast<std::size_t>(j)];
      const Picojoules per_set = std::accumulate(row.begin(), row.end(), Picojoules{0});
      Picojoules partial = 0;
      for (int o = 0; o < s; ++o) {
        if ((j / s) * s + o < r) partial += row[static_cast<std::size_t>(o)];
      }
      Node& n = seg.nodes[static_cast<std::size_t>(j)];
      n.used = q * per_set + partial;
      n.battery = e0 - n.used;
    }
  }
  const long skipped = target - st.cycle;
  st.metrics.cycles_skipped += skipped;
  st.metrics.cycles_completed += skipped;
  st.metrics.delivered_total += skipped * K;
  st.cycle = target;
}

}  // namespace

SimMetrics run(const PlanningModel& model, const DeploymentPlan& plan, std::uint64_t seed,
               const SimOptions& options) {
  const double t_min = cycle_duration_min(model);
  if (model.life.T_d + 1e-12 < t_min) {
    throw ConfigError("T_d " + std::to_string(model.life.T_d) +
                          " s is shorter than the minimum cycle of " + std::to_string(t_min) + " s",
                      "life.T_d_s", 0);
  }
  NetworkState st = make_network(model, plan, seed, options);
  if (options.mode == SimMode::fast_forward) {
    long first_fault = std::numeric_limits<long>::max();
    for (const FaultSpec& f : options.faults) first_fault = std::min(first_fault, f.cycle);
    fast_forward(st, first_fault);
  }
  if (st.metrics.death_reason.empty()) step_until(st, std::numeric_limits<long>::max());
  return finalize_metrics(st);
}

long count_drift_misses(const PlanningModel& m, double drift_bound, std::uint64_t seed) {
  if (drift_bound < 0) throw DomainError("drift bound must be non-negative");
  SplitMix64 rng(seed);
  const double g = m.guard_s();
  const double tau = m.radio.packet_time();
  const int K = m.K();
  const int s = m.s;
  std::vector<double> hop_times;
  for (int phase = 0; phase < 2; ++phase) {
    for (int k = 0; k + 1 < s; ++k) {
      for (int i = 1 + phase; i <= K; i += 2) {
        hop_times.push_back(m.life.T_sense + (phase * (s - 1) + k) * g);
      }
    }
  }
  const double transfer_start = m.life.T_sense + 2 * (s - 1) * g;
  for (const TransferStep& step : transfer_schedule(K)) {
    for (std::size_t l = 0; l < step.links.size(); ++l) {
      hop_times.push_back(transfer_start + (step.step_index - 1) * g);
    }
  }
  long misses = 0;
  for (double t : hop_times) {
    const double rho_x = rng.uniform(-drift_bound, drift_bound);
    const double rho_y = rng.uniform(-drift_bound, drift_bound);
    const double open = t + rho_y * t;
    const double start = t + (g - tau) / 2 + rho_x * t;
    if (start < open || start + tau > open + g) ++misses;
  }
  return misses;
}

}  // namespace wsn
