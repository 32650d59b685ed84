#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "wsn/coverage_planner.hpp"
#include "wsn/energy_model.hpp"

namespace wsn {

struct LifetimeSpec {
  double T_life = 0;   // required network lifetime, s
  double E_o = 0;      // initial energy per node, J
  double T_sense = 0;  // sensing phase per cycle, s
  double T_d = 0;      // data gathering cycle, s

  void validate() const;
};

// `paper` reproduces the printed per-round formulas; `physical` accounts for
// what the simulated protocol actually does.
enum class Preset { paper, physical };

enum class ChainDistance { breadth_a, segment_width_b };
enum class LeaderReceptions { printed, per_protocol };
enum class LeaderIdle { slot_formula, per_reception_guard };

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view text);

struct PlannerOptions {
  Preset preset = Preset::paper;
  ChainDistance chain_distance = ChainDistance::breadth_a;
  LeaderReceptions leader_receptions = LeaderReceptions::printed;
  LeaderIdle leader_idle = LeaderIdle::slot_formula;
  bool follower_sensing = false;
  DensityRounding density_rounding = DensityRounding::three_decimals_up;
  double slot_ms = 25.0;

  // Defaults for a preset. The paper slot is B/D floored to whole ms
  // (25 ms at 512 bits / 20 kbps); the physical slot is B/D exactly.
  static PlannerOptions for_preset(Preset preset, const RadioParams& radio);
};

// Everything the per-segment formulas need, with the active count fixed.
struct PlanningModel {
  AreaSpec area;
  RadioParams radio;
  LifetimeSpec life;
  PlannerOptions options;
  int s = 0;
  double lambda = 0;
  double lambda_exact = 0;

  int K() const { return area.segments_K; }
  double slot_s() const { return options.slot_ms / 1000.0; }
  double guard_s() const { return 2.0 * slot_s(); }
  double chain_hop_distance() const;
  double transfer_distance() const { return 2.0 * area.seg_width_b; }
};

// Sizes s from the coverage target (unless overridden) and validates inputs.
PlanningModel make_model(const AreaSpec& area, const RadioParams& radio, const LifetimeSpec& life,
                         const PlannerOptions& options, std::optional<int> s_override = std::nullopt);

double leader_receptions(const PlanningModel& m, int i);
double leader_idle_time(const PlanningModel& m, int i);
double leader_cycle_energy(const PlanningModel& m, int i);
double follower_round_energy(const PlanningModel& m);
double segment_round_energy(const PlanningModel& m, int i);
double segment_density(const PlanningModel& m, int i);
double segment_node_count_exact(const PlanningModel& m, int i);
long segment_node_count(const PlanningModel& m, int i);

// Timing, in seconds, using the model's slot.
double idle_time_leader_max(const PlanningModel& m, int i);
double cycle_duration_min(const PlanningModel& m);
double cycle_duration_min_printed(const PlanningModel& m);
double sleep_time_active(const PlanningModel& m);
double sleep_time_leader_min(const PlanningModel& m, int i);

// Rounds x up to a multiple of s; an exact multiple is kept as is.
long ceil_to_multiple(double x, int s);

struct TimingTable {
  double slot_s = 0;
  double guard_s = 0;
  double cycle_min_s = 0;
  double cycle_min_printed_s = 0;
  double sleep_active_s = 0;
  std::vector<double> idle_leader_max_s;  // per segment
  std::vector<double> sleep_leader_min_s;
};

struct DeploymentPlan {
  int s = 0;
  double lambda = 0;
  std::vector<double> round_energy_J;  // index 0 is segment 1
  std::vector<double> density;         // nodes / m^2
  std::vector<double> node_count_exact;
  std::vector<long> node_count;
  long total_N = 0;
  TimingTable timing;

  int K() const { return static_cast<int>(node_count.size()); }
  // Lifetime the rounded deployment supports on paper (min over segments).
  double supported_lifetime_s = 0;
};

DeploymentPlan compute_plan(const PlanningModel& m);
long total_nodes(const DeploymentPlan& plan);

}  // namespace wsn
