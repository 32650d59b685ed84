#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsn/deployment_planner.hpp"
#include "wsn/sim_engine.hpp"

namespace wsn {

struct SweepSpec {
  std::vector<double> E_o_J;
  std::vector<std::pair<long, double>> BD;  // (B bits, D bps)
  std::vector<double> T_life_s;
  int s_min = 1;
  int s_max = 10;
};

struct FaultConfig {
  // "0", "auto" (sized by the redundancy rule) or a fixed count per segment.
  std::string redundant = "0";
  double c = 1.0;
  double connected_outer = 1.0;
  int m_retries = 10;
  std::optional<double> t_between_s;  // defaults to T_d
};

// [planner] keys that override the preset defaults.
struct PlannerOverrides {
  std::optional<double> slot_ms;
  std::optional<ChainDistance> chain_distance;
  std::optional<DensityRounding> density_rounding;
};

// A fault given either as cycle@phase or as an absolute time.
struct ConfiguredFault {
  FaultSpec spec;
  std::optional<double> at_time_s;
};

struct ExperimentConfig {
  AreaSpec area;
  RadioParams radio;
  LifetimeSpec life;
  Preset preset = Preset::paper;
  PlannerOptions planner;
  PlannerOverrides overrides;
  std::optional<int> s_override;
  std::vector<std::uint64_t> seeds{1};
  std::vector<ConfiguredFault> faults;
  SimMode mode = SimMode::fast_forward;
  DeathCriterion death = DeathCriterion::segment_starved;
  FaultConfig fault;
  long horizon_cycles = 0;  // 0: until death
  bool record_events = false;
  SweepSpec sweep;
};

/// Parses `[section]` headers and `key = value` lines. Keys may also be
/// written fully qualified (`area.a_m = 60`). '#' starts a comment.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Every key the parser accepts, fully qualified, and the required subset.
const std::vector<std::string>& known_config_keys();
const std::vector<std::string>& required_config_keys();

/// Planner options for the configured preset with any [planner] overrides.
/// Changing the preset afterwards (CLI --preset) re-derives them.
void apply_preset(ExperimentConfig& cfg, Preset preset);

PlanningModel build_model(const ExperimentConfig& cfg);
long resolve_redundant(const ExperimentConfig& cfg, const PlanningModel& model);
SimOptions build_sim_options(const ExperimentConfig& cfg, const PlanningModel& model);

}  // namespace wsn
