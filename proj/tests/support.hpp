#pragma once

#include <optional>

#include "wsn/deployment_planner.hpp"
#include "wsn/sim_engine.hpp"

namespace wsn::testing {

inline AreaSpec reference_area(int K = 10) { return AreaSpec{60, 10, K, 10, 0.9}; }

inline LifetimeSpec reference_life(double E_o = 1000) {
  return LifetimeSpec{5 * 365 * 86400.0, E_o, 3, 4.4};
}

inline PlanningModel model_for(Preset preset, int K = 10, double E_o = 1000,
                               std::optional<int> s = std::nullopt) {
  const RadioParams r = RadioParams::reference();
  return make_model(reference_area(K), r, reference_life(E_o), PlannerOptions::for_preset(preset, r),
                    s);
}

// Hand-sized deployment: the planner's energies with given node counts.
inline DeploymentPlan fixed_plan(const PlanningModel& m, std::vector<long> counts) {
  DeploymentPlan p = compute_plan(m);
  p.node_count = std::move(counts);
  p.total_N = total_nodes(p);
  return p;
}

}  // namespace wsn::testing
