#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wsn/config.hpp"
#include "wsn/errors.hpp"
#include "wsn/report.hpp"

namespace py = pybind11;
using namespace wsn;

namespace {

py::dict plan_dict(const PlanningModel& m, const DeploymentPlan& p) {
  py::dict d;
  d["s"] = p.s;
  d["lambda"] = p.lambda;
  d["node_count"] = p.node_count;
  d["node_count_exact"] = p.node_count_exact;
  d["round_energy_J"] = p.round_energy_J;
  d["total_N"] = p.total_N;
  d["cycle_min_s"] = cycle_duration_min(m);
  d["cycle_min_printed_s"] = cycle_duration_min_printed(m);
  return d;
}

py::dict metrics_dict(const SimMetrics& r) {
  py::dict d;
  d["achieved_lifetime_s"] = r.achieved_lifetime_s;
  d["cycles_completed"] = r.cycles_completed;
  d["cycles_skipped"] = r.cycles_skipped;
  d["death_reason"] = r.death_reason;
  d["death_segment"] = r.death_segment;
  d["utilization_eta"] = r.utilization_eta;
  d["delivered_total"] = r.delivered_total;
  d["collision_count"] = r.collision_count;
  d["chain_collisions"] = r.chain_collisions;
  d["transfer_collisions"] = r.transfer_collisions;
  d["leader_cycle_energy_J"] = r.leader_cycle_energy_J;
  d["active_node_cycle_energy_J"] = r.active_node_cycle_energy_J;
  d["faults"] = r.faults.size();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Segmented-chain sensor deployment planner and protocol simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<AccountingError>(m, "AccountingError", PyExc_RuntimeError);

  py::class_<ExperimentConfig>(m, "Config")
      .def_property_readonly("K", [](const ExperimentConfig& c) { return c.area.segments_K; })
      .def_property_readonly("E_o_J", [](const ExperimentConfig& c) { return c.life.E_o; })
      .def_property_readonly("T_d_s", [](const ExperimentConfig& c) { return c.life.T_d; })
      .def_property_readonly("seeds", [](const ExperimentConfig& c) { return c.seeds; })
      .def_property(
          "preset", [](const ExperimentConfig& c) { return std::string(to_string(c.preset)); },
          [](ExperimentConfig& c, const std::string& p) { apply_preset(c, parse_preset(p)); });

  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));

  m.def(
      "plan",
      [](const ExperimentConfig& cfg) {
        const PlanningModel model = build_model(cfg);
        return plan_dict(model, compute_plan(model));
      },
      py::arg("config"));
  m.def(
      "plan_csv",
      [](const ExperimentConfig& cfg) { return plan_table(compute_plan(build_model(cfg))).to_csv(); },
      py::arg("config"));

  m.def(
      "simulate",
      [](const ExperimentConfig& cfg, std::uint64_t seed, const std::string& mode, long horizon) {
        const PlanningModel model = build_model(cfg);
        SimOptions o = build_sim_options(cfg, model);
        if (mode == "event") {
          o.mode = SimMode::event;
        } else if (mode == "fast-forward") {
          o.mode = SimMode::fast_forward;
        } else {
          throw DomainError("mode must be event or fast-forward");
        }
        if (horizon > 0) o.horizon_cycles = horizon;
        const DeploymentPlan plan = compute_plan(model);
        SimMetrics r;
        {
          py::gil_scoped_release release;
          r = run(model, plan, seed, o);
        }
        return metrics_dict(r);
      },
      py::arg("config"), py::arg("seed") = 1, py::arg("mode") = "fast-forward",
      py::arg("horizon_cycles") = 0);

  m.def("coverage_fraction", &coverage_fraction, py::arg("density"), py::arg("R"));
  m.def("density_for_coverage", &density_for_coverage, py::arg("beta"), py::arg("R"));
  m.def(
      "tx_packet_energy",
      [](double distance, long bits) {
        return tx_packet_energy(RadioParams::reference(), distance, bits);
      },
      py::arg("distance_m"), py::arg("bits") = 512);
  m.def(
      "transfer_schedule",
      [](int K) {
        std::vector<std::vector<std::pair<int, int>>> out;
        for (const TransferStep& s : transfer_schedule(K)) {
          std::vector<std::pair<int, int>> links;
          for (const TransferLink& l : s.links) links.emplace_back(l.from_segment, l.to_segment);
          out.push_back(std::move(links));
        }
        return out;
      },
      py::arg("K"));
}
