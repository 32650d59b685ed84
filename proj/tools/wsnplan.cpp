// wsnplan: deployment planning and protocol simulation from a config file.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "wsn/errors.hpp"
#include "wsn/experiments.hpp"

namespace fs = std::filesystem;
using namespace wsn;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::string preset;
  std::string mode;
};

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (!c.preset.empty()) {
    try {
      apply_preset(cfg, parse_preset(c.preset));
    } catch (const DomainError& e) {
      throw ConfigError(e.what(), "--preset", 0);
    }
  }
  if (c.mode == "event") cfg.mode = SimMode::event;
  if (c.mode == "fast-forward") cfg.mode = SimMode::fast_forward;
  if (c.seed) cfg.seeds = {*c.seed};
  fs::create_directories(c.out);
  return cfg;
}

void emit(const Common& c, const std::string& name, const Table& t) {
  write_file((fs::path(c.out) / (name + ".csv")).string(), t.to_csv());
}

void emit_chart(const Common& c, const std::string& name, const Table& t, const std::string& title,
                std::size_t x, const std::vector<std::size_t>& ys) {
  emit(c, name, t);
  write_file((fs::path(c.out) / (name + ".svg")).string(), svg_chart(t, title, x, ys));
}

int cmd_plan(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const PlanningModel model = build_model(cfg);
  const DeploymentPlan plan = compute_plan(model);
  const Table t = plan_table(plan);
  emit_chart(c, "plan", t, "Nodes per segment", 0, {1});
  emit(c, "plan_detail", plan_detail_table(model, plan));
  emit(c, "timing", timing_table(model));
  std::cout << t.to_csv() << timing_table(model).to_csv();
  return 0;
}

int cmd_simulate(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const PlanningModel model = build_model(cfg);
  const auto runs = simulate_seeds(cfg);
  const Table summary = simulation_summary_table(model, runs);
  emit(c, "summary", summary);
  for (const SeedResult& r : runs) {
    const std::string tag = "_" + std::to_string(r.seed);
    emit(c, "segment_energy" + tag, segment_energy_table(model, r.metrics));
    emit(c, "faults" + tag, fault_table(r.metrics.faults));
    if (cfg.record_events) emit(c, "events" + tag, event_log_table(r.metrics.event_log));
  }
  std::cout << summary.to_csv();
  return 0;
}

int cmd_sweep(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const std::uint64_t seed = cfg.seeds.front();
  const Table energy = sweep_initial_energy(cfg);
  emit_chart(c, "sweep_initial_energy", energy, "Initial energy vs total nodes", 2, {3});
  const Table life = sweep_lifetime(cfg, seed);
  emit_chart(c, "sweep_lifetime", life, "Projected vs obtained lifetime", 1, {1, 2});
  const Table cov = sweep_coverage(cfg, seed);
  emit_chart(c, "sweep_coverage", cov, "Coverage fraction", 0, {2, 3});
  const Table seg = sweep_segment_energy(cfg, seed);
  emit_chart(c, "sweep_segment_energy", seg, "Per-cycle energy of active nodes", 0, {3, 4});
  std::cout << energy.to_csv() << life.to_csv() << cov.to_csv() << seg.to_csv();
  return 0;
}

int cmd_fixtures(const Common& c, const std::string& dir) {
  const ExperimentConfig cfg = load(c);
  const FixtureReport rep = fixtures_diff(cfg, load_published_tables(dir), cfg.seeds.front());
  emit(c, "fixtures_nodes", rep.nodes);
  emit(c, "fixtures_energy", rep.energy);
  emit(c, "fixtures_lifetime", rep.lifetime);
  emit(c, "fixtures_summary", rep.summary);
  std::cout << rep.nodes.to_csv() << rep.energy.to_csv() << rep.lifetime.to_csv()
            << rep.summary.to_csv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segmented chain WSN deployment planner and protocol simulator"};
  app.require_subcommand(1);
  Common common;
  std::string fixtures_dir = "fixtures";

  auto add_common = [&](CLI::App* sub, bool sim) {
    sub->add_option("--config", common.config, "experiment config file")->required();
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--preset", common.preset, "planner preset")
        ->check(CLI::IsMember({"paper", "physical"}));
    if (sim) {
      sub->add_option("--seed", common.seed, "deployment seed (overrides config seeds)");
      sub->add_option("--mode", common.mode, "simulation mode")
          ->check(CLI::IsMember({"event", "fast-forward"}));
    }
  };
  auto* plan = app.add_subcommand("plan", "per-segment node counts and timing");
  add_common(plan, false);
  auto* sim = app.add_subcommand("simulate", "run the protocol until network death");
  add_common(sim, true);
  auto* sweep = app.add_subcommand("sweep", "energy, lifetime, coverage and per-segment sweeps");
  add_common(sweep, true);
  auto* fix = app.add_subcommand("fixtures-diff", "compare against the published tables");
  add_common(fix, true);
  fix->add_option("--fixtures", fixtures_dir, "directory of published-table CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*plan) return cmd_plan(common);
    if (*sim) return cmd_simulate(common);
    if (*sweep) return cmd_sweep(common);
    if (*fix) return cmd_fixtures(common, fixtures_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const AccountingError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
