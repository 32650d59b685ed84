#include "wsn/experiments.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>

#include "wsn/errors.hpp"

namespace wsn {

namespace {

constexpr double kYear = 365.0 * 86400.0;

template <typename Fn>
auto run_jobs(std::size_t n, Fn fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<std::future<R>> jobs;
  jobs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) jobs.push_back(std::async(std::launch::async, fn, k));
  std::vector<R> out;
  out.reserve(n);
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open fixture file '" + path + "'", "", 0);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

std::vector<SeedResult> simulate_seeds(const ExperimentConfig& cfg) {
  const PlanningModel model = build_model(cfg);
  const DeploymentPlan plan = compute_plan(model);
  const SimOptions opts = build_sim_options(cfg, model);
  return run_jobs(cfg.seeds.size(), [&](std::size_t k) {
    return SeedResult{cfg.seeds[k], run(model, plan, cfg.seeds[k], opts)};
  });
}

Table sweep_initial_energy(const ExperimentConfig& cfg) {
  Table t{{"B_bits", "D_bps", "E_o_J", "total_N"}, {}};
  auto pairs = cfg.sweep.BD;
  if (pairs.empty()) pairs.emplace_back(cfg.radio.packet_bits, cfg.radio.data_rate_bps);
  auto energies = cfg.sweep.E_o_J;
  if (energies.empty()) energies.push_back(cfg.life.E_o);
  for (const auto& [B, D] : pairs) {
    for (double E : energies) {
      ExperimentConfig c = cfg;
      c.radio.packet_bits = B;
      c.radio.data_rate_bps = D;
      c.life.E_o = E;
      apply_preset(c, cfg.preset);
      const DeploymentPlan plan = compute_plan(build_model(c));
      t.add({std::to_string(B), fmt6(D), fmt6(E), std::to_string(plan.total_N)});
    }
  }
  return t;
}

Table sweep_lifetime(const ExperimentConfig& cfg, std::uint64_t seed) {
  auto targets = cfg.sweep.T_life_s;
  if (targets.empty()) targets.push_back(cfg.life.T_life);
  const auto results = run_jobs(targets.size(), [&](std::size_t k) {
    ExperimentConfig c = cfg;
    c.life.T_life = targets[k];
    const PlanningModel model = build_model(c);
    const DeploymentPlan plan = compute_plan(model);
    SimOptions opts = build_sim_options(c, model);
    opts.faults.clear();
    opts.record_events = false;
    return run(model, plan, seed, opts).achieved_lifetime_s;
  });
  Table t{{"T_life_s", "projected_years", "obtained_years", "ratio"}, {}};
  for (std::size_t k = 0; k < targets.size(); ++k) {
    t.add({fmt6(targets[k]), fmt6(targets[k] / kYear), fmt6(results[k] / kYear),
           fmt6(results[k] / targets[k])});
  }
  return t;
}

Table sweep_coverage(const ExperimentConfig& cfg, std::uint64_t seed) {
  Table t{{"s", "lambda", "coverage_fraction", "coverage_sampled"}, {}};
  const double ab = cfg.area.segment_area();
  for (int s = cfg.sweep.s_min; s <= cfg.sweep.s_max; ++s) {
    const double lambda = s / ab;
    t.add({std::to_string(s), fmt6(lambda), fmt6(coverage_fraction(lambda, cfg.area.sense_range_R)),
           fmt6(coverage_monte_carlo(cfg.area, s, 50, seed))});
  }
  return t;
}

Table sweep_segment_energy(const ExperimentConfig& cfg, std::uint64_t seed) {
  const PlanningModel model = build_model(cfg);
  const DeploymentPlan plan = compute_plan(model);
  SimOptions opts = build_sim_options(cfg, model);
  opts.faults.clear();
  opts.mode = SimMode::event;
  opts.record_events = false;
  opts.horizon_cycles = *std::max_element(plan.node_count.begin(), plan.node_count.end());
  return segment_energy_table(model, run(model, plan, seed, opts));
}

PublishedTables load_published_tables(const std::string& dir) {
  PublishedTables p;
  for (const auto& r : read_csv(dir + "/table1_nodes_per_segment.csv")) {
    p.nodes_per_segment.push_back(std::stol(r.at(1)));
  }
  for (const auto& r : read_csv(dir + "/table2_initial_energy.csv")) {
    p.initial_energy.push_back({std::stol(r.at(0)), std::stod(r.at(1)), std::stod(r.at(2)),
                                std::stol(r.at(3))});
  }
  for (const auto& r : read_csv(dir + "/table3_lifetime.csv")) {
    p.lifetime_years.emplace_back(std::stod(r.at(0)), std::stod(r.at(1)));
  }
  return p;
}

FixtureReport fixtures_diff(const ExperimentConfig& cfg, const PublishedTables& paper,
                            std::uint64_t seed) {
  FixtureReport rep;
  const PlanningModel model = build_model(cfg);
  const DeploymentPlan plan = compute_plan(model);

  rep.nodes = Table{{"segment", "published_N_i", "planned_N_i", "planned_over_published"}, {}};
  long paper_total = 0;
  const std::size_t n = std::min(paper.nodes_per_segment.size(), plan.node_count.size());
  for (std::size_t k = 0; k < n; ++k) {
    const long pub = paper.nodes_per_segment[k];
    paper_total += pub;
    rep.nodes.add({std::to_string(k + 1), std::to_string(pub), std::to_string(plan.node_count[k]),
                   fmt6(static_cast<double>(plan.node_count[k]) / pub)});
  }
  rep.nodes.add({"TOTAL", std::to_string(paper_total), std::to_string(plan.total_N),
                 fmt6(static_cast<double>(plan.total_N) / paper_total)});

  rep.energy = Table{{"B_bits", "D_bps", "E_o_J", "published_total_N", "planned_total_N"}, {}};
  for (const auto& row : paper.initial_energy) {
    ExperimentConfig c = cfg;
    c.radio.packet_bits = row.B_bits;
    c.radio.data_rate_bps = row.D_bps;
    c.life.E_o = row.E_o_J;
    apply_preset(c, cfg.preset);
    const DeploymentPlan p = compute_plan(build_model(c));
    rep.energy.add({std::to_string(row.B_bits), fmt6(row.D_bps), fmt6(row.E_o_J),
                    std::to_string(row.total_N), std::to_string(p.total_N)});
  }

  ExperimentConfig lc = cfg;
  lc.sweep.T_life_s.clear();
  for (const auto& [proj, obt] : paper.lifetime_years) lc.sweep.T_life_s.push_back(proj * kYear);
  const Table sim = sweep_lifetime(lc, seed);
  rep.lifetime = Table{{"projected_years", "published_obtained_years", "published_ratio",
                        "simulated_years", "simulated_ratio"},
                       {}};
  for (std::size_t k = 0; k < paper.lifetime_years.size(); ++k) {
    const auto [proj, obt] = paper.lifetime_years[k];
    rep.lifetime.add({fmt6(proj), fmt6(obt), fmt6(obt / proj),
                      sim.rows[k][sim.column("obtained_years")], sim.rows[k][sim.column("ratio")]});
  }

  rep.summary = Table{{"quantity", "published", "planned"}, {}};
  const auto& pn = paper.nodes_per_segment;
  if (pn.size() >= 2 && n >= 2) {
    const double pub_inc = static_cast<double>(pn.front() - pn.back()) / static_cast<double>(pn.size() - 1);
    const double our_inc = (plan.node_count_exact.front() - plan.node_count_exact[n - 1]) /
                           static_cast<double>(n - 1);
    rep.summary.add({"increment_per_segment", fmt6(pub_inc), fmt6(our_inc)});
    rep.summary.add({"N_1_over_N_K", fmt6(static_cast<double>(pn.front()) / pn.back()),
                     fmt6(static_cast<double>(plan.node_count.front()) / plan.node_count[n - 1])});
    rep.summary.add({"E_1_over_E_K", fmt6(static_cast<double>(pn.front()) / pn.back()),
                     fmt6(plan.round_energy_J.front() / plan.round_energy_J[n - 1])});
    rep.summary.add({"total_N", std::to_string(paper_total), std::to_string(plan.total_N)});
  }
  return rep;
}

}  // namespace wsn
