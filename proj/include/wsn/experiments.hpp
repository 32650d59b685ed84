#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsn/config.hpp"
#include "wsn/report.hpp"

namespace wsn {

// Independent runs execute concurrently; results come back in input order.
std::vector<SeedResult> simulate_seeds(const ExperimentConfig& cfg);

// total_N for every (B, D) pair and initial energy.
Table sweep_initial_energy(const ExperimentConfig& cfg);
// Simulated lifetime against each lifetime target (the deployment is
// re-planned per target).
Table sweep_lifetime(const ExperimentConfig& cfg, std::uint64_t seed);
// Coverage of s discs per segment: analytic and sampled.
Table sweep_coverage(const ExperimentConfig& cfg, std::uint64_t seed);
// Planner vs simulator per-cycle energy over one fault-free Set.
Table sweep_segment_energy(const ExperimentConfig& cfg, std::uint64_t seed);

struct PublishedTables {
  std::vector<long> nodes_per_segment;  // Table I, segment 1..K
  struct EnergyRow {
    long B_bits = 0;
    double D_bps = 0;
    double E_o_J = 0;
    long total_N = 0;
  };
  std::vector<EnergyRow> initial_energy;  // Table II
  std::vector<std::pair<double, double>> lifetime_years;  // Table III: projected, obtained
};

PublishedTables load_published_tables(const std::string& dir);

struct FixtureReport {
  Table nodes;      // per segment: published vs planned
  Table energy;     // per (B, D, E_o)
  Table lifetime;   // per target
  Table summary;    // headline comparisons
};

FixtureReport fixtures_diff(const ExperimentConfig& cfg, const PublishedTables& paper,
                            std::uint64_t seed);

}  // namespace wsn
