#pragma once

#include <cstdint>

namespace wsn {

// Monitored rectangle: K strips of width b (along the sink axis) and breadth a.
struct AreaSpec {
  double breadth_a = 0;
  double seg_width_b = 0;
  int segments_K = 0;
  double sense_range_R = 0;
  double coverage_target_beta = 0;

  double total_area() const { return breadth_a * seg_width_b * segments_K; }
  double segment_area() const { return breadth_a * seg_width_b; }
  void validate() const;
};

// How the sizing density is rounded before the active count is taken.
enum class DensityRounding {
  exact,
  three_decimals_up,  // 0.00733 -> 0.008, reproduces the reference s = 5
};

/// Poisson disc coverage: 1 - exp(-lambda * pi * R^2).
double coverage_fraction(double lambda, double R);

/// Inverse of coverage_fraction in lambda.
double density_for_coverage(double beta, double R);

/// round-half-up(lambda * a * b), never below 1.
int active_count_per_segment(double lambda, double a, double b);

struct CoveragePlan {
  double lambda = 0;  // after rounding
  double lambda_exact = 0;
  int s = 0;
};

CoveragePlan plan_coverage(const AreaSpec& area, DensityRounding rounding);

// Empirical coverage of one a x b strip by s uniform random discs of radius
// R, averaged over `trials` placements and evaluated on a grid_x * grid_y
// lattice of cell centres.
double coverage_monte_carlo(const AreaSpec& area, int s, int trials, std::uint64_t seed,
                            int grid_x = 40, int grid_y = 240);

}  // namespace wsn
