#include "wsn/coverage_planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wsn/errors.hpp"
#include "wsn/geometry.hpp"
#include "wsn/rng.hpp"

namespace wsn {

void AreaSpec::validate() const {
  if (!(breadth_a > 0) || !(seg_width_b > 0)) throw DomainError("segment dimensions must be positive");
  if (segments_K < 1) throw DomainError("need at least one segment");
  if (!(sense_range_R > 0)) throw DomainError("sensing range must be positive");
  if (!(coverage_target_beta > 0 && coverage_target_beta < 1)) {
    throw DomainError("coverage target must lie strictly between 0 and 1");
  }
}

double coverage_fraction(double lambda, double R) {
  if (!(lambda >= 0)) throw DomainError("node density must be non-negative");
  if (!(R > 0)) throw DomainError("sensing range must be positive");
  return -std::expm1(-lambda * std::numbers::pi * R * R);
}

double density_for_coverage(double beta, double R) {
  if (!(beta > 0 && beta < 1)) throw DomainError("coverage target must lie in (0, 1)");
  if (!(R > 0)) throw DomainError("sensing range must be positive");
  return -std::log1p(-beta) / (std::numbers::pi * R * R);
}

int active_count_per_segment(double lambda, double a, double b) {
  if (!(lambda > 0)) throw DomainError("node density must be positive");
  const double raw = lambda * a * b;
  return std::max(1, static_cast<int>(std::floor(raw + 0.5)));
}

CoveragePlan plan_coverage(const AreaSpec& area, DensityRounding rounding) {
  area.validate();
  CoveragePlan plan;
  plan.lambda_exact = density_for_coverage(area.coverage_target_beta, area.sense_range_R);
  plan.lambda = plan.lambda_exact;
  if (rounding == DensityRounding::three_decimals_up) {
    // The epsilon keeps values already on the grid (0.008) from stepping up.
    plan.lambda = std::ceil(plan.lambda_exact * 1000.0 - 1e-9) / 1000.0;
  }
  plan.s = active_count_per_segment(plan.lambda, area.breadth_a, area.seg_width_b);
  return plan;
}

double coverage_monte_carlo(const AreaSpec& area, int s, int trials, std::uint64_t seed,
                            int grid_x, int grid_y) {
  if (s < 1 || trials < 1 || grid_x < 1 || grid_y < 1) {
    throw DomainError("coverage_monte_carlo needs positive counts");
  }
  const double w = area.seg_width_b;
  const double h = area.breadth_a;
  const double r2 = area.sense_range_R * area.sense_range_R;
  SplitMix64 rng(seed);
  std::vector<Point> nodes(static_cast<std::size_t>(s));
  double total = 0;
  for (int t = 0; t < trials; ++t) {
    for (auto& n : nodes) {
      n.x = rng.uniform(0.0, w);
      n.y = rng.uniform(0.0, h);
    }
    long covered = 0;
    for (int gx = 0; gx < grid_x; ++gx) {
      const double px = (gx + 0.5) * w / grid_x;
      for (int gy = 0; gy < grid_y; ++gy) {
        const double py = (gy + 0.5) * h / grid_y;
        for (const auto& n : nodes) {
          const double dx = n.x - px;
          const double dy = n.y - py;
          if (dx * dx + dy * dy <= r2) {
            ++covered;
            break;
          }
        }
      }
    }
    total += static_cast<double>(covered) / (static_cast<double>(grid_x) * grid_y);
  }
  return total / trials;
}

}  // namespace wsn
