#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wsn/deployment_planner.hpp"
#include "wsn/sim_engine.hpp"

namespace wsn {

// Six significant digits, the one print rule for every reported number.
std::string fmt6(double v);

// A report table. Cells are kept preformatted so a TOTAL row can carry a
// label; CSV output is header row, comma separated, LF terminated.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string to_csv() const;
  std::size_t column(const std::string& name) const;
  // Numeric value of a cell; throws if it does not parse.
  double number(std::size_t row, std::size_t col) const;
};

// Minimal polyline chart of y columns against an x column. Rows whose x
// cell is not numeric (TOTAL) are skipped.
std::string svg_chart(const Table& t, const std::string& title, std::size_t x_col,
                      const std::vector<std::size_t>& y_cols);

Table plan_table(const DeploymentPlan& plan);
Table plan_detail_table(const PlanningModel& model, const DeploymentPlan& plan);
Table timing_table(const PlanningModel& model);
Table event_log_table(const std::vector<EventRecord>& log);
Table fault_table(const std::vector<FaultRecord>& faults);
Table segment_energy_table(const PlanningModel& model, const SimMetrics& m);

struct SeedResult {
  std::uint64_t seed = 0;
  SimMetrics metrics;
};
Table simulation_summary_table(const PlanningModel& model, const std::vector<SeedResult>& runs);

void write_file(const std::string& path, const std::string& content);

}  // namespace wsn
