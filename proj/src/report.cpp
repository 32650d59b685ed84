#include "wsn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "wsn/errors.hpp"

namespace wsn {

std::string fmt6(double v) {
  if (v == 0) return "0";  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw DomainError("row width does not match the header");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
  return out;
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DomainError("no column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

double Table::number(std::size_t row, std::size_t col) const {
  const std::string& cell = rows.at(row).at(col);
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') throw DomainError("cell '" + cell + "' is not numeric");
  return v;
}

std::string svg_chart(const Table& t, const std::string& title, std::size_t x_col,
                      const std::vector<std::size_t>& y_cols) {
  const double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  struct Pt {
    double x, y;
  };
  std::vector<std::vector<Pt>> series(y_cols.size());
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    double x = 0;
    try {
      x = t.number(r, x_col);
    } catch (const DomainError&) {
      continue;
    }
    for (std::size_t k = 0; k < y_cols.size(); ++k) {
      const double y = t.number(r, y_cols[k]);
      series[k].push_back({x, y});
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x1 > x0)) {
    x0 -= 1;
    x1 += 1;
  }
  if (!(y1 > y0)) {
    y0 -= 1;
    y1 += 1;
  }
  y0 = std::min(y0, 0.0);
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << t.columns[x_col] << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    o << "<text x=\"" << sx(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
      << fmt6(xv) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << fmt6(yv)
      << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* c = colors[k % 5];
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (std::size_t p = 0; p < series[k].size(); ++p) {
      if (p) o << ' ';
      o << fmt6(sx(series[k][p].x)) << ',' << fmt6(sy(series[k][p].y));
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\""
      << c << "\">" << t.columns[y_cols[k]] << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

Table plan_table(const DeploymentPlan& plan) {
  Table t{{"segment", "N_i", "E_i_J", "n_di"}, {}};
  double e_sum = 0, d_sum = 0;
  long n_sum = 0;
  for (int i = 1; i <= plan.K(); ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    t.add({std::to_string(i), std::to_string(plan.node_count[k]), fmt6(plan.round_energy_J[k]),
           fmt6(plan.density[k])});
    n_sum += plan.node_count[k];
    e_sum += plan.round_energy_J[k];
    d_sum += plan.density[k];
  }
  t.add({"TOTAL", std::to_string(n_sum), fmt6(e_sum), fmt6(d_sum)});
  return t;
}

Table plan_detail_table(const PlanningModel& model, const DeploymentPlan& plan) {
  Table t{{"segment", "N_i_exact", "N_i", "leader_J", "idle_leader_max_s", "sleep_leader_min_s"}, {}};
  for (int i = 1; i <= plan.K(); ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    t.add({std::to_string(i), fmt6(plan.node_count_exact[k]), std::to_string(plan.node_count[k]),
           fmt6(leader_cycle_energy(model, i)), fmt6(plan.timing.idle_leader_max_s[k]),
           fmt6(plan.timing.sleep_leader_min_s[k])});
  }
  return t;
}

Table timing_table(const PlanningModel& model) {
  Table t{{"quantity", "value"}, {}};
  t.add({"s", std::to_string(model.s)});
  t.add({"lambda", fmt6(model.lambda)});
  t.add({"lambda_exact", fmt6(model.lambda_exact)});
  t.add({"slot_s", fmt6(model.slot_s())});
  t.add({"guard_s", fmt6(model.guard_s())});
  t.add({"cycle_min_s", fmt6(cycle_duration_min(model))});
  t.add({"cycle_min_printed_s", fmt6(cycle_duration_min_printed(model))});
  t.add({"sleep_active_s", fmt6(sleep_time_active(model))});
  t.add({"T_d_s", fmt6(model.life.T_d)});
  return t;
}

Table event_log_table(const std::vector<EventRecord>& log) {
  Table t{{"time_s", "segment", "serial", "event", "energy_uJ", "battery_J"}, {}};
  t.rows.reserve(log.size());
  for (const EventRecord& e : log) {
    t.rows.push_back({fmt6(e.time_s), std::to_string(e.segment), std::to_string(e.serial), e.event,
                      fmt6(e.energy_uJ), fmt6(e.battery_J)});
  }
  return t;
}

Table fault_table(const std::vector<FaultRecord>& faults) {
  Table t{{"cycle", "phase", "cause", "verdict", "suspect_segment", "suspect_serial",
           "detector_segment", "detector_serial", "beacon", "degraded", "failed_serial",
           "substitute"},
          {}};
  for (const FaultRecord& f : faults) {
    const auto& d = f.diagnosis;
    const char* beacon = d.beacon == BeaconOutcome::succeeded ? "ok"
                         : d.beacon == BeaconOutcome::failed  ? "failed"
                                                              : "none";
    t.add({std::to_string(f.cycle), std::string(to_string(f.phase)),
           f.injected ? "fault" : "depleted",
           f.injected ? std::string(to_string(d.verdict)) : "battery",
           std::to_string(d.suspect.segment), std::to_string(d.suspect.serial),
           std::to_string(d.detector.segment), std::to_string(d.detector.serial), beacon,
           d.degraded ? "1" : "0", std::to_string(f.failed.serial),
           f.substitute ? std::to_string(*f.substitute) : "none"});
  }
  return t;
}

Table segment_energy_table(const PlanningModel& model, const SimMetrics& m) {
  Table t{{"segment", "analytic_leader_J", "simulated_leader_J", "analytic_active_J",
           "simulated_active_J"},
          {}};
  for (int i = 1; i <= model.K(); ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    t.add({std::to_string(i), fmt6(leader_cycle_energy(model, i)), fmt6(m.leader_cycle_energy_J[k]),
           fmt6(segment_round_energy(model, i) / model.s), fmt6(m.active_node_cycle_energy_J[k])});
  }
  return t;
}

Table simulation_summary_table(const PlanningModel& model, const std::vector<SeedResult>& runs) {
  Table t{{"seed", "lifetime_s", "lifetime_years", "achieved_over_target", "cycles",
           "event_cycles", "skipped_cycles", "delivered", "collisions", "eta", "overrun_s",
           "fault_events", "long_chain_edges", "death"},
          {}};
  const double year = 365.0 * 86400.0;
  for (const SeedResult& r : runs) {
    const SimMetrics& m = r.metrics;
    t.add({std::to_string(r.seed), fmt6(m.achieved_lifetime_s), fmt6(m.achieved_lifetime_s / year),
           fmt6(m.achieved_lifetime_s / model.life.T_life), std::to_string(m.cycles_completed),
           std::to_string(m.cycles_event), std::to_string(m.cycles_skipped),
           std::to_string(m.delivered_total), std::to_string(m.collision_count),
           fmt6(m.utilization_eta), fmt6(m.overrun_s), std::to_string(m.faults.size()),
           std::to_string(m.long_chain_edges), m.death_reason});
  }
  return t;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed for " + path);
}

}  // namespace wsn
