#include "wsn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wsn/errors.hpp"
#include "wsn/fault_tolerance.hpp"

namespace wsn {

namespace {

const std::vector<std::string> kRequired = {
    "area.a_m",          "area.b_m",          "area.K",           "area.R_sense_m",
    "area.beta",         "radio.e_t_uJ_s",    "radio.e_r_uJ_s",   "radio.e_d_nJ_m2_s",
    "radio.e_id_uJ_s",   "radio.e_sen_uJ_s",  "radio.n",          "radio.D_bps",
    "radio.B_bits",      "life.T_life_s",     "life.E_o_J",       "life.T_sense_s",
    "life.T_d_s",
};

const std::vector<std::string> kOptional = {
    "preset",          "seeds",          "faults",           "mode",
    "death",           "planner.slot_ms", "planner.chain_distance", "planner.density_rounding",
    "planner.s",       "fault.redundant", "fault.c",          "fault.connected_outer",
    "fault.m_retries", "fault.t_between_s", "sim.horizon_cycles", "sim.record_events",
    "sweep.E_o_J",     "sweep.BD",       "sweep.T_life_s",   "sweep.s",
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const Entry& at(const std::string& key) const { return entries_.at(key); }

  double number(const std::string& key) const {
    const Entry& e = at(key);
    return parse_double(key, e.value, e.line);
  }
  long integer(const std::string& key) const {
    const Entry& e = at(key);
    return parse_long(key, e.value, e.line);
  }

  static double parse_double(const std::string& key, std::string_view text, int line) {
    text = trim(text);
    double v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
      throw ConfigError("line " + std::to_string(line) + ": " + key + " expects a number, got '" +
                            std::string(text) + "'",
                        key, line);
    }
    return v;
  }
  static long parse_long(const std::string& key, std::string_view text, int line) {
    text = trim(text);
    long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      throw ConfigError("line " + std::to_string(line) + ": " + key +
                            " expects an integer, got '" + std::string(text) + "'",
                        key, line);
    }
    return v;
  }

 private:
  std::map<std::string, Entry> entries_;
};

[[noreturn]] void bad(const std::string& key, int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + key + ": " + msg, key, line);
}

ProtocolPhase parse_phase(const std::string& key, std::string_view t, int line) {
  if (t == "sensing") return ProtocolPhase::sensing;
  if (t == "chain") return ProtocolPhase::chain;
  if (t == "transfer") return ProtocolPhase::transfer;
  bad(key, line, "unknown phase '" + std::string(t) + "' (sensing|chain|transfer)");
}

// <cycle>@<phase>:<segment>:<serial>:<kind> or t<seconds>:<segment>:<serial>:<kind>
std::vector<ConfiguredFault> parse_faults(const std::string& key, const Entry& e) {
  std::vector<ConfiguredFault> out;
  if (trim(e.value).empty()) return out;
  for (std::string_view item : split(e.value, ';')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 4) {
      bad(key, e.line, "fault '" + std::string(item) + "' is not when:segment:serial:kind");
    }
    ConfiguredFault f;
    const std::string_view when = parts[0];
    if (!when.empty() && when.front() == 't') {
      f.at_time_s = Reader::parse_double(key, when.substr(1), e.line);
      if (*f.at_time_s < 0) bad(key, e.line, "fault time must be non-negative");
    } else {
      const auto at = when.find('@');
      if (at == std::string_view::npos) bad(key, e.line, "fault time must be cycle@phase or t<seconds>");
      f.spec.cycle = Reader::parse_long(key, when.substr(0, at), e.line);
      if (f.spec.cycle < 0) bad(key, e.line, "fault cycle must be non-negative");
      f.spec.phase = parse_phase(key, trim(when.substr(at + 1)), e.line);
    }
    f.spec.segment = static_cast<int>(Reader::parse_long(key, parts[1], e.line));
    f.spec.serial = Reader::parse_long(key, parts[2], e.line);
    if (parts[3] == "node") {
      f.spec.kind = FaultKind::node;
    } else if (parts[3] == "link") {
      f.spec.kind = FaultKind::link;
    } else {
      bad(key, e.line, "fault kind must be node or link");
    }
    out.push_back(f);
  }
  return out;
}

std::vector<double> number_list(const std::string& key, const Entry& e) {
  std::vector<double> out;
  for (std::string_view v : split(e.value, ',')) out.push_back(Reader::parse_double(key, v, e.line));
  return out;
}

}  // namespace

const std::vector<std::string>& required_config_keys() { return kRequired; }

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> all = [] {
    std::vector<std::string> v = kRequired;
    v.insert(v.end(), kOptional.begin(), kOptional.end());
    return v;
  }();
  return all;
}

void apply_preset(ExperimentConfig& cfg, Preset preset) {
  cfg.preset = preset;
  cfg.planner = PlannerOptions::for_preset(preset, cfg.radio);
  if (cfg.overrides.slot_ms) cfg.planner.slot_ms = *cfg.overrides.slot_ms;
  if (cfg.overrides.chain_distance) cfg.planner.chain_distance = *cfg.overrides.chain_distance;
  if (cfg.overrides.density_rounding) cfg.planner.density_rounding = *cfg.overrides.density_rounding;
}

ExperimentConfig parse_config(std::string_view text) {
  const auto& known = known_config_keys();
  std::map<std::string, Entry> entries;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad(std::string(line), line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) bad(std::string(line), line_no, "expected key = value");
    std::string key(trim(line.substr(0, eq)));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      bad(key, line_no, "unknown key");
    }
    if (entries.count(key)) {
      bad(key, line_no, "duplicate key (first set on line " + std::to_string(entries[key].line) + ")");
    }
    entries[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no};
  }

  std::vector<std::string> missing;
  for (const auto& k : kRequired) {
    if (!entries.count(k)) missing.push_back(k);
  }
  if (!missing.empty()) {
    std::string msg = "missing required keys:";
    for (const auto& k : missing) msg += " " + k;
    throw ConfigError(msg, missing.front(), 0);
  }

  const Reader r(std::move(entries));
  ExperimentConfig cfg;
  cfg.area.breadth_a = r.number("area.a_m");
  cfg.area.seg_width_b = r.number("area.b_m");
  cfg.area.segments_K = static_cast<int>(r.integer("area.K"));
  cfg.area.sense_range_R = r.number("area.R_sense_m");
  cfg.area.coverage_target_beta = r.number("area.beta");
  cfg.radio.e_t = r.number("radio.e_t_uJ_s") * 1e-6;
  cfg.radio.e_r = r.number("radio.e_r_uJ_s") * 1e-6;
  cfg.radio.e_d = r.number("radio.e_d_nJ_m2_s") * 1e-9;
  cfg.radio.e_id = r.number("radio.e_id_uJ_s") * 1e-6;
  cfg.radio.e_sen = r.number("radio.e_sen_uJ_s") * 1e-6;
  cfg.radio.path_loss_n = r.number("radio.n");
  cfg.radio.data_rate_bps = r.number("radio.D_bps");
  cfg.radio.packet_bits = r.integer("radio.B_bits");
  cfg.life.T_life = r.number("life.T_life_s");
  cfg.life.E_o = r.number("life.E_o_J");
  cfg.life.T_sense = r.number("life.T_sense_s");
  cfg.life.T_d = r.number("life.T_d_s");

  // Domain checks, reported against the key that carries the bad value.
  auto check = [&](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const DomainError& e) {
      bad(key, r.at(key).line, e.what());
    }
  };
  for (const char* key : {"area.a_m", "area.b_m", "area.K", "area.R_sense_m", "radio.e_t_uJ_s",
                          "radio.e_r_uJ_s", "radio.e_d_nJ_m2_s", "radio.e_id_uJ_s",
                          "radio.e_sen_uJ_s", "radio.D_bps", "radio.B_bits", "life.T_life_s",
                          "life.E_o_J", "life.T_d_s"}) {
    if (!(r.number(key) > 0)) bad(key, r.at(key).line, "must be positive");
  }
  const double beta = cfg.area.coverage_target_beta;
  if (!(beta > 0 && beta < 1)) bad("area.beta", r.at("area.beta").line, "must lie strictly between 0 and 1");
  if (cfg.life.T_sense < 0) bad("life.T_sense_s", r.at("life.T_sense_s").line, "must be non-negative");
  check("area.K", [&] { cfg.area.validate(); });
  check("radio.n", [&] { cfg.radio.validate(); });
  check("life.T_life_s", [&] { cfg.life.validate(); });

  Preset preset = Preset::paper;
  if (r.has("preset")) {
    check("preset", [&] { preset = parse_preset(r.at("preset").value); });
  }
  if (r.has("planner.slot_ms")) cfg.overrides.slot_ms = r.number("planner.slot_ms");
  if (r.has("planner.chain_distance")) {
    const Entry& e = r.at("planner.chain_distance");
    if (e.value == "a") {
      cfg.overrides.chain_distance = ChainDistance::breadth_a;
    } else if (e.value == "b") {
      cfg.overrides.chain_distance = ChainDistance::segment_width_b;
    } else {
      bad("planner.chain_distance", e.line, "expected a or b");
    }
  }
  if (r.has("planner.density_rounding")) {
    const Entry& e = r.at("planner.density_rounding");
    if (e.value == "exact") {
      cfg.overrides.density_rounding = DensityRounding::exact;
    } else if (e.value == "three_decimals_up") {
      cfg.overrides.density_rounding = DensityRounding::three_decimals_up;
    } else {
      bad("planner.density_rounding", e.line, "expected exact or three_decimals_up");
    }
  }
  if (r.has("planner.s")) {
    cfg.s_override = static_cast<int>(r.integer("planner.s"));
    if (*cfg.s_override < 1) bad("planner.s", r.at("planner.s").line, "must be at least 1");
  }
  apply_preset(cfg, preset);

  if (r.has("seeds")) {
    cfg.seeds.clear();
    const Entry& e = r.at("seeds");
    for (std::string_view v : split(e.value, ',')) {
      const long seed = Reader::parse_long("seeds", v, e.line);
      if (seed < 0) bad("seeds", e.line, "seeds must be non-negative");
      cfg.seeds.push_back(static_cast<std::uint64_t>(seed));
    }
  }
  if (r.has("faults")) cfg.faults = parse_faults("faults", r.at("faults"));
  if (r.has("mode")) {
    const Entry& e = r.at("mode");
    if (e.value == "event") {
      cfg.mode = SimMode::event;
    } else if (e.value == "fast-forward") {
      cfg.mode = SimMode::fast_forward;
    } else {
      bad("mode", e.line, "expected event or fast-forward");
    }
  }
  if (r.has("death")) {
    const Entry& e = r.at("death");
    if (e.value == "segment-starved") {
      cfg.death = DeathCriterion::segment_starved;
    } else if (e.value == "first-node-dies") {
      cfg.death = DeathCriterion::first_node_dies;
    } else {
      bad("death", e.line, "expected segment-starved or first-node-dies");
    }
  }

  if (r.has("fault.redundant")) {
    const Entry& e = r.at("fault.redundant");
    if (e.value != "auto" && Reader::parse_long("fault.redundant", e.value, e.line) < 0) {
      bad("fault.redundant", e.line, "expected auto or a non-negative count");
    }
    cfg.fault.redundant = e.value;
  }
  if (r.has("fault.c")) cfg.fault.c = r.number("fault.c");
  if (r.has("fault.connected_outer")) cfg.fault.connected_outer = r.number("fault.connected_outer");
  if (r.has("fault.m_retries")) {
    cfg.fault.m_retries = static_cast<int>(r.integer("fault.m_retries"));
    if (cfg.fault.m_retries < 1) bad("fault.m_retries", r.at("fault.m_retries").line, "must be at least 1");
  }
  if (r.has("fault.t_between_s")) cfg.fault.t_between_s = r.number("fault.t_between_s");

  if (r.has("sim.horizon_cycles")) {
    cfg.horizon_cycles = r.integer("sim.horizon_cycles");
    if (cfg.horizon_cycles < 0) bad("sim.horizon_cycles", r.at("sim.horizon_cycles").line, "must be >= 0");
  }
  if (r.has("sim.record_events")) {
    const Entry& e = r.at("sim.record_events");
    if (e.value == "true" || e.value == "1") {
      cfg.record_events = true;
    } else if (e.value == "false" || e.value == "0") {
      cfg.record_events = false;
    } else {
      bad("sim.record_events", e.line, "expected true or false");
    }
  }

  if (r.has("sweep.E_o_J")) cfg.sweep.E_o_J = number_list("sweep.E_o_J", r.at("sweep.E_o_J"));
  if (r.has("sweep.T_life_s")) cfg.sweep.T_life_s = number_list("sweep.T_life_s", r.at("sweep.T_life_s"));
  if (r.has("sweep.BD")) {
    const Entry& e = r.at("sweep.BD");
    for (std::string_view pair : split(e.value, ',')) {
      const auto bd = split(pair, '/');
      if (bd.size() != 2) bad("sweep.BD", e.line, "expected B_bits/D_bps pairs");
      cfg.sweep.BD.emplace_back(Reader::parse_long("sweep.BD", bd[0], e.line),
                                Reader::parse_double("sweep.BD", bd[1], e.line));
    }
  }
  if (r.has("sweep.s")) {
    const Entry& e = r.at("sweep.s");
    const auto dots = e.value.find("..");
    if (dots == std::string::npos) bad("sweep.s", e.line, "expected a range lo..hi");
    cfg.sweep.s_min = static_cast<int>(Reader::parse_long("sweep.s", e.value.substr(0, dots), e.line));
    cfg.sweep.s_max = static_cast<int>(Reader::parse_long("sweep.s", e.value.substr(dots + 2), e.line));
    if (cfg.sweep.s_min < 1 || cfg.sweep.s_max < cfg.sweep.s_min) {
      bad("sweep.s", e.line, "range must satisfy 1 <= lo <= hi");
    }
  }

  // The cycle must fit the protocol.
  PlanningModel model;
  check("life.T_d_s", [&] { model = build_model(cfg); });
  const double t_min = cycle_duration_min(model);
  if (cfg.life.T_d + 1e-12 < t_min) {
    std::ostringstream msg;
    msg << "T_d = " << cfg.life.T_d << " s is below the minimum cycle of " << t_min << " s";
    bad("life.T_d_s", r.at("life.T_d_s").line, msg.str());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'", "", 0);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

PlanningModel build_model(const ExperimentConfig& cfg) {
  return make_model(cfg.area, cfg.radio, cfg.life, cfg.planner, cfg.s_override);
}

long resolve_redundant(const ExperimentConfig& cfg, const PlanningModel& model) {
  if (cfg.fault.redundant == "auto") {
    RedundancySpec spec;
    spec.c = cfg.fault.c;
    spec.d = cfg.area.seg_width_b;
    spec.connected_outer = cfg.fault.connected_outer;
    spec.tau = cfg.radio.packet_time();
    spec.n_active = model.s;
    spec.t_total_sense = cfg.life.T_life;
    spec.e_node = cfg.life.E_o;
    spec.t_between = cfg.fault.t_between_s.value_or(cfg.life.T_d);
    return redundant_count(spec);
  }
  return std::stol(cfg.fault.redundant);
}

SimOptions build_sim_options(const ExperimentConfig& cfg, const PlanningModel& model) {
  SimOptions o;
  o.mode = cfg.mode;
  o.death = cfg.death;
  if (cfg.horizon_cycles > 0) o.horizon_cycles = cfg.horizon_cycles;
  o.redundant_per_segment = resolve_redundant(cfg, model);
  o.max_attempts = cfg.fault.m_retries;
  o.record_events = cfg.record_events;
  const double g = model.guard_s();
  for (const ConfiguredFault& f : cfg.faults) {
    FaultSpec spec = f.spec;
    if (f.at_time_s) {
      // Map an absolute time onto the nominal cycle timetable.
      const double T_d = model.life.T_d;
      spec.cycle = static_cast<long>(std::floor(*f.at_time_s / T_d));
      const double off = *f.at_time_s - static_cast<double>(spec.cycle) * T_d;
      const double chain_end = model.life.T_sense + 2 * (model.s - 1) * g;
      const double transfer_end = chain_end + (2 * model.K() - 1) * g;
      if (off >= transfer_end) {
        // Asleep: the fault is in place when the next cycle starts.
        ++spec.cycle;
        spec.phase = ProtocolPhase::sensing;
      } else if (off < model.life.T_sense) {
        spec.phase = ProtocolPhase::sensing;
      } else if (off < chain_end) {
        spec.phase = ProtocolPhase::chain;
      } else {
        spec.phase = ProtocolPhase::transfer;
      }
    }
    o.faults.push_back(spec);
  }
  return o;
}

}  // namespace wsn
