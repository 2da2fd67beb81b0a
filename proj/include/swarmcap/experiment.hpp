#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "swarmcap/engine.hpp"

namespace swarmcap {

/// A base scenario plus sweep axes. Empty axes fall back to the base value.
struct ExperimentSpec {
  ScenarioConfig base{};
  std::vector<PolicyKind> policies;
  std::vector<double> beta_values;
  std::vector<double> f_values;
  std::vector<int> n_uavs_values;
  std::vector<double> speed_values;
  int runs_per_point{1};
  std::uint64_t seed_base{1};
  std::string output_dir{"results"};
  bool timeseries{false};
  unsigned jobs{0};

  void validate() const;
};

struct SweepPoint {
  ScenarioConfig config;  // seed left at seed_base
};

inline std::vector<SweepPoint> expand(const ExperimentSpec& spec) {
  const auto policies =
      spec.policies.empty() ? std::vector<PolicyKind>{spec.base.policy.kind} : spec.policies;
  const auto betas =
      spec.beta_values.empty() ? std::vector<double>{spec.base.policy.beta} : spec.beta_values;
  const auto fs = spec.f_values.empty() ? std::vector<double>{spec.base.policy.f} : spec.f_values;
  const auto counts =
      spec.n_uavs_values.empty() ? std::vector<int>{spec.base.n_uavs} : spec.n_uavs_values;
  const auto speeds =
      spec.speed_values.empty() ? std::vector<double>{spec.base.speed_mps} : spec.speed_values;

  std::vector<SweepPoint> points;
  for (int n : counts)
    for (double v : speeds)
      for (PolicyKind kind : policies) {
        std::vector<PolicySpec> variants;
        if (kind == PolicyKind::Cap)
          for (double b : betas) variants.push_back({kind, b, spec.base.policy.f});
        else if (kind == PolicyKind::Cacoc2)
          for (double f : fs) variants.push_back({kind, spec.base.policy.beta, f});
        else
          variants.push_back({kind, spec.base.policy.beta, spec.base.policy.f});
        for (const auto& p : variants) {
          SweepPoint pt{spec.base};
          pt.config.policy = p;
          pt.config.n_uavs = n;
          pt.config.speed_mps = v;
          pt.config.seed = spec.seed_base;
          points.push_back(pt);
        }
      }
  return points;
}

inline void ExperimentSpec::validate() const {
  detail::require(runs_per_point >= 1, "runs_per_point must be >= 1");
  for (const auto& pt : expand(*this)) pt.config.validate();
}

// ---------------------------------------------------------------------------
// Config files

namespace detail {

using json = nlohmann::json;

inline double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw std::invalid_argument(key + " must be a number");
  return v.get<double>();
}

inline long long as_integer(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d) return static_cast<long long>(d);
  }
  throw std::invalid_argument(key + " must be an integer");
}

inline std::vector<double> as_number_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw std::invalid_argument(key + " must be a list");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_number(e, key));
  return out;
}

inline void check_range(bool ok, const std::string& key, const std::string& bound) {
  if (!ok) throw std::invalid_argument(key + " out of range: must be " + bound);
}

using Setter = std::function<void(ExperimentSpec&, const json&)>;

inline const std::map<std::string, Setter>& config_keys() {
  auto num = [](double ScenarioConfig::*m) {
    return [m](ExperimentSpec& s, const json& v) {
      s.base.*m = as_number(v, "");
    };
  };
  static const std::map<std::string, Setter> keys = {
      {"map_size_m", num(&ScenarioConfig::map_size_m)},
      {"cell_size_m", num(&ScenarioConfig::cell_size_m)},
      {"n_uavs",
       [](ExperimentSpec& s, const json& v) {
         const auto n = as_integer(v, "n_uavs");
         check_range(n >= 1, "n_uavs", ">= 1");
         s.base.n_uavs = static_cast<int>(n);
       }},
      {"speed_mps", num(&ScenarioConfig::speed_mps)},
      {"tx_range_m", num(&ScenarioConfig::tx_range_m)},
      {"policy",
       [](ExperimentSpec& s, const json& v) {
         if (!v.is_string()) throw std::invalid_argument("policy must be a string");
         s.base.policy.kind = parse_policy_kind(v.get<std::string>());
       }},
      {"beta", [](ExperimentSpec& s, const json& v) { s.base.policy.beta = as_number(v, "beta"); }},
      {"f", [](ExperimentSpec& s, const json& v) { s.base.policy.f = as_number(v, "f"); }},
      {"evaporation_rate", num(&ScenarioConfig::evaporation_rate)},
      {"diffusion_rate", num(&ScenarioConfig::diffusion_rate)},
      {"boundary_pheromone", num(&ScenarioConfig::boundary_pheromone)},
      {"sim_time_s", num(&ScenarioConfig::sim_time_s)},
      {"decision_interval_s", num(&ScenarioConfig::decision_interval_s)},
      {"hello_period_s", num(&ScenarioConfig::hello_period_s)},
      {"metric_sample_period_s", num(&ScenarioConfig::metric_sample_period_s)},
      {"pheromone_update_period_s", num(&ScenarioConfig::pheromone_update_period_s)},
      {"dt_s", num(&ScenarioConfig::dt_s)},
      {"coverage_target", num(&ScenarioConfig::coverage_target)},
      {"max_turn_rate_deg_s", num(&ScenarioConfig::max_turn_rate_deg_s)},
      {"collision_distance_m", num(&ScenarioConfig::collision_distance_m)},
      {"collision_release_m", num(&ScenarioConfig::collision_release_m)},
      {"start_spacing_m", num(&ScenarioConfig::start_spacing_m)},
      {"start_jitter_m", num(&ScenarioConfig::start_jitter_m)},
      {"coverage_counts_border",
       [](ExperimentSpec& s, const json& v) {
         if (!v.is_boolean()) throw std::invalid_argument("coverage_counts_border must be a bool");
         s.base.coverage_counts_border = v.get<bool>();
       }},
      {"seed",
       [](ExperimentSpec& s, const json& v) {
         const auto n = as_integer(v, "seed");
         check_range(n >= 0, "seed", ">= 0");
         s.base.seed = static_cast<std::uint64_t>(n);
       }},
      {"sweep_policies",
       [](ExperimentSpec& s, const json& v) {
         if (!v.is_array()) throw std::invalid_argument("sweep_policies must be a list");
         s.policies.clear();
         for (const auto& e : v) {
           if (!e.is_string()) throw std::invalid_argument("sweep_policies entries must be strings");
           s.policies.push_back(parse_policy_kind(e.get<std::string>()));
         }
       }},
      {"sweep_beta",
       [](ExperimentSpec& s, const json& v) { s.beta_values = as_number_list(v, "sweep_beta"); }},
      {"sweep_f", [](ExperimentSpec& s, const json& v) { s.f_values = as_number_list(v, "sweep_f"); }},
      {"sweep_n_uavs",
       [](ExperimentSpec& s, const json& v) {
         if (!v.is_array()) throw std::invalid_argument("sweep_n_uavs must be a list");
         s.n_uavs_values.clear();
         for (const auto& e : v) {
           const auto n = as_integer(e, "sweep_n_uavs");
           check_range(n >= 1, "sweep_n_uavs", ">= 1");
           s.n_uavs_values.push_back(static_cast<int>(n));
         }
       }},
      {"sweep_speed_mps",
       [](ExperimentSpec& s, const json& v) {
         s.speed_values = as_number_list(v, "sweep_speed_mps");
       }},
      {"runs_per_point",
       [](ExperimentSpec& s, const json& v) {
         const auto n = as_integer(v, "runs_per_point");
         check_range(n >= 1, "runs_per_point", ">= 1");
         s.runs_per_point = static_cast<int>(n);
       }},
      {"seed_base",
       [](ExperimentSpec& s, const json& v) {
         const auto n = as_integer(v, "seed_base");
         check_range(n >= 0, "seed_base", ">= 0");
         s.seed_base = static_cast<std::uint64_t>(n);
       }},
      {"output_dir",
       [](ExperimentSpec& s, const json& v) {
         if (!v.is_string()) throw std::invalid_argument("output_dir must be a string");
         s.output_dir = v.get<std::string>();
       }},
  };
  return keys;
}

// Range checks that name the field and its bound.
inline void check_spec_ranges(const ExperimentSpec& s) {
  const auto& c = s.base;
  check_range(c.map_size_m > 0, "map_size_m", "> 0");
  check_range(c.cell_size_m > 0, "cell_size_m", "> 0");
  check_range(c.speed_mps > 0, "speed_mps", "> 0");
  check_range(c.tx_range_m > 0, "tx_range_m", "> 0");
  check_range(c.policy.beta >= 0, "beta", ">= 0");
  check_range(c.policy.f >= 0, "f", ">= 0");
  check_range(c.evaporation_rate >= 0 && c.evaporation_rate <= 1, "evaporation_rate", "in [0, 1]");
  check_range(c.diffusion_rate >= 0 && c.diffusion_rate <= 1, "diffusion_rate", "in [0, 1]");
  check_range(c.boundary_pheromone >= 0, "boundary_pheromone", ">= 0");
  check_range(c.sim_time_s > 0, "sim_time_s", "> 0");
  check_range(c.decision_interval_s >= 0, "decision_interval_s", ">= 0");
  check_range(c.dt_s > 0, "dt_s", "> 0");
  check_range(c.coverage_target > 0 && c.coverage_target <= 1, "coverage_target", "in (0, 1]");
  for (double b : s.beta_values) check_range(b >= 0, "sweep_beta", ">= 0");
  for (double f : s.f_values) check_range(f >= 0, "sweep_f", ">= 0");
  for (double v : s.speed_values) check_range(v > 0, "sweep_speed_mps", "> 0");
}

}  // namespace detail

/// Parses a flat JSON object. Keys mirror ScenarioConfig fields, plus the
/// sweep axes and output settings; see configs/README section in README.md.
inline ExperimentSpec parse_config_text(std::string_view text) {
  detail::json doc;
  try {
    doc = detail::json::parse(text.begin(), text.end());
  } catch (const detail::json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentSpec spec;
  const auto& keys = detail::config_keys();
  for (const auto& [key, value] : doc.items()) {
    const auto it = keys.find(key);
    if (it == keys.end()) throw std::invalid_argument("unknown config key \"" + key + "\"");
    try {
      it->second(spec, value);
    } catch (const std::invalid_argument& e) {
      std::string msg = e.what();
      if (msg.rfind(" must", 0) == 0) msg = key + msg;
      throw std::invalid_argument(msg);
    }
  }
  detail::check_spec_ranges(spec);
  spec.validate();
  return spec;
}

inline ExperimentSpec parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// CSV output

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + '"';
}

inline std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  return line + '\n';
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::vector<std::string> echo_columns() {
  return {"map_size_m",         "cell_size_m",         "tx_range_m",
          "evaporation_rate",   "diffusion_rate",      "boundary_pheromone",
          "sim_time_s",         "decision_interval_s", "hello_period_s",
          "metric_sample_period_s", "pheromone_update_period_s", "dt_s",
          "coverage_target",    "max_turn_rate_deg_s", "collision_distance_m",
          "collision_release_m", "start_spacing_m",    "start_jitter_m",
          "coverage_counts_border"};
}

inline std::vector<std::string> echo_values(const ScenarioConfig& c) {
  return {fmt(c.map_size_m),          fmt(c.cell_size_m),         fmt(c.tx_range_m),
          fmt(c.evaporation_rate),    fmt(c.diffusion_rate),      fmt(c.boundary_pheromone),
          fmt(c.sim_time_s),          fmt(c.decision_interval_s), fmt(c.hello_period_s),
          fmt(c.metric_sample_period_s), fmt(c.pheromone_update_period_s), fmt(c.dt_s),
          fmt(c.coverage_target),     fmt(c.max_turn_rate_deg_s), fmt(c.collision_distance_m),
          fmt(c.collision_release_m), fmt(c.start_spacing_m),     fmt(c.start_jitter_m),
          c.coverage_counts_border ? "1" : "0"};
}

// beta only for CAP rows, f only for CACOC2 rows; blank otherwise.
inline std::vector<std::string> point_key(const ScenarioConfig& c) {
  const auto& p = c.policy;
  return {std::string(to_string(p.kind)), p.kind == PolicyKind::Cap ? fmt(p.beta) : "",
          p.kind == PolicyKind::Cacoc2 ? fmt(p.f) : "", std::to_string(c.n_uavs),
          fmt(c.speed_mps)};
}

template <typename T>
void append(std::vector<T>& a, const std::vector<T>& b) {
  a.insert(a.end(), b.begin(), b.end());
}

}  // namespace detail

inline const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> cols = {"tc_s",     "tc_censored",    "fairness",
                                                "ncc_mean", "anc_mean",       "ncc_mean_to_tc",
                                                "anc_mean_to_tc"};
  return cols;
}

inline std::vector<std::string> runs_header() {
  std::vector<std::string> h = {"policy", "beta", "f", "n_uavs", "speed_mps", "seed"};
  detail::append(h, metric_columns());
  detail::append(h, {"status", "error"});
  detail::append(h, detail::echo_columns());
  return h;
}

inline std::vector<std::string> summary_header() {
  std::vector<std::string> h = {"policy", "beta", "f", "n_uavs", "speed_mps", "runs", "failed"};
  for (const auto& m : metric_columns()) {
    // tc_censored is summarized as a count of censored runs.
    if (m == "tc_censored") {
      h.push_back("censored");
      continue;
    }
    h.push_back(m);
    h.push_back(m + "_sem");
  }
  h.push_back("status");
  detail::append(h, detail::echo_columns());
  return h;
}

struct RunRecord {
  ScenarioConfig config;
  std::optional<RunResult> result;
  std::string error;
};

inline std::string runs_row(const RunRecord& r) {
  auto f = detail::point_key(r.config);
  f.push_back(std::to_string(r.config.seed));
  if (r.result) {
    const auto& x = *r.result;
    detail::append(f, {detail::fmt(x.tc_s), x.tc_censored ? "1" : "0", detail::fmt(x.fairness),
                       detail::fmt(x.ncc_mean), detail::fmt(x.anc_mean),
                       detail::fmt(x.ncc_mean_to_tc), detail::fmt(x.anc_mean_to_tc), "ok", ""});
  } else {
    f.resize(f.size() + metric_columns().size(), "");
    detail::append(f, {"failed", r.error});
  }
  detail::append(f, detail::echo_values(r.config));
  return detail::join(f);
}

inline std::string summary_row(const ScenarioConfig& point, std::span<const RunRecord> records) {
  std::vector<RunResult> ok;
  for (const auto& r : records)
    if (r.result) ok.push_back(*r.result);
  auto f = detail::point_key(point);
  f.push_back(std::to_string(records.size()));
  f.push_back(std::to_string(records.size() - ok.size()));
  if (ok.empty()) {
    f.resize(f.size() + 1 + 2 * (metric_columns().size() - 1), "");
  } else {
    const auto b = aggregate(std::move(ok));
    auto ms = [&](const MeanSem& m) {
      f.push_back(detail::fmt(m.mean));
      f.push_back(detail::fmt(m.sem));
    };
    ms(b.tc_s);
    f.push_back(std::to_string(b.censored));
    ms(b.fairness);
    ms(b.ncc_mean);
    ms(b.anc_mean);
    ms(b.ncc_mean_to_tc);
    ms(b.anc_mean_to_tc);
  }
  const bool failed = std::any_of(records.begin(), records.end(),
                                  [](const RunRecord& r) { return !r.result; });
  f.push_back(failed ? "failed" : "ok");
  detail::append(f, detail::echo_values(point));
  return detail::join(f);
}

inline std::string timeseries_csv(const RunResult& r) {
  std::string out = "t,ncc,anc,covered_fraction\n";
  for (const auto& s : r.samples)
    out += detail::join({detail::fmt(s.t), std::to_string(s.ncc), detail::fmt(s.anc),
                         detail::fmt(s.covered_fraction)});
  return out;
}

inline std::string timeseries_name(const ScenarioConfig& c) {
  std::string name(to_string(c.policy.kind));
  if (c.policy.kind == PolicyKind::Cap) name += "_beta" + detail::fmt(c.policy.beta);
  if (c.policy.kind == PolicyKind::Cacoc2) name += "_f" + detail::fmt(c.policy.f);
  name += "_n" + std::to_string(c.n_uavs) + "_v" + detail::fmt(c.speed_mps) + "_seed" +
          std::to_string(c.seed) + ".csv";
  return name;
}

struct ExecuteReport {
  std::size_t runs{0};
  std::size_t failed{0};
  std::size_t points{0};
  int exit_status() const { return failed == 0 ? 0 : 1; }
};

/// Runs every sweep point with seeds seed_base .. seed_base + runs_per_point - 1
/// and writes runs.csv and summary.csv to spec.output_dir.
inline ExecuteReport execute(const ExperimentSpec& spec,
                             std::function<void(const RunRecord&)> progress = {}) {
  spec.validate();
  const auto points = expand(spec);
  const auto per = static_cast<std::size_t>(spec.runs_per_point);
  std::vector<RunRecord> records(points.size() * per);
  for (std::size_t p = 0; p < points.size(); ++p)
    for (std::size_t k = 0; k < per; ++k) {
      auto& rec = records[p * per + k];
      rec.config = points[p].config;
      rec.config.seed = spec.seed_base + k;
    }

  std::mutex progress_mutex;
  parallel_for(records.size(), spec.jobs, [&](std::size_t i) {
    auto& rec = records[i];
    try {
      rec.result = run(rec.config);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(rec);
    }
  });

  const std::filesystem::path dir(spec.output_dir);
  std::filesystem::create_directories(dir);
  std::string runs = detail::join(runs_header());
  std::string summary = detail::join(summary_header());
  ExecuteReport report;
  report.points = points.size();
  for (std::size_t p = 0; p < points.size(); ++p) {
    const std::span<const RunRecord> group(records.data() + p * per, per);
    for (const auto& r : group) {
      runs += runs_row(r);
      ++report.runs;
      if (!r.result) ++report.failed;
    }
    summary += summary_row(points[p].config, group);
  }
  detail::write_atomic(dir / "runs.csv", runs);
  detail::write_atomic(dir / "summary.csv", summary);

  if (spec.timeseries) {
    const auto ts = dir / "timeseries";
    std::filesystem::create_directories(ts);
    for (const auto& r : records)
      if (r.result) detail::write_atomic(ts / timeseries_name(r.config), timeseries_csv(*r.result));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Debug traces

/// Runs one scenario, streaming per-tick positions (t, uav_id, x, y,
/// heading_deg) and, if given, hello events (t, sender, receiver count).
inline RunResult run_traced(const ScenarioConfig& config, std::ostream* trace,
                            std::ostream* messages) {
  Simulation sim(config);
  if (trace) {
    *trace << "t,uav_id,x,y,heading_deg\n";
    sim.on_tick = [trace](double t, std::span<const UavState> uavs) {
      for (const auto& u : uavs)
        *trace << detail::join({detail::fmt(t), std::to_string(u.id), detail::fmt(u.position.x),
                                detail::fmt(u.position.y), detail::fmt(rad_to_deg(u.heading))});
    };
  }
  if (messages) {
    *messages << "t,sender,receivers\n";
    sim.on_hello = [messages](double t, int sender, std::size_t receivers) {
      *messages << detail::join({detail::fmt(t), std::to_string(sender), std::to_string(receivers)});
    };
  }
  sim.run_to_end();
  return sim.result();
}

// ---------------------------------------------------------------------------
// Summaries

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw std::runtime_error("line " + std::to_string(line_no) + ": unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

inline double parse_number(const std::string& s, std::size_t line_no, const std::string& col) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::runtime_error("line " + std::to_string(line_no) + ": column " + col +
                             " is not a number: \"" + s + "\"");
  return v;
}

}  // namespace detail

struct SummaryRow {
  std::string policy;
  std::string beta;
  std::string f;
  std::string n_uavs;
  std::string speed_mps;
  std::size_t runs{0};
  MeanSem tc, ncc, anc, fairness;
};

/// Reads summary.csv, or runs.csv (aggregated on the fly, failed runs
/// skipped). Throws with the offending line number on malformed input.
inline std::vector<SummaryRow> read_results(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) header = detail::split_csv_line(line, line_no);
  }
  if (header.empty()) throw std::runtime_error("line 1: missing header");
  auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  auto need = [&](const std::string& name) {
    const auto c = col(name);
    if (!c) throw std::runtime_error("line 1: missing column " + name);
    return *c;
  };
  const bool per_run = col("seed").has_value();
  const auto c_policy = need("policy"), c_beta = need("beta"), c_f = need("f"),
             c_n = need("n_uavs"), c_v = need("speed_mps"), c_tc = need("tc_s"),
             c_ncc = need("ncc_mean"), c_anc = need("anc_mean"), c_fair = need("fairness");
  const auto c_status = col("status");
  std::optional<std::size_t> c_runs, c_tc_sem, c_ncc_sem, c_anc_sem, c_fair_sem;
  if (!per_run) {
    c_runs = need("runs");
    c_tc_sem = need("tc_s_sem");
    c_ncc_sem = need("ncc_mean_sem");
    c_anc_sem = need("anc_mean_sem");
    c_fair_sem = need("fairness_sem");
  }

  struct Group {
    SummaryRow row;
    std::vector<double> tc, ncc, anc, fair;
  };
  std::vector<Group> groups;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line, line_no);
    if (fields.size() != header.size())
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields, found " +
                               std::to_string(fields.size()));
    const bool empty_metrics = fields[c_tc].empty();
    if (empty_metrics && c_status && fields[*c_status] == "failed") continue;
    auto num = [&](std::size_t c) { return detail::parse_number(fields[c], line_no, header[c]); };
    SummaryRow key;
    key.policy = fields[c_policy];
    key.beta = fields[c_beta];
    key.f = fields[c_f];
    key.n_uavs = fields[c_n];
    key.speed_mps = fields[c_v];
    if (!per_run) {
      key.runs = static_cast<std::size_t>(num(*c_runs));
      key.tc = {num(c_tc), num(*c_tc_sem)};
      key.ncc = {num(c_ncc), num(*c_ncc_sem)};
      key.anc = {num(c_anc), num(*c_anc_sem)};
      key.fairness = {num(c_fair), num(*c_fair_sem)};
      groups.push_back({key, {}, {}, {}, {}});
      continue;
    }
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.row.policy == key.policy && g.row.beta == key.beta && g.row.f == key.f &&
             g.row.n_uavs == key.n_uavs && g.row.speed_mps == key.speed_mps;
    });
    if (it == groups.end()) it = groups.insert(groups.end(), Group{key, {}, {}, {}, {}});
    it->tc.push_back(num(c_tc));
    it->ncc.push_back(num(c_ncc));
    it->anc.push_back(num(c_anc));
    it->fair.push_back(num(c_fair));
  }

  std::vector<SummaryRow> rows;
  for (auto& g : groups) {
    if (per_run) {
      g.row.runs = g.tc.size();
      g.row.tc = mean_sem(g.tc);
      g.row.ncc = mean_sem(g.ncc);
      g.row.anc = mean_sem(g.anc);
      g.row.fairness = mean_sem(g.fair);
    }
    rows.push_back(g.row);
  }
  return rows;
}

inline std::string format_summary(std::vector<SummaryRow> rows) {
  auto param_value = [](const SummaryRow& r) {
    const auto& s = !r.beta.empty() ? r.beta : r.f;
    return s.empty() ? -1.0 : std::stod(s);
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const SummaryRow& a, const SummaryRow& b) {
    if (a.tc.mean != b.tc.mean) return a.tc.mean < b.tc.mean;
    if (a.policy != b.policy) return a.policy < b.policy;
    return param_value(a) < param_value(b);
  });
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %-10s %6s %6s %18s %14s %14s %14s\n", "policy", "param",
                "uavs", "speed", "Tc [s]", "NCC", "ANC", "F");
  os << buf;
  for (const auto& r : rows) {
    std::string param = "-";
    if (!r.beta.empty()) param = "beta=" + r.beta;
    else if (!r.f.empty()) param = "f=" + r.f;
    std::snprintf(buf, sizeof buf,
                  "%-10s %-10s %6s %6s %9.1f +- %5.1f %6.2f +- %4.2f %6.2f +- %4.2f %6.3f +- %5.3f\n",
                  r.policy.c_str(), param.c_str(), r.n_uavs.c_str(), r.speed_mps.c_str(), r.tc.mean,
                  r.tc.sem, r.ncc.mean, r.ncc.sem, r.anc.mean, r.anc.sem, r.fairness.mean,
                  r.fairness.sem);
    os << buf;
  }
  return os.str();
}

inline std::string summarize(const std::filesystem::path& csv) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + csv.string());
  return format_summary(read_results(in));
}

}  // namespace swarmcap
