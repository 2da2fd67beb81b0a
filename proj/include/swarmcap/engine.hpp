#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "swarmcap/comms.hpp"
#include "swarmcap/connectivity.hpp"
#include "swarmcap/kinematics.hpp"
#include "swarmcap/pheromone_field.hpp"
#include "swarmcap/policies.hpp"
#include "swarmcap/rng.hpp"

namespace swarmcap {

/// One simulated scenario. Defaults reproduce the reference geometry:
/// 6 km square map, 100 m cells, 1 km radio range, 8000 s of flight.
struct ScenarioConfig {
  double map_size_m{6000.0};
  double cell_size_m{100.0};
  int n_uavs{20};
  double speed_mps{20.0};
  double tx_range_m{1000.0};
  PolicySpec policy{};
  double evaporation_rate{0.006};
  double diffusion_rate{0.006};
  double boundary_pheromone{4.0};
  double sim_time_s{8000.0};
  double decision_interval_s{0.0};  // 0 = derive from speed
  double hello_period_s{2.0};
  double metric_sample_period_s{10.0};
  double pheromone_update_period_s{1.0};
  double dt_s{0.1};
  double coverage_target{0.9};
  double max_turn_rate_deg_s{60.0};
  double collision_distance_m{30.0};
  double collision_release_m{50.0};
  double start_spacing_m{50.0};
  double start_jitter_m{20.0};
  bool coverage_counts_border{false};
  std::uint64_t seed{1};

  GridSpec grid() const { return GridSpec::from_extent(map_size_m, cell_size_m); }

  // 5 s at 20 m/s and 10 s at 40 m/s; in between, the slower tier.
  double effective_decision_interval() const {
    if (decision_interval_s > 0.0) return decision_interval_s;
    return speed_mps >= 40.0 ? 10.0 : 5.0;
  }

  int step_cells() const {
    return step_cells_for(speed_mps, effective_decision_interval(), cell_size_m);
  }

  double max_claim_age() const { return 2.0 * hello_period_s; }

  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

inline long ticks_for(double period, double dt, const char* name) {
  const double r = period / dt;
  const long n = std::lround(r);
  require(n >= 1 && std::abs(r - static_cast<double>(n)) < 1e-6,
          std::string(name) + " must be a positive multiple of dt_s");
  return n;
}

}  // namespace detail

inline void ScenarioConfig::validate() const {
  using detail::require;
  require(cell_size_m > 0.0, "cell_size_m must be > 0");
  require(map_size_m > 0.0, "map_size_m must be > 0");
  (void)grid();
  require(n_uavs >= 1, "n_uavs must be >= 1");
  require(speed_mps > 0.0, "speed_mps must be > 0");
  require(tx_range_m > 0.0, "tx_range_m must be > 0");
  require(evaporation_rate >= 0.0 && evaporation_rate <= 1.0,
          "evaporation_rate must be in [0, 1], got " + std::to_string(evaporation_rate));
  require(diffusion_rate >= 0.0 && diffusion_rate <= 1.0,
          "diffusion_rate must be in [0, 1], got " + std::to_string(diffusion_rate));
  require(boundary_pheromone >= 0.0, "boundary_pheromone must be >= 0");
  require(policy.beta >= 0.0, "beta must be >= 0");
  require(policy.f >= 0.0, "f must be >= 0");
  require(dt_s > 0.0, "dt_s must be > 0");
  require(sim_time_s > 0.0, "sim_time_s must be > 0");
  require(decision_interval_s >= 0.0, "decision_interval_s must be >= 0");
  require(coverage_target > 0.0 && coverage_target <= 1.0,
          "coverage_target must be in (0, 1], got " + std::to_string(coverage_target));
  require(max_turn_rate_deg_s > 0.0, "max_turn_rate_deg_s must be > 0");
  require(collision_distance_m >= 0.0, "collision_distance_m must be >= 0");
  require(collision_release_m >= collision_distance_m,
          "collision_release_m must be >= collision_distance_m");
  require(start_spacing_m >= 0.0, "start_spacing_m must be >= 0");
  require(start_jitter_m >= 0.0, "start_jitter_m must be >= 0");
  detail::ticks_for(sim_time_s, dt_s, "sim_time_s");
  detail::ticks_for(hello_period_s, dt_s, "hello_period_s");
  detail::ticks_for(metric_sample_period_s, dt_s, "metric_sample_period_s");
  detail::ticks_for(pheromone_update_period_s, dt_s, "pheromone_update_period_s");
}

// ---------------------------------------------------------------------------
// Metrics

/// Per-cell scan counts and first-scan times.
class ScanLedger {
 public:
  explicit ScanLedger(std::size_t cells)
      : counts_(cells, 0), first_scan_(cells, std::numeric_limits<double>::infinity()) {}

  void record(std::size_t cell, double t) {
    if (counts_[cell]++ == 0) {
      first_scan_[cell] = t;
      ++covered_;
    }
  }

  std::size_t cell_count() const { return counts_.size(); }
  std::size_t covered() const { return covered_; }
  double covered_fraction() const {
    return static_cast<double>(covered_) / static_cast<double>(counts_.size());
  }
  std::span<const std::uint64_t> counts() const { return counts_; }
  std::span<const double> first_scan() const { return first_scan_; }

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<double> first_scan_;
  std::size_t covered_{0};
};

/// Cells that count toward coverage and fairness: the interior by default,
/// since the pinned border ring is never a waypoint target.
inline std::size_t coverage_cell_count(const GridSpec& grid, bool include_border) {
  if (include_border) return grid.cell_count();
  const auto inner = static_cast<std::size_t>(grid.cells_per_side() - 2);
  return inner * inner;
}

inline std::optional<std::size_t> coverage_slot(const GridSpec& grid, Cell c, bool include_border) {
  if (include_border) return grid.index(c);
  if (!grid.is_interior(c)) return std::nullopt;
  const auto inner = static_cast<std::size_t>(grid.cells_per_side() - 2);
  return static_cast<std::size_t>(c.y - 1) * inner + static_cast<std::size_t>(c.x - 1);
}

/// Jain's index over per-cell scan counts; 0 before anything is scanned.
inline double fairness(std::span<const std::uint64_t> counts) {
  if (counts.empty()) throw std::invalid_argument("fairness needs at least one cell");
  double sum = 0.0;
  double sq = 0.0;
  for (auto c : counts) {
    const double x = static_cast<double>(c);
    sum += x;
    sq += x * x;
  }
  if (sq == 0.0) return 0.0;
  return sum * sum / (static_cast<double>(counts.size()) * sq);
}

inline double fairness(const ScanLedger& ledger) { return fairness(ledger.counts()); }

struct CoverageTime {
  double tc_s{0.0};
  bool censored{false};
  bool operator==(const CoverageTime&) const = default;
};

inline CoverageTime coverage_time(std::span<const double> first_scan, double target,
                                  double sim_time) {
  if (!(target > 0.0 && target <= 1.0))
    throw std::invalid_argument("coverage target must be in (0, 1]");
  const auto n = first_scan.size();
  const auto needed = static_cast<std::size_t>(std::ceil(target * static_cast<double>(n) - 1e-9));
  std::vector<double> times;
  times.reserve(n);
  for (double t : first_scan)
    if (std::isfinite(t)) times.push_back(t);
  if (needed == 0) return {0.0, false};
  if (times.size() < needed) return {sim_time, true};
  std::nth_element(times.begin(), times.begin() + static_cast<long>(needed - 1), times.end());
  return {times[needed - 1], false};
}

inline CoverageTime coverage_time(const ScanLedger& ledger, double target, double sim_time) {
  return coverage_time(ledger.first_scan(), target, sim_time);
}

struct MetricSample {
  double t{0.0};
  std::size_t ncc{0};
  double anc{0.0};
  double covered_fraction{0.0};
  bool operator==(const MetricSample&) const = default;
};

struct RunResult {
  ScenarioConfig config{};
  std::vector<MetricSample> samples;
  double tc_s{0.0};
  bool tc_censored{false};
  double fairness{0.0};
  double ncc_mean{0.0};
  double anc_mean{0.0};
  double ncc_mean_to_tc{0.0};
  double anc_mean_to_tc{0.0};

  bool operator==(const RunResult&) const = default;
};

struct WaypointDecision {
  long tick{0};
  int uav{0};
  Cell cell{};
  bool operator==(const WaypointDecision&) const = default;
};

/// Replaces the configured policy; receives the same inputs (the arrival
/// deposit is the callee's business) and returns the next waypoint.
using CustomPolicy = std::function<Cell(const DecisionInputs&)>;

// ---------------------------------------------------------------------------
// Simulation loop

/// Deterministic single-run simulator. Each tick, in order: motion with
/// collision avoidance, cell scanning, waypoint decisions at arrivals
/// (ascending id), pheromone update, hello exchange, metric sampling; the
/// last three only on their period boundaries.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config, CustomPolicy custom = {})
      : cfg_(std::move(config)), custom_(std::move(custom)) {
    cfg_.validate();
    grid_ = cfg_.grid();
    step_cells_ = cfg_.step_cells();
    total_ticks_ = detail::ticks_for(cfg_.sim_time_s, cfg_.dt_s, "sim_time_s");
    hello_ticks_ = detail::ticks_for(cfg_.hello_period_s, cfg_.dt_s, "hello_period_s");
    sample_ticks_ =
        detail::ticks_for(cfg_.metric_sample_period_s, cfg_.dt_s, "metric_sample_period_s");
    pher_ticks_ =
        detail::ticks_for(cfg_.pheromone_update_period_s, cfg_.dt_s, "pheromone_update_period_s");
    ledger_.emplace(coverage_cell_count(grid_, cfg_.coverage_counts_border));
    deploy();
    exchange_hellos();
    for (std::size_t i = 0; i < uavs_.size(); ++i) decide(i);
  }

  const ScenarioConfig& config() const { return cfg_; }
  const GridSpec& grid() const { return grid_; }
  double time() const { return static_cast<double>(tick_) * cfg_.dt_s; }
  long tick_index() const { return tick_; }
  bool finished() const { return tick_ >= total_ticks_; }
  int step_cells() const { return step_cells_; }

  std::span<const UavState> uavs() const { return uavs_; }
  const PheromoneField& field(std::size_t i) const { return fields_.at(i); }
  const NeighborTable& neighbours(std::size_t i) const { return tables_.at(i); }
  const ScanLedger& ledger() const { return *ledger_; }
  std::span<const MetricSample> samples() const { return samples_; }
  std::span<const WaypointDecision> decisions() const { return decisions_; }
  std::span<const std::optional<int>> avoidance() const { return avoidance_; }

  std::function<void(double, std::span<const UavState>)> on_tick;
  std::function<void(double, int, std::size_t)> on_hello;

  void step() {
    if (finished()) return;
    ++tick_;
    const double t = time();

    avoidance_ = collision_avoidance(uavs_, rule_, avoidance_);
    for (std::size_t i = 0; i < uavs_.size(); ++i) {
      const Vec2 from = uavs_[i].position;
      uavs_[i] = advance(uavs_[i], grid_, cfg_.dt_s, avoidance_[i].has_value());
      for (const Cell& c : cells_traversed(from, uavs_[i].position, grid_)) {
        if (last_scanned_[i] && *last_scanned_[i] == c) continue;
        last_scanned_[i] = c;
        if (const auto slot = coverage_slot(grid_, c, cfg_.coverage_counts_border))
          ledger_->record(*slot, t);
      }
    }

    for (std::size_t i = 0; i < uavs_.size(); ++i)
      if (waypoint_reached(uavs_[i], grid_)) decide(i);

    if (tick_ % pher_ticks_ == 0)
      for (auto& f : fields_) f.step();
    if (tick_ % hello_ticks_ == 0) exchange_hellos();
    if (tick_ % sample_ticks_ == 0) sample(t);
    if (on_tick) on_tick(t, uavs_);
  }

  void run_to_end() {
    while (!finished()) step();
  }

  RunResult result() const {
    RunResult r;
    r.config = cfg_;
    r.samples = samples_;
    const auto cov = coverage_time(*ledger_, cfg_.coverage_target, cfg_.sim_time_s);
    r.tc_s = cov.tc_s;
    r.tc_censored = cov.censored;
    r.fairness = fairness(*ledger_);
    double ncc_sum = 0.0, anc_sum = 0.0, ncc_tc = 0.0, anc_tc = 0.0;
    std::size_t to_tc = 0;
    for (const auto& s : samples_) {
      ncc_sum += static_cast<double>(s.ncc);
      anc_sum += s.anc;
      if (s.t <= r.tc_s) {
        ncc_tc += static_cast<double>(s.ncc);
        anc_tc += s.anc;
        ++to_tc;
      }
    }
    if (!samples_.empty()) {
      const auto n = static_cast<double>(samples_.size());
      r.ncc_mean = ncc_sum / n;
      r.anc_mean = anc_sum / n;
      if (to_tc == 0) {
        r.ncc_mean_to_tc = static_cast<double>(samples_.front().ncc);
        r.anc_mean_to_tc = samples_.front().anc;
      } else {
        r.ncc_mean_to_tc = ncc_tc / static_cast<double>(to_tc);
        r.anc_mean_to_tc = anc_tc / static_cast<double>(to_tc);
      }
    }
    return r;
  }

 private:
  void deploy() {
    const auto n = static_cast<std::size_t>(cfg_.n_uavs);
    const double cx = grid_.width_m() / 2.0;
    const double cy = 2.0 * grid_.cell_size_m();
    uavs_.resize(n);
    last_scanned_.assign(n, std::nullopt);
    avoidance_.assign(n, std::nullopt);
    tables_.assign(n, NeighborTable{});
    fields_.clear();
    chaotic_.clear();
    fields_.reserve(n);
    chaotic_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng = Rng::substream(cfg_.seed, i);
      const double jx = rng.uniform(-cfg_.start_jitter_m, cfg_.start_jitter_m);
      const double jy = rng.uniform(-cfg_.start_jitter_m, cfg_.start_jitter_m);
      const std::array<double, 3> chaos{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};

      UavState& u = uavs_[i];
      u.id = static_cast<int>(i);
      const double offset = (static_cast<double>(i) - (static_cast<double>(n) - 1.0) / 2.0) *
                            cfg_.start_spacing_m;
      u.position = {std::clamp(cx + offset + jx, 0.0, grid_.width_m()),
                    std::clamp(cy + jy, 0.0, grid_.height_m())};
      u.heading = 0.0;
      u.speed = cfg_.speed_mps;
      u.max_turn_rate = deg_to_rad(cfg_.max_turn_rate_deg_s);
      u.current_cell = grid_.cell_of(u.position);
      set_waypoint(u, grid_, u.current_cell);

      fields_.emplace_back(grid_, cfg_.evaporation_rate, cfg_.diffusion_rate,
                           cfg_.boundary_pheromone);
      if (cfg_.policy.kind == PolicyKind::Cacoc2 && !custom_)
        chaotic_.emplace_back(chaos);
    }
    rule_ = {cfg_.collision_distance_m, cfg_.collision_release_m};
  }

  void decide(std::size_t i) {
    UavState& u = uavs_[i];
    u.current_cell = u.next_waypoint_cell;
    const DecisionInputs in{u, fields_[i], tables_[i], step_cells_, cfg_.tx_range_m, time(),
                            cfg_.max_claim_age()};
    Cell next{};
    if (custom_) {
      next = custom_(in);
    } else {
      switch (cfg_.policy.kind) {
        case PolicyKind::Cap: next = cap_select(in, cfg_.policy.beta).cell; break;
        case PolicyKind::Pheromone: next = pheromone_select(in).cell; break;
        case PolicyKind::Cacoc2: next = cacoc2_select(in, chaotic_[i], cfg_.policy.f).chosen.cell; break;
      }
    }
    set_waypoint(u, grid_, next);
    decisions_.push_back({tick_, u.id, next});
  }

  std::vector<NodePosition> positions() const {
    std::vector<NodePosition> out;
    out.reserve(uavs_.size());
    for (const auto& u : uavs_) out.push_back({u.id, u.position});
    return out;
  }

  void exchange_hellos() {
    const double t = time();
    std::vector<HelloMessage> msgs;
    msgs.reserve(uavs_.size());
    for (std::size_t i = 0; i < uavs_.size(); ++i) msgs.push_back(build_hello(uavs_[i], fields_[i], t));
    const auto pos = positions();
    const auto inboxes = deliver(msgs, pos, cfg_.tx_range_m);
    for (std::size_t i = 0; i < uavs_.size(); ++i) {
      apply_inbox(tables_[i], fields_[i], inboxes[i]);
      tables_[i].expire(t, cfg_.max_claim_age());
    }
    if (on_hello) {
      std::vector<std::size_t> receivers(msgs.size(), 0);
      for (const auto& inbox : inboxes)
        for (const auto& m : inbox) ++receivers[static_cast<std::size_t>(m.sender_id)];
      for (std::size_t i = 0; i < msgs.size(); ++i) on_hello(t, msgs[i].sender_id, receivers[i]);
    }
  }

  void sample(double t) {
    const auto pos = positions();
    const auto g = build_graph(pos, cfg_.tx_range_m, t);
    samples_.push_back({t, ncc(g), anc(g), ledger_->covered_fraction()});
  }

  ScenarioConfig cfg_;
  CustomPolicy custom_;
  GridSpec grid_{};
  CollisionRule rule_{};
  int step_cells_{1};
  long tick_{0};
  long total_ticks_{0};
  long hello_ticks_{1};
  long sample_ticks_{1};
  long pher_ticks_{1};
  std::vector<UavState> uavs_;
  std::vector<PheromoneField> fields_;
  std::vector<NeighborTable> tables_;
  std::vector<ChaoticState> chaotic_;
  std::vector<std::optional<Cell>> last_scanned_;
  std::vector<std::optional<int>> avoidance_;
  std::optional<ScanLedger> ledger_;
  std::vector<MetricSample> samples_;
  std::vector<WaypointDecision> decisions_;
};

inline RunResult run(const ScenarioConfig& config) {
  Simulation sim(config);
  sim.run_to_end();
  return sim.result();
}

// ---------------------------------------------------------------------------
// Batches

struct MeanSem {
  double mean{0.0};
  double sem{0.0};
  bool operator==(const MeanSem&) const = default;
};

/// Mean and standard error (sample stddev / sqrt(n)); SEM is 0 for n = 1.
inline MeanSem mean_sem(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_sem of no values");
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

struct BatchResult {
  std::vector<RunResult> runs;  // ordered as the seeds were given
  MeanSem tc_s;
  MeanSem fairness;
  MeanSem ncc_mean;
  MeanSem anc_mean;
  MeanSem ncc_mean_to_tc;
  MeanSem anc_mean_to_tc;
  std::size_t censored{0};
};

inline BatchResult aggregate(std::vector<RunResult> runs) {
  if (runs.empty()) throw std::invalid_argument("batch needs at least one run");
  BatchResult b;
  auto stat = [&](auto member) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(r.*member);
    return mean_sem(v);
  };
  b.tc_s = stat(&RunResult::tc_s);
  b.fairness = stat(&RunResult::fairness);
  b.ncc_mean = stat(&RunResult::ncc_mean);
  b.anc_mean = stat(&RunResult::anc_mean);
  b.ncc_mean_to_tc = stat(&RunResult::ncc_mean_to_tc);
  b.anc_mean_to_tc = stat(&RunResult::anc_mean_to_tc);
  b.censored = static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const RunResult& r) { return r.tc_censored; }));
  b.runs = std::move(runs);
  return b;
}

/// Runs `fn(i)` for i in [0, count) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  {
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

inline BatchResult run_batch(const ScenarioConfig& config, std::span<const std::uint64_t> seeds,
                             unsigned jobs = 0) {
  if (seeds.empty()) throw std::invalid_argument("run_batch needs at least one seed");
  config.validate();
  std::vector<RunResult> runs(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t i) {
    ScenarioConfig c = config;
    c.seed = seeds[i];
    runs[i] = run(c);
  });
  return aggregate(std::move(runs));
}

}  // namespace swarmcap
