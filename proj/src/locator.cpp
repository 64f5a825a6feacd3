#include "emtr/locator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace emtr {

void LocatorConfig::validate() const {
  if (!(accuracy > 0.0)) throw std::invalid_argument("accuracy must be positive");
  if (!(guess_impedance > 0.0)) throw std::invalid_argument("guess impedance must be positive");
  SAParams p = sa;
  p.accuracy = accuracy;
  p.validate();
}

EnergyLandscape::EnergyLandscape(std::shared_ptr<const DiscretizedNetwork> dnet, const Waveform& measured,
                                 double guess_impedance)
    : dnet_(std::move(dnet)), reversed_(time_reverse(measured)), guess_impedance_(guess_impedance) {
  if (measured.samples.empty()) throw std::invalid_argument("measured waveform is empty");
  if (std::abs(reversed_.dt - dnet_->dt()) > 1e-9 * dnet_->dt()) reversed_ = resample(reversed_, dnet_->dt());
}

double EnergyLandscape::at(const EdgePosition& pos) {
  const auto key = dnet_->canonical(dnet_->snap(pos));
  {
    std::lock_guard lock(mutex_);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const double e = signal_energy(back_inject(*dnet_, reversed_, key, guess_impedance_));
  std::lock_guard lock(mutex_);
  ++simulations_;
  cache_.emplace(key, e);
  return e;
}

std::size_t EnergyLandscape::simulations() const {
  std::lock_guard lock(mutex_);
  return simulations_;
}

std::shared_ptr<const DiscretizedNetwork> locator_grid(const NetworkTopology& net, double accuracy) {
  double shortest = std::numeric_limits<double>::infinity();
  for (const auto& e : net.edges) shortest = std::min(shortest, e.length);
  return std::make_shared<const DiscretizedNetwork>(net, std::min(accuracy, shortest));
}

namespace {

template <typename F>
void run_parallel(std::size_t count, unsigned jobs, F&& task) {
  const auto workers = std::min<std::size_t>(std::max(1u, jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double peak_magnitude(const Waveform& w) {
  double m = 0.0;
  for (double s : w.samples) m = std::max(m, std::abs(s));
  return m;
}

}  // namespace

LocationResult locate_fault(EnergyLandscape& landscape, const LocatorConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto& net = landscape.grid().topology();

  LocationResult result;
  if (cfg.decomposition) {
    if (const auto err = check_decomposition(net.graph(), *cfg.decomposition); !err.empty()) {
      throw std::invalid_argument("invalid decomposition: " + err);
    }
    result.decomposition = *cfg.decomposition;
  } else {
    result.decomposition = decompose_into_paths(net.graph(), cfg.decomposition_seed);
  }

  const auto& paths = result.decomposition.paths;
  result.per_path.resize(paths.size());
  run_parallel(paths.size(), cfg.jobs, [&](std::size_t i) {
    const auto& path = paths[i];
    const auto objective = [&](double s) { return landscape.at(path_to_edge_position(net, path, s)); };
    const double length = path_length(net, path);
    PathResult& r = result.per_path[i];
    r.path = i;
    if (cfg.mode == SearchMode::SA) {
      SAParams p = cfg.sa;
      p.accuracy = cfg.accuracy;
      r.trace = sa_maximize(objective, length, p);
      r.position = r.trace.final_position;
      r.energy = r.trace.final_value;
      r.evaluations = r.trace.evaluations();
    } else {
      r.sweep = exhaustive_maximize(objective, length, cfg.accuracy);
      r.position = r.sweep.position;
      r.energy = r.sweep.value;
      r.evaluations = r.sweep.evaluations;
    }
    r.edge_position = path_to_edge_position(net, path, r.position);
  });

  std::size_t best = 0;
  for (std::size_t i = 0; i < result.per_path.size(); ++i) {
    result.total_evaluations += result.per_path[i].evaluations;
    if (result.per_path[i].energy > result.per_path[best].energy) best = i;
  }
  result.path = best;
  result.position = result.per_path[best].position;
  result.edge_position = result.per_path[best].edge_position;
  result.energy = result.per_path[best].energy;
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

LocationResult locate_fault(const NetworkTopology& net, const Waveform& measured, const LocatorConfig& cfg) {
  cfg.validate();
  if (measured.samples.empty()) throw std::invalid_argument("measured waveform is empty");
  if (peak_magnitude(measured) <= kNoTransientThreshold) {
    LocationResult r;
    r.status = LocationStatus::NoTransient;
    return r;
  }
  EnergyLandscape landscape(locator_grid(net, cfg.accuracy), measured, cfg.guess_impedance);
  return locate_fault(landscape, cfg);
}

CampaignReport locate_campaign(const NetworkTopology& net, const std::vector<CampaignScenario>& scenarios,
                               const LocatorConfig& cfg, std::size_t repeats) {
  if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");
  cfg.validate();
  CampaignReport report;
  const auto dnet = locator_grid(net, cfg.accuracy);

  for (const auto& sc : scenarios) {
    ScenarioSummary summary;
    summary.scenario = sc.name;
    try {
      const auto measured = simulate_fault(*dnet, sc.fault);
      if (peak_magnitude(measured) <= kNoTransientThreshold) throw std::runtime_error("no transient detected");
      EnergyLandscape landscape(dnet, measured, cfg.guess_impedance);
      const auto decomposition =
          cfg.decomposition ? *cfg.decomposition : decompose_into_paths(net.graph(), cfg.decomposition_seed);

      // The true point in path coordinates, on the path that owns its edge.
      double true_position = 0.0;
      for (const auto& path : decomposition.paths) {
        if (std::find(path.edges.begin(), path.edges.end(), sc.fault.position.edge) != path.edges.end()) {
          true_position = edge_position_to_path(net, path, sc.fault.position);
        }
      }
      std::size_t exhaustive = 0;
      for (const auto& path : decomposition.paths) exhaustive += grid_size(path_length(net, path), cfg.accuracy);

      std::vector<CampaignRow> rows(repeats);
      LocatorConfig run_cfg = cfg;
      run_cfg.decomposition = decomposition;
      run_cfg.jobs = 1;
      run_parallel(repeats, cfg.jobs, [&](std::size_t r) {
        LocatorConfig c = run_cfg;
        c.sa.seed = cfg.sa.seed + r;
        const auto res = locate_fault(landscape, c);
        auto& row = rows[r];
        row.scenario = sc.name;
        row.repeat = r;
        row.seed = c.sa.seed;
        row.located_path = res.path;
        row.located_position = res.position;
        row.true_position = true_position;
        row.error = network_distance(net, res.edge_position, sc.fault.position);
        row.energy = res.energy;
        row.evaluations = res.total_evaluations;
        row.mode = cfg.mode;
        row.success = row.error <= cfg.accuracy + 1e-6;
      });

      summary.runs = repeats;
      summary.exhaustive_evaluations = exhaustive;
      summary.min_evaluations = std::numeric_limits<std::size_t>::max();
      double successes = 0.0;
      double evaluations = 0.0;
      for (const auto& row : rows) {
        successes += row.success ? 1.0 : 0.0;
        evaluations += static_cast<double>(row.evaluations);
        summary.min_evaluations = std::min(summary.min_evaluations, row.evaluations);
        summary.max_evaluations = std::max(summary.max_evaluations, row.evaluations);
      }
      summary.success_rate = successes / static_cast<double>(repeats);
      summary.mean_evaluations = evaluations / static_cast<double>(repeats);
      summary.simulations = landscape.simulations();
      report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    } catch (const std::exception& e) {
      summary.error = e.what();
      summary.min_evaluations = 0;
    }
    report.summaries.push_back(summary);
  }
  return report;
}

std::string to_string(SearchMode mode) { return mode == SearchMode::SA ? "sa" : "exhaustive"; }

SearchMode parse_search_mode(const std::string& text) {
  if (text == "sa") return SearchMode::SA;
  if (text == "exhaustive") return SearchMode::Exhaustive;
  throw std::invalid_argument("unknown mode '" + text + "' (expected sa or exhaustive)");
}

}  // namespace emtr
