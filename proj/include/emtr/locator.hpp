#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "emtr/annealing.hpp"
#include "emtr/graph.hpp"
#include "emtr/network.hpp"
#include "emtr/simulator.hpp"

namespace emtr {

enum class SearchMode { SA, Exhaustive };

struct LocatorConfig {
  SAParams sa;            // sa.accuracy is ignored in favour of `accuracy`
  double accuracy = 10.0;  // m
  double guess_impedance = 20.0;
  SearchMode mode = SearchMode::SA;
  std::uint64_t decomposition_seed = kDefaultDecompositionSeed;
  std::optional<PathDecomposition> decomposition;  // overrides decomposition_seed
  unsigned jobs = 1;                               // paths optimized concurrently

  void validate() const;  // throws std::invalid_argument
};

/// Branch-current energy as a function of guessed position, for one measured
/// waveform. Results are cached per grid point, so repeated or overlapping
/// searches only pay for new points. Thread-safe.
class EnergyLandscape {
 public:
  EnergyLandscape(std::shared_ptr<const DiscretizedNetwork> dnet, const Waveform& measured, double guess_impedance);

  const DiscretizedNetwork& grid() const { return *dnet_; }
  double guess_impedance() const { return guess_impedance_; }
  double at(const EdgePosition& pos);
  /// Back-injections actually run so far.
  std::size_t simulations() const;

 private:
  std::shared_ptr<const DiscretizedNetwork> dnet_;
  Waveform reversed_;
  double guess_impedance_;
  mutable std::mutex mutex_;
  std::map<GridPoint, double> cache_;
  std::size_t simulations_ = 0;
};

struct PathResult {
  std::size_t path = 0;
  double position = 0.0;  // m along the path
  EdgePosition edge_position;
  double energy = 0.0;
  std::size_t evaluations = 0;
  OptimizationTrace trace;     // SA mode
  ExhaustiveResult sweep;      // exhaustive mode
};

enum class LocationStatus { Located, NoTransient };

struct LocationResult {
  LocationStatus status = LocationStatus::Located;
  PathDecomposition decomposition;
  std::size_t path = 0;
  double position = 0.0;
  EdgePosition edge_position;
  double energy = 0.0;
  std::vector<PathResult> per_path;
  std::size_t total_evaluations = 0;
  double wall_time = 0.0;  // s
};

/// Measured waveforms whose peak magnitude does not exceed this are treated
/// as carrying no fault transient.
inline constexpr double kNoTransientThreshold = 1e-9;

/// Full pipeline on a measured observation-node voltage.
LocationResult locate_fault(const NetworkTopology& net, const Waveform& measured, const LocatorConfig& cfg);

/// Same pipeline over an existing landscape, which must be built with
/// cfg.guess_impedance on a grid no coarser than cfg.accuracy.
LocationResult locate_fault(EnergyLandscape& landscape, const LocatorConfig& cfg);

/// Grid used by locate_fault: cells of at most `accuracy`, capped by the
/// shortest edge.
std::shared_ptr<const DiscretizedNetwork> locator_grid(const NetworkTopology& net, double accuracy);

struct CampaignScenario {
  std::string name;
  FaultScenario fault;
};

struct CampaignRow {
  std::string scenario;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::size_t located_path = 0;
  double located_position = 0.0;
  double true_position = 0.0;  // on the path holding the fault's edge
  double error = 0.0;          // network distance between located and true point
  double energy = 0.0;
  std::size_t evaluations = 0;
  SearchMode mode = SearchMode::SA;
  bool success = false;
};

struct ScenarioSummary {
  std::string scenario;
  std::size_t runs = 0;
  double success_rate = 0.0;
  double mean_evaluations = 0.0;
  std::size_t min_evaluations = 0;
  std::size_t max_evaluations = 0;
  std::size_t exhaustive_evaluations = 0;
  std::size_t simulations = 0;  // distinct back-injections run for this scenario
  std::string error;            // set when the scenario could not be run
};

struct CampaignReport {
  std::vector<CampaignRow> rows;
  std::vector<ScenarioSummary> summaries;
};

/// Simulates each scenario, then locates it `repeats` times with seeds
/// cfg.sa.seed, cfg.sa.seed + 1, ... A failing scenario is reported in its
/// summary and does not stop the others.
CampaignReport locate_campaign(const NetworkTopology& net, const std::vector<CampaignScenario>& scenarios,
                               const LocatorConfig& cfg, std::size_t repeats);

std::string to_string(SearchMode mode);
SearchMode parse_search_mode(const std::string& text);

}  // namespace emtr
