#include <gtest/gtest.h>

#include "emtr/locator.hpp"

using namespace emtr;

namespace {

const std::string kDataDir = EMTR_DATA_DIR;

NetworkTopology t_network() { return load_network(kDataDir + "/networks/t_network.net"); }

LocatorConfig config(SearchMode mode, double accuracy) {
  LocatorConfig cfg;
  cfg.mode = mode;
  cfg.accuracy = accuracy;
  cfg.sa.t0 = 1.0;
  cfg.sa.cooling = 0.8;
  cfg.sa.n_term = 10;
  return cfg;
}

}  // namespace

TEST(LocatorConfig, Validation) {
  auto cfg = config(SearchMode::SA, 10.0);
  EXPECT_NO_THROW(cfg.validate());
  cfg.accuracy = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = config(SearchMode::SA, 10.0);
  cfg.guess_impedance = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = config(SearchMode::SA, 10.0);
  cfg.sa.cooling = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SearchMode, RoundTrip) {
  EXPECT_EQ(parse_search_mode(to_string(SearchMode::SA)), SearchMode::SA);
  EXPECT_EQ(parse_search_mode(to_string(SearchMode::Exhaustive)), SearchMode::Exhaustive);
  EXPECT_THROW(parse_search_mode("greedy"), std::invalid_argument);
}

TEST(LocatorGrid, CappedByShortestEdge) {
  const auto net = load_network(kDataDir + "/networks/single_edge.net");
  EXPECT_EQ(locator_grid(net, 5000.0)->grids()[0].cells, 1u);
  EXPECT_EQ(locator_grid(net, 10.0)->grids()[0].cells, 100u);
}

TEST(EnergyLandscape, CachesPerGridPoint) {
  const auto net = t_network();
  const auto grid = locator_grid(net, 100.0);
  const auto measured = simulate_fault(*grid, {{net.edge_index("e2"), 1500.0}, 0.0, 90.0, 0.0});
  EnergyLandscape land(grid, measured, 20.0);
  const double a = land.at({net.edge_index("e2"), 1500.0});
  EXPECT_EQ(land.simulations(), 1u);
  EXPECT_EQ(land.at({net.edge_index("e2"), 1520.0}), a);  // snaps to the same cell
  EXPECT_EQ(land.simulations(), 1u);
  // node 2 reached from all three edges
  const double n2 = land.at({net.edge_index("e1"), 3000.0});
  EXPECT_EQ(land.at({net.edge_index("e2"), 0.0}), n2);
  EXPECT_EQ(land.at({net.edge_index("e3"), 0.0}), n2);
  EXPECT_EQ(land.simulations(), 2u);
  EXPECT_EQ(a, signal_energy(back_inject(*grid, time_reverse(measured), EdgePosition{net.edge_index("e2"), 1500.0}, 20.0)));
}

TEST(LocateFault, ExhaustiveFindsTNetworkTrunkFaults) {
  const auto net = t_network();
  const auto cfg = config(SearchMode::Exhaustive, 50.0);
  const auto grid = locator_grid(net, cfg.accuracy);
  for (const auto& [edge, offset] : std::vector<std::pair<std::string, double>>{{"e1", 1000.0}, {"e2", 1500.0}}) {
    const EdgePosition truth{net.edge_index(edge), offset};
    const auto measured = simulate_fault(*grid, {truth, 1.0, 90.0, 0.0});
    const auto res = locate_fault(net, measured, cfg);
    ASSERT_EQ(res.status, LocationStatus::Located);
    EXPECT_EQ(res.decomposition.paths.size(), 2u);
    EXPECT_LE(network_distance(net, res.edge_position, truth), cfg.accuracy + 1e-6) << edge;
    std::size_t total = 0;
    for (const auto& p : res.per_path) {
      total += p.evaluations;
      EXPECT_EQ(p.evaluations, grid_size(path_length(net, res.decomposition.paths[p.path]), cfg.accuracy));
      EXPECT_LE(p.energy, res.energy);
    }
    EXPECT_EQ(total, res.total_evaluations);
    EXPECT_EQ(total, 180u);  // 9 km of line at 50 m
  }
}

TEST(LocateFault, BranchFaultPeaksOnItsOwnPath) {
  // A fault on the 2-4 branch peaks at the right spot of the 2-4 path, but
  // the trunk path holds a larger spurious maximum (about 0.9 km past node 2
  // on e2), so only the per-path maximum is checked here.
  const auto net = t_network();
  const auto cfg = config(SearchMode::Exhaustive, 50.0);
  const auto grid = locator_grid(net, cfg.accuracy);
  for (double offset : {800.0, 1200.0, 1500.0, 1800.0}) {
    const EdgePosition truth{net.edge_index("e3"), offset};
    const auto res = locate_fault(net, simulate_fault(*grid, {truth, 1.0, 90.0, 0.0}), cfg);
    const auto& branch = res.per_path[1];
    ASSERT_EQ(res.decomposition.paths[branch.path].edges, std::vector<std::size_t>{net.edge_index("e3")});
    EXPECT_LE(network_distance(net, branch.edge_position, truth), cfg.accuracy + 1e-6) << offset;
  }
}

TEST(LocateFault, SaNeverBeatsExhaustive) {
  const auto net = t_network();
  const auto grid = locator_grid(net, 50.0);
  const auto measured = simulate_fault(*grid, {{net.edge_index("e2"), 1500.0}, 1.0, 90.0, 0.0});
  EnergyLandscape land(grid, measured, 20.0);
  const auto full = locate_fault(land, config(SearchMode::Exhaustive, 50.0));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto cfg = config(SearchMode::SA, 50.0);
    cfg.sa.seed = seed;
    const auto res = locate_fault(land, cfg);
    EXPECT_LE(res.energy, full.energy);
    for (const auto& p : res.per_path) EXPECT_EQ(p.evaluations, p.trace.evaluations());
  }
}

TEST(LocateFault, ParallelPathsMatchSerial) {
  const auto net = load_network(kDataDir + "/networks/canonical.net");
  const auto grid = locator_grid(net, 100.0);
  const auto measured = simulate_fault(*grid, {{net.edge_index("e2"), 800.0}, 1.0, 90.0, 0.0});
  auto cfg = config(SearchMode::SA, 100.0);
  cfg.sa.seed = 3;
  EnergyLandscape serial_land(grid, measured, 20.0);
  EnergyLandscape parallel_land(grid, measured, 20.0);
  const auto serial = locate_fault(serial_land, cfg);
  cfg.jobs = 3;
  const auto parallel = locate_fault(parallel_land, cfg);
  ASSERT_EQ(serial.per_path.size(), 5u);
  for (std::size_t i = 0; i < serial.per_path.size(); ++i) {
    EXPECT_EQ(serial.per_path[i].position, parallel.per_path[i].position);
    EXPECT_EQ(serial.per_path[i].energy, parallel.per_path[i].energy);
    EXPECT_EQ(serial.per_path[i].evaluations, parallel.per_path[i].evaluations);
  }
  EXPECT_EQ(serial.path, parallel.path);
}

TEST(LocateFault, NoTransient) {
  const auto net = t_network();
  const Waveform flat{std::vector<double>(100, 0.0), 1e-7, 0.0};
  EXPECT_EQ(locate_fault(net, flat, config(SearchMode::SA, 50.0)).status, LocationStatus::NoTransient);
  EXPECT_THROW(locate_fault(net, Waveform{}, config(SearchMode::SA, 50.0)), std::invalid_argument);
}

TEST(LocateFault, ExplicitDecomposition) {
  const auto net = t_network();
  const auto grid = locator_grid(net, 100.0);
  const auto measured = simulate_fault(*grid, {{net.edge_index("e1"), 1200.0}, 1.0, 90.0, 0.0});
  EnergyLandscape land(grid, measured, 20.0);
  auto cfg = config(SearchMode::Exhaustive, 100.0);
  // 4-2-1 and 2-3 is another minimal cover
  cfg.decomposition = PathDecomposition{{Path{{3, 1, 0}, {2, 0}}, Path{{1, 2}, {1}}}};
  const auto res = locate_fault(land, cfg);
  EXPECT_EQ(res.per_path.size(), 2u);
  EXPECT_LE(network_distance(net, res.edge_position, {net.edge_index("e1"), 1200.0}), 100.0 + 1e-6);

  cfg.decomposition = PathDecomposition{{Path{{3, 1, 0}, {2, 0}}}};  // misses e2
  EXPECT_THROW(locate_fault(land, cfg), std::invalid_argument);
}

TEST(Campaign, RowsSummariesAndIsolation) {
  const auto net = t_network();
  auto cfg = config(SearchMode::SA, 100.0);
  cfg.sa.seed = 10;
  std::vector<CampaignScenario> scenarios{
      {"good", {{net.edge_index("e2"), 1500.0}, 1.0, 90.0, 0.0}},
      {"bad", {{net.edge_index("e2"), 1500.0}, 1.0, 90.0, 1e-7}},  // window shorter than a transit
  };
  const auto report = locate_campaign(net, scenarios, cfg, 4);
  ASSERT_EQ(report.summaries.size(), 2u);
  EXPECT_TRUE(report.summaries[0].error.empty());
  EXPECT_FALSE(report.summaries[1].error.empty());
  ASSERT_EQ(report.rows.size(), 4u);
  const auto& s = report.summaries[0];
  EXPECT_EQ(s.runs, 4u);
  EXPECT_EQ(s.exhaustive_evaluations, 90u);
  EXPECT_LE(s.min_evaluations, s.max_evaluations);
  EXPECT_LE(s.simulations, 90u + 1u);
  double successes = 0.0;
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    const auto& row = report.rows[r];
    EXPECT_EQ(row.seed, 10u + r);
    EXPECT_EQ(row.success, row.error <= 100.0 + 1e-6);
    successes += row.success ? 1.0 : 0.0;
  }
  EXPECT_DOUBLE_EQ(s.success_rate, successes / 4.0);
  EXPECT_THROW(locate_campaign(net, scenarios, cfg, 0), std::invalid_argument);
}
