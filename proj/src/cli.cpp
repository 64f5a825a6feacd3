#include "emtr/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "emtr/csv_io.hpp"
#include "emtr/locator.hpp"

namespace emtr {

namespace fs = std::filesystem;

namespace {

double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("fault field '" + key + "' is not a number: '" + text + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string path_nodes(const NetworkTopology& net, const Path& p) {
  std::string s;
  for (auto v : p.nodes) s += (s.empty() ? "" : "-") + net.node_ids[v];
  return s;
}

struct Options {
  std::string network;
  std::vector<std::string> faults;
  std::string scenarios;
  std::string measured;
  double accuracy = 10.0;
  double step = 0.0;
  double guess_r = 20.0;
  double t0 = 1.0;
  double cooling = 0.8;
  int n_term = 10;
  bool reset_width = false;
  std::string mode = "sa";
  std::string seed = "1";
  std::size_t repeats = 1;
  std::string out;
  unsigned jobs = 1;
  std::uint64_t decomp_seed = kDefaultDecompositionSeed;
  bool verbose = false;
};

std::uint64_t resolve_seed(const std::string& text) {
  if (text == "random") return std::random_device{}() * 0x100000001ULL ^ std::random_device{}();
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) throw ConfigError("--seed expects an integer or 'random'");
  return v;
}

LocatorConfig locator_config(const Options& o) {
  LocatorConfig cfg;
  cfg.accuracy = o.accuracy;
  cfg.guess_impedance = o.guess_r;
  cfg.sa.t0 = o.t0;
  cfg.sa.cooling = o.cooling;
  cfg.sa.n_term = o.n_term;
  cfg.sa.reset_width = o.reset_width;
  cfg.sa.seed = resolve_seed(o.seed);
  cfg.mode = parse_search_mode(o.mode);
  cfg.decomposition_seed = o.decomp_seed;
  cfg.jobs = o.jobs;
  cfg.validate();
  return cfg;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir + "'");
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  return f;
}

// The measured signal: a CSV file, or a simulated fault on the locator grid.
Waveform measured_signal(const NetworkTopology& net, const Options& o, const DiscretizedNetwork& grid) {
  if (!o.measured.empty() == !o.faults.empty() || o.faults.size() > 1) {
    throw ConfigError("give exactly one of --fault or --measured");
  }
  if (!o.measured.empty()) {
    std::ifstream in(o.measured);
    if (!in) throw ConfigError("cannot open measured waveform '" + o.measured + "'");
    return read_waveform_csv(in);
  }
  return simulate_fault(grid, parse_fault_spec(net, o.faults.front()));
}

int cmd_locate(const Options& o, std::ostream& out) {
  const auto net = load_network(o.network);
  const auto cfg = locator_config(o);
  const auto grid = locator_grid(net, cfg.accuracy);
  const auto measured = measured_signal(net, o, *grid);
  const auto res = [&] {
    double peak = 0.0;
    for (double s : measured.samples) peak = std::max(peak, std::abs(s));
    if (peak <= kNoTransientThreshold) {
      LocationResult none;
      none.status = LocationStatus::NoTransient;
      return none;
    }
    EnergyLandscape landscape(grid, measured, cfg.guess_impedance);
    return locate_fault(landscape, cfg);
  }();
  if (res.status == LocationStatus::NoTransient) {
    out << "no transient detected\n";
    return kExitNoTransient;
  }

  out << "mode: " << to_string(cfg.mode) << "\n";
  out << "paths: k=" << res.decomposition.paths.size() << "\n";
  for (const auto& p : res.per_path) {
    out << "  path " << p.path + 1 << " (" << path_nodes(net, res.decomposition.paths[p.path]) << "): max at "
        << fmt(p.position) << " m, energy " << fmt(p.energy) << " A^2*us, evaluations " << p.evaluations << "\n";
  }
  const auto& edge = net.edges[res.edge_position.edge];
  out << "located: path " << res.path + 1 << " at " << fmt(res.position) << " m (edge " << edge.id << ", "
      << fmt(res.edge_position.offset) << " m from node " << net.node_ids[edge.a] << ")\n";
  out << "energy: " << fmt(res.energy) << " A^2*us\n";
  out << "evaluations: " << res.total_evaluations << "\n";
  if (o.verbose) out << "wall time: " << fmt(res.wall_time) << " s\n";

  if (!o.out.empty()) {
    ensure_dir(o.out);
    for (const auto& p : res.per_path) {
      const auto name = (cfg.mode == SearchMode::SA ? "trace_path" : "sweep_path") + std::to_string(p.path + 1) + ".csv";
      auto f = open_out(fs::path(o.out) / name);
      if (cfg.mode == SearchMode::SA) {
        write_trace_csv(f, p.trace);
      } else {
        std::vector<std::pair<double, double>> rows;
        for (std::size_t k = 0; k < p.sweep.values.size(); ++k) {
          rows.emplace_back(static_cast<double>(k + 1) * cfg.accuracy, p.sweep.values[k]);
        }
        write_sweep_csv(f, rows);
      }
    }
  }
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const auto net = load_network(o.network);
  const double step = o.step > 0.0 ? o.step : o.accuracy;
  if (!(step > 0.0)) throw ConfigError("--step must be positive");
  if (!(o.guess_r > 0.0)) throw ConfigError("--guess-r must be positive");
  const auto grid = locator_grid(net, step);
  const auto measured = measured_signal(net, o, *grid);
  EnergyLandscape landscape(grid, measured, o.guess_r);
  const auto decomposition = decompose_into_paths(net.graph(), o.decomp_seed);
  const std::string dir = o.out.empty() ? "." : o.out;
  ensure_dir(dir);

  out << "paths: k=" << decomposition.paths.size() << "\n";
  std::size_t evaluations = 0;
  for (std::size_t i = 0; i < decomposition.paths.size(); ++i) {
    const auto& path = decomposition.paths[i];
    const double length = path_length(net, path);
    std::vector<double> positions;
    for (std::size_t k = 1; k <= grid_size(length, step); ++k) positions.push_back(static_cast<double>(k) * step);
    if (positions.empty()) positions.push_back(length);
    std::vector<std::pair<double, double>> rows;
    std::size_t best = 0;
    for (double s : positions) {
      rows.emplace_back(s, landscape.at(path_to_edge_position(net, path, s)));
      if (rows.back().second > rows[best].second) best = rows.size() - 1;
    }
    evaluations += rows.size();
    auto f = open_out(fs::path(dir) / ("sweep_path" + std::to_string(i + 1) + ".csv"));
    write_sweep_csv(f, rows);
    out << "  path " << i + 1 << " (" << path_nodes(net, path) << "): max at " << fmt(rows[best].first)
        << " m, energy " << fmt(rows[best].second) << " A^2*us\n";
  }
  out << "evaluations: " << evaluations << "\n";
  return kExitOk;
}

int cmd_decompose(const Options& o, std::ostream& out) {
  const auto net = load_network(o.network);
  const auto d = decompose_into_paths(net.graph(), o.decomp_seed);
  out << "k=" << d.paths.size() << "\n" << format_decomposition(d, net.node_ids);
  return kExitOk;
}

std::vector<CampaignScenario> campaign_scenarios(const NetworkTopology& net, const Options& o) {
  std::vector<std::string> specs = o.faults;
  if (!o.scenarios.empty()) {
    std::ifstream in(o.scenarios);
    if (!in) throw ConfigError("cannot open scenario file '" + o.scenarios + "'");
    for (std::string line; std::getline(in, line);) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line.erase(0, line.find_first_not_of(" \t\r"));
      line.erase(line.find_last_not_of(" \t\r") + 1);
      if (!line.empty()) specs.push_back(line);
    }
  }
  if (specs.empty()) throw ConfigError("campaign needs --fault or --scenarios");
  std::vector<CampaignScenario> out;
  for (const auto& spec : specs) {
    CampaignScenario sc;
    sc.fault = parse_fault_spec(net, spec, &sc.name);
    if (sc.name.empty()) sc.name = "s" + std::to_string(out.size() + 1);
    out.push_back(sc);
  }
  return out;
}

int cmd_campaign(const Options& o, std::ostream& out) {
  const auto net = load_network(o.network);
  const auto cfg = locator_config(o);
  const auto scenarios = campaign_scenarios(net, o);
  if (o.repeats < 1) throw ConfigError("--repeats must be at least 1");
  const auto report = locate_campaign(net, scenarios, cfg, o.repeats);
  for (const auto& s : report.summaries) {
    out << s.scenario << ": ";
    if (!s.error.empty()) {
      out << "error: " << s.error << "\n";
      continue;
    }
    out << "success " << fmt(100.0 * s.success_rate) << "% of " << s.runs << ", evaluations mean "
        << fmt(s.mean_evaluations) << " min " << s.min_evaluations << " max " << s.max_evaluations
        << ", exhaustive " << s.exhaustive_evaluations << "\n";
  }
  if (!o.out.empty()) {
    ensure_dir(o.out);
    auto f = open_out(fs::path(o.out) / "campaign.csv");
    write_campaign_csv(f, report.rows);
  }
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const auto net = load_network(o.network);
  if (o.faults.size() != 1) throw ConfigError("simulate needs exactly one --fault");
  const auto grid = locator_grid(net, o.accuracy);
  SimulationInfo info;
  const auto w = simulate_fault(*grid, parse_fault_spec(net, o.faults.front()), &info);
  if (o.out.empty()) {
    write_waveform_csv(out, w);
  } else {
    auto f = open_out(o.out);
    write_waveform_csv(f, w);
  }
  return kExitOk;
}

}  // namespace

FaultScenario parse_fault_spec(const NetworkTopology& net, const std::string& spec, std::string* name) {
  FaultScenario sc;
  bool have_edge = false;
  bool have_offset = false;
  std::istringstream ss(spec);
  for (std::string field; std::getline(ss, field, ',');) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ConfigError("fault field '" + field + "' is not key=value");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "edge") {
      sc.position.edge = net.edge_index(value);
      have_edge = true;
    } else if (key == "offset") {
      sc.position.offset = parse_number(key, value);
      have_offset = true;
    } else if (key == "R") {
      sc.impedance = parse_number(key, value);
    } else if (key == "angle") {
      sc.inception_angle = parse_number(key, value);
    } else if (key == "window") {
      sc.record_window = parse_number(key, value) * 1e-6;
    } else if (key == "name") {
      if (name != nullptr) *name = value;
    } else {
      throw ConfigError("unknown fault field '" + key + "'");
    }
  }
  if (!have_edge || !have_offset) throw ConfigError("fault needs edge= and offset=");
  const double length = net.edges[sc.position.edge].length;
  if (sc.position.offset < 0.0 || sc.position.offset > length) {
    throw ConfigError("fault offset outside edge '" + net.edges[sc.position.edge].id + "'");
  }
  if (sc.impedance < 0.0) throw ConfigError("fault R must be >= 0");
  if (sc.inception_angle < 0.0 || sc.inception_angle >= 360.0) throw ConfigError("fault angle must lie in [0, 360)");
  return sc;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fault location on branched line networks by electromagnetic time reversal", "emtr"};
  app.require_subcommand(1);
  Options o;

  const auto add_network = [&](CLI::App* c) {
    c->add_option("--network", o.network, "network description file")->required();
  };
  const auto add_locator = [&](CLI::App* c) {
    c->add_option("--accuracy", o.accuracy, "search grid spacing in m")->capture_default_str();
    c->add_option("--guess-r", o.guess_r, "guessed fault branch resistance in ohm")->capture_default_str();
    c->add_option("--t0", o.t0, "starting temperature")->capture_default_str();
    c->add_option("--cooling", o.cooling, "cooling factor per acceptance")->capture_default_str();
    c->add_option("--n-term", o.n_term, "consecutive rejections that end a run")->capture_default_str();
    c->add_flag("--reset-width", o.reset_width, "restore the full perturbation width on every acceptance");
    c->add_option("--mode", o.mode, "sa or exhaustive")->capture_default_str();
    c->add_option("--seed", o.seed, "integer or 'random'")->capture_default_str();
    c->add_option("--decomp-seed", o.decomp_seed, "seed of the path decomposition")->capture_default_str();
    c->add_option("--jobs", o.jobs, "concurrent searches")->capture_default_str();
  };

  auto* locate = app.add_subcommand("locate", "locate a fault from a simulated or measured transient");
  add_network(locate);
  add_locator(locate);
  locate->add_option("--fault", o.faults, "edge=<id>,offset=<m>,R=<ohm>,angle=<deg>");
  locate->add_option("--measured", o.measured, "observed transient as time_us,value CSV");
  locate->add_option("--out", o.out, "directory for per-path trace CSVs");
  locate->add_flag("--verbose", o.verbose, "also report wall time");

  auto* sweep = app.add_subcommand("sweep", "exhaustive energy sweep along every path");
  add_network(sweep);
  sweep->add_option("--fault", o.faults, "edge=<id>,offset=<m>,R=<ohm>,angle=<deg>");
  sweep->add_option("--measured", o.measured, "observed transient as time_us,value CSV");
  sweep->add_option("--step", o.step, "sweep spacing in m (default: --accuracy)");
  sweep->add_option("--accuracy", o.accuracy, "grid spacing in m")->capture_default_str();
  sweep->add_option("--guess-r", o.guess_r, "guessed fault branch resistance in ohm")->capture_default_str();
  sweep->add_option("--decomp-seed", o.decomp_seed, "seed of the path decomposition")->capture_default_str();
  sweep->add_option("--out", o.out, "directory for sweep_path<i>.csv (default: current)");

  auto* decompose = app.add_subcommand("decompose", "print the minimal path decomposition");
  add_network(decompose);
  decompose->add_option("--decomp-seed", o.decomp_seed, "seed of the path decomposition")->capture_default_str();

  auto* campaign = app.add_subcommand("campaign", "repeat locations over several fault scenarios");
  add_network(campaign);
  add_locator(campaign);
  campaign->add_option("--fault", o.faults, "scenario, repeatable; may carry name=<label>");
  campaign->add_option("--scenarios", o.scenarios, "file with one fault spec per line");
  campaign->add_option("--repeats", o.repeats, "locations per scenario")->capture_default_str();
  campaign->add_option("--out", o.out, "directory for campaign.csv");

  auto* simulate = app.add_subcommand("simulate", "write the observed fault transient as CSV");
  add_network(simulate);
  simulate->add_option("--fault", o.faults, "edge=<id>,offset=<m>,R=<ohm>,angle=<deg>")->required();
  simulate->add_option("--accuracy", o.accuracy, "grid spacing in m")->capture_default_str();
  simulate->add_option("--out", o.out, "output file (default: standard output)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*locate) return cmd_locate(o, out);
    if (*sweep) return cmd_sweep(o, out);
    if (*decompose) return cmd_decompose(o, out);
    if (*campaign) return cmd_campaign(o, out);
    if (*simulate) return cmd_simulate(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace emtr
