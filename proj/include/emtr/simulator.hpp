#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "emtr/network.hpp"

namespace emtr {

/// Uniformly sampled signal; sample i is taken at start_time + i*dt (seconds).
struct Waveform {
  std::vector<double> samples;
  double dt = 0.0;
  double start_time = 0.0;

  double duration() const { return dt * static_cast<double>(samples.size()); }
};

Waveform time_reverse(const Waveform& w);

/// Sum of squared samples times dt, with dt taken in microseconds, so a
/// current waveform yields A^2*us.
double signal_energy(const Waveform& w);

/// Linear interpolation onto a new step covering the same duration.
Waveform resample(const Waveform& w, double dt);

/// A voltage sample point of the grid: index 0 and index == cells are the
/// edge's end nodes, everything in between is interior to the edge.
struct GridPoint {
  std::size_t edge = 0;
  std::size_t index = 0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
  friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

struct EdgeGrid {
  std::size_t cells = 0;
  double dx = 0.0;     // m
  double speed = 0.0;  // m/s
};

/// Immutable space/time grid for one network. Safe to share between threads.
class DiscretizedNetwork {
 public:
  DiscretizedNetwork(NetworkTopology net, double target_dx);

  const NetworkTopology& topology() const { return net_; }
  const std::vector<EdgeGrid>& grids() const { return grids_; }
  double dt() const { return dt_; }
  std::size_t total_cells() const;

  /// Largest over node pairs of the quickest travel time between them.
  double longest_travel_time() const { return longest_travel_; }

  /// Nearest grid point; snap_distance receives |offset - snapped offset|.
  GridPoint snap(const EdgePosition& pos, double* snap_distance = nullptr) const;
  EdgePosition position(const GridPoint& p) const;
  /// The network node a grid point coincides with, if any.
  std::optional<std::size_t> node_at(const GridPoint& p) const;
  /// Canonical form: points on a node map to the lowest-index edge touching it.
  GridPoint canonical(const GridPoint& p) const;

 private:
  NetworkTopology net_;
  std::vector<EdgeGrid> grids_;
  double dt_ = 0.0;
  double longest_travel_ = 0.0;
};

DiscretizedNetwork discretize(const NetworkTopology& net, double target_dx);

/// Staggered leapfrog integrator of the telegrapher's equations on a
/// discretized network. Voltages live on grid points, currents on the cell
/// midpoints between them. Lumped elements (resistive shunts and Thevenin
/// sources) attach to grid points and are integrated with the trapezoidal
/// rule, series resistance semi-implicitly, so only the CFL bound applies.
/// One instance owns all mutable state of one run.
class TransientSolver {
 public:
  /// emf for the step from t_n to t_{n+1}, given n.
  using Drive = std::function<double(std::size_t step)>;

  explicit TransientSolver(const DiscretizedNetwork& dnet);

  /// Shunt to ground; resistance 0 is an ideal short. Returns an element id.
  std::size_t add_shunt(const GridPoint& p, double resistance);
  /// Voltage source behind series_resistance (> 0) to ground.
  std::size_t add_source(const GridPoint& p, double series_resistance, Drive emf);

  /// Healthy-network sinusoidal steady state of the network's own AC source
  /// and terminations with the given source phase at t = 0.
  void initialize_steady_state(double phase_rad);

  void step();
  std::size_t steps_taken() const { return step_; }

  double voltage(const GridPoint& p) const;
  /// Current into the element from the network averaged over the last step.
  double element_current(std::size_t id) const;

 private:
  struct Element {
    GridPoint at;
    double conductance = 0.0;  // infinite for ideal shorts
    bool short_circuit = false;
    Drive emf;
    double current = 0.0;
  };
  struct Lump {
    std::size_t voltage_slot = 0;
    double capacitance = 0.0;
    std::vector<std::size_t> elements;
    std::optional<std::size_t> node;  // set for network nodes
    std::size_t edge = 0;             // for interior points
    std::size_t index = 0;
  };

  std::size_t lump_for(const GridPoint& p);
  std::size_t voltage_slot(const GridPoint& p) const;
  void update_lump(Lump& lump, double v_old);

  const DiscretizedNetwork& dnet_;
  std::vector<std::size_t> v_offset_;  // per edge, into v_ (cells + 1 slots)
  std::vector<std::size_t> i_offset_;  // per edge, into i_ (cells slots)
  std::vector<double> v_;
  std::vector<double> i_;
  std::vector<double> node_v_;
  std::vector<double> node_c_;
  std::vector<double> coef_i_decay_, coef_i_drive_, coef_v_;
  std::vector<Element> elements_;
  std::vector<Lump> lumps_;
  std::vector<int> node_lump_;  // per node, index into lumps_
  // Per node: current slots flowing in (+1) or out (-1), and mirrored voltage slots.
  std::vector<std::vector<std::pair<std::size_t, double>>> node_currents_;
  std::vector<std::vector<std::size_t>> node_slots_;
  std::vector<double> lump_v_old_;
  std::size_t step_ = 0;
};

/// Faults at or above this impedance are treated as absent.
inline constexpr double kOpenCircuitImpedance = 1e9;

struct FaultScenario {
  EdgePosition position;
  double impedance = 0.0;        // ohm
  double inception_angle = 90.0;  // degrees, source terminal voltage phase at fault closing
  double record_window = 0.0;     // s; 0 selects default_record_window()
};

/// 20 times the longest one-way travel time across the network.
double default_record_window(const DiscretizedNetwork& dnet);

struct SimulationInfo {
  double snap_distance = 0.0;
  GridPoint grid_point;
  std::vector<std::string> warnings;
  Waveform healthy_fault_point_voltage;  // prefault voltage continued at the fault point
};

/// Fault-generated transient at the observation node: faulted run minus an
/// otherwise identical healthy run, both starting from AC steady state.
Waveform simulate_fault(const DiscretizedNetwork& dnet, const FaultScenario& scenario,
                        SimulationInfo* info = nullptr);

/// Number of steps a back-injection of `reversed_samples` samples runs for:
/// the drive itself plus five longest round trips.
std::size_t injection_steps(const DiscretizedNetwork& dnet, std::size_t reversed_samples);

/// Current through a guessed shunt branch when the time-reversed waveform is
/// driven at the observation node of the healthy, source-free network.
Waveform back_inject(const DiscretizedNetwork& dnet, const Waveform& reversed, const GridPoint& guess,
                     double guess_impedance);
Waveform back_inject(const DiscretizedNetwork& dnet, const Waveform& reversed, const EdgePosition& guess,
                     double guess_impedance, SimulationInfo* info = nullptr);

/// Complex phasors of the healthy steady state at every node, for a source
/// phasor amplitude*exp(j*phase). Exact lossy-line solution.
std::vector<std::complex<double>> steady_state_node_phasors(const NetworkTopology& net, double phase_rad);

}  // namespace emtr
