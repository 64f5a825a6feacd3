#include "emtr/simulator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace emtr {

Waveform time_reverse(const Waveform& w) {
  Waveform out = w;
  std::reverse(out.samples.begin(), out.samples.end());
  return out;
}

double signal_energy(const Waveform& w) {
  double sum = 0.0;
  for (double s : w.samples) sum += s * s;
  return sum * w.dt * 1e6;
}

Waveform resample(const Waveform& w, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("resample: dt must be positive");
  if (w.samples.empty()) throw std::invalid_argument("resample: empty waveform");
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(w.duration() / dt)));
  Waveform out{std::vector<double>(n), dt, w.start_time};
  const auto last = w.samples.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = static_cast<double>(i) * dt / w.dt;
    const auto k = static_cast<std::size_t>(pos);
    if (k >= last) {
      out.samples[i] = w.samples[last];
    } else {
      const double f = pos - static_cast<double>(k);
      out.samples[i] = (1.0 - f) * w.samples[k] + f * w.samples[k + 1];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Discretization

DiscretizedNetwork::DiscretizedNetwork(NetworkTopology net, double target_dx) : net_(std::move(net)) {
  net_.validate();
  double shortest = std::numeric_limits<double>::infinity();
  for (const auto& e : net_.edges) shortest = std::min(shortest, e.length);
  if (!(target_dx > 0.0)) throw std::invalid_argument("target_dx must be positive");
  if (target_dx > shortest * (1.0 + 1e-12)) {
    throw std::invalid_argument("target_dx " + std::to_string(target_dx) + " m exceeds the shortest edge (" +
                                std::to_string(shortest) + " m)");
  }
  double dt = std::numeric_limits<double>::infinity();
  for (const auto& e : net_.edges) {
    EdgeGrid g;
    g.cells = static_cast<std::size_t>(std::ceil(e.length / target_dx - 1e-9));
    g.cells = std::max<std::size_t>(g.cells, 1);
    g.dx = e.length / static_cast<double>(g.cells);
    g.speed = propagation_speed(e.params);
    dt = std::min(dt, g.dx / g.speed);
    grids_.push_back(g);
  }
  dt_ = 0.9 * dt;

  // All-pairs quickest travel times (Floyd-Warshall; networks are small).
  const auto n = net_.node_ids.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> t(n, std::vector<double>(n, inf));
  for (std::size_t v = 0; v < n; ++v) t[v][v] = 0.0;
  for (std::size_t e = 0; e < net_.edges.size(); ++e) {
    const auto& edge = net_.edges[e];
    const double tt = edge.length / grids_[e].speed;
    t[edge.a][edge.b] = std::min(t[edge.a][edge.b], tt);
    t[edge.b][edge.a] = t[edge.a][edge.b];
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) t[i][j] = std::min(t[i][j], t[i][k] + t[k][j]);
  for (const auto& row : t)
    for (double v : row) longest_travel_ = std::max(longest_travel_, v);
}

std::size_t DiscretizedNetwork::total_cells() const {
  std::size_t total = 0;
  for (const auto& g : grids_) total += g.cells;
  return total;
}

GridPoint DiscretizedNetwork::snap(const EdgePosition& pos, double* snap_distance) const {
  if (pos.edge >= grids_.size()) throw std::out_of_range("unknown edge index");
  const auto& g = grids_[pos.edge];
  const double length = net_.edges[pos.edge].length;
  if (pos.offset < -1e-9 || pos.offset > length + 1e-9) {
    throw std::out_of_range("offset " + std::to_string(pos.offset) + " outside edge '" + net_.edges[pos.edge].id +
                            "'");
  }
  const double cell = std::clamp(pos.offset, 0.0, length) / g.dx;
  const auto index = std::min<std::size_t>(g.cells, static_cast<std::size_t>(std::llround(cell)));
  if (snap_distance != nullptr) *snap_distance = std::abs(static_cast<double>(index) * g.dx - pos.offset);
  return {pos.edge, index};
}

EdgePosition DiscretizedNetwork::position(const GridPoint& p) const {
  return {p.edge, static_cast<double>(p.index) * grids_.at(p.edge).dx};
}

std::optional<std::size_t> DiscretizedNetwork::node_at(const GridPoint& p) const {
  if (p.index == 0) return net_.edges.at(p.edge).a;
  if (p.index == grids_.at(p.edge).cells) return net_.edges.at(p.edge).b;
  return std::nullopt;
}

GridPoint DiscretizedNetwork::canonical(const GridPoint& p) const {
  const auto node = node_at(p);
  if (!node) return p;
  for (std::size_t e = 0; e < net_.edges.size(); ++e) {
    if (net_.edges[e].a == *node) return {e, 0};
    if (net_.edges[e].b == *node) return {e, grids_[e].cells};
  }
  return p;
}

DiscretizedNetwork discretize(const NetworkTopology& net, double target_dx) {
  return DiscretizedNetwork(net, target_dx);
}

// ---------------------------------------------------------------------------
// Steady state

std::vector<std::complex<double>> steady_state_node_phasors(const NetworkTopology& net, double phase_rad) {
  using cd = std::complex<double>;
  const auto n = net.node_ids.size();
  const double omega = 2.0 * std::numbers::pi * net.source.frequency;
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXcd inj = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& e : net.edges) {
    const cd z(e.params.resistance_per_m, omega * e.params.inductance_per_m);
    const cd yy(0.0, omega * e.params.capacitance_per_m);
    const cd gamma = std::sqrt(z * yy);
    const cd zc = std::sqrt(z / yy);
    const cd self = 1.0 / (zc * std::tanh(gamma * e.length));
    const cd mutual = -1.0 / (zc * std::sinh(gamma * e.length));
    const auto a = static_cast<Eigen::Index>(e.a);
    const auto b = static_cast<Eigen::Index>(e.b);
    y(a, a) += self;
    y(b, b) += self;
    y(a, b) += mutual;
    y(b, a) += mutual;
  }
  for (const auto& t : net.terminations) {
    y(static_cast<Eigen::Index>(t.node), static_cast<Eigen::Index>(t.node)) += 1.0 / t.impedance;
  }
  const auto s = static_cast<Eigen::Index>(net.source.node);
  y(s, s) += 1.0 / net.source.series_impedance;
  inj(s) = std::polar(net.source.amplitude, phase_rad) / net.source.series_impedance;
  const Eigen::VectorXcd v = y.partialPivLu().solve(inj);
  return {v.data(), v.data() + v.size()};
}

// ---------------------------------------------------------------------------
// Solver

TransientSolver::TransientSolver(const DiscretizedNetwork& dnet) : dnet_(dnet) {
  const auto& net = dnet.topology();
  const auto& grids = dnet.grids();
  const double dt = dnet.dt();
  std::size_t v_total = 0;
  std::size_t i_total = 0;
  for (std::size_t e = 0; e < grids.size(); ++e) {
    v_offset_.push_back(v_total);
    i_offset_.push_back(i_total);
    v_total += grids[e].cells + 1;
    i_total += grids[e].cells;
    const auto& p = net.edges[e].params;
    const double l = p.inductance_per_m / dt;
    const double r = 0.5 * p.resistance_per_m;
    coef_i_decay_.push_back((l - r) / (l + r));
    coef_i_drive_.push_back(1.0 / (grids[e].dx * (l + r)));
    coef_v_.push_back(dt / (p.capacitance_per_m * grids[e].dx));
  }
  v_.assign(v_total, 0.0);
  i_.assign(i_total, 0.0);
  node_v_.assign(net.node_ids.size(), 0.0);
  node_c_.assign(net.node_ids.size(), 0.0);
  node_lump_.assign(net.node_ids.size(), -1);
  node_currents_.resize(net.node_ids.size());
  node_slots_.resize(net.node_ids.size());
  for (std::size_t e = 0; e < grids.size(); ++e) {
    const auto& edge = net.edges[e];
    const double half = 0.5 * edge.params.capacitance_per_m * grids[e].dx;
    node_c_[edge.a] += half;
    node_c_[edge.b] += half;
    node_currents_[edge.a].emplace_back(i_offset_[e], -1.0);
    node_currents_[edge.b].emplace_back(i_offset_[e] + grids[e].cells - 1, 1.0);
    node_slots_[edge.a].push_back(v_offset_[e]);
    node_slots_[edge.b].push_back(v_offset_[e] + grids[e].cells);
  }
  for (std::size_t n = 0; n < net.node_ids.size(); ++n) {
    Lump lump;
    lump.node = n;
    lump.capacitance = node_c_[n];
    node_lump_[n] = static_cast<int>(lumps_.size());
    lumps_.push_back(std::move(lump));
  }
  lump_v_old_.assign(lumps_.size(), 0.0);
}

std::size_t TransientSolver::voltage_slot(const GridPoint& p) const {
  if (p.edge >= v_offset_.size() || p.index > dnet_.grids()[p.edge].cells) {
    throw std::out_of_range("grid point outside the network");
  }
  return v_offset_[p.edge] + p.index;
}

std::size_t TransientSolver::lump_for(const GridPoint& p) {
  voltage_slot(p);  // range check
  if (const auto node = dnet_.node_at(p)) return static_cast<std::size_t>(node_lump_[*node]);
  for (std::size_t l = 0; l < lumps_.size(); ++l) {
    if (!lumps_[l].node && lumps_[l].edge == p.edge && lumps_[l].index == p.index) return l;
  }
  Lump lump;
  lump.edge = p.edge;
  lump.index = p.index;
  lump.voltage_slot = voltage_slot(p);
  lump.capacitance = dnet_.topology().edges[p.edge].params.capacitance_per_m * dnet_.grids()[p.edge].dx;
  lumps_.push_back(std::move(lump));
  lump_v_old_.push_back(0.0);
  return lumps_.size() - 1;
}

std::size_t TransientSolver::add_shunt(const GridPoint& p, double resistance) {
  if (!(resistance >= 0.0)) throw std::invalid_argument("shunt resistance must be >= 0");
  Element el;
  el.at = p;
  el.short_circuit = resistance == 0.0;
  el.conductance = el.short_circuit ? 0.0 : 1.0 / resistance;
  const auto lump = lump_for(p);
  elements_.push_back(std::move(el));
  lumps_[lump].elements.push_back(elements_.size() - 1);
  if (elements_.back().short_circuit) {
    v_[voltage_slot(p)] = 0.0;
    if (const auto node = dnet_.node_at(p)) {
      node_v_[*node] = 0.0;
      for (auto slot : node_slots_[*node]) v_[slot] = 0.0;
    }
  }
  return elements_.size() - 1;
}

std::size_t TransientSolver::add_source(const GridPoint& p, double series_resistance, Drive emf) {
  if (!(series_resistance > 0.0)) throw std::invalid_argument("source series resistance must be > 0");
  Element el;
  el.at = p;
  el.conductance = 1.0 / series_resistance;
  el.emf = std::move(emf);
  const auto lump = lump_for(p);
  elements_.push_back(std::move(el));
  lumps_[lump].elements.push_back(elements_.size() - 1);
  return elements_.size() - 1;
}

void TransientSolver::initialize_steady_state(double phase_rad) {
  using cd = std::complex<double>;
  const auto& net = dnet_.topology();
  const auto& grids = dnet_.grids();
  const auto nodes = steady_state_node_phasors(net, phase_rad);
  const double omega = 2.0 * std::numbers::pi * net.source.frequency;
  // Currents are stored half a step behind the voltages.
  const cd shift = std::polar(1.0, -0.5 * omega * dnet_.dt());
  for (std::size_t e = 0; e < grids.size(); ++e) {
    const auto& edge = net.edges[e];
    const cd z(edge.params.resistance_per_m, omega * edge.params.inductance_per_m);
    const cd yy(0.0, omega * edge.params.capacitance_per_m);
    const cd gamma = std::sqrt(z * yy);
    const cd zc = std::sqrt(z / yy);
    const cd va = nodes[edge.a];
    const cd vb = nodes[edge.b];
    const cd ia = (va * std::cosh(gamma * edge.length) - vb) / (zc * std::sinh(gamma * edge.length));
    const auto& g = grids[e];
    for (std::size_t j = 0; j <= g.cells; ++j) {
      const double x = static_cast<double>(j) * g.dx;
      v_[v_offset_[e] + j] = (va * std::cosh(gamma * x) - zc * ia * std::sinh(gamma * x)).imag();
    }
    for (std::size_t j = 0; j < g.cells; ++j) {
      const double x = (static_cast<double>(j) + 0.5) * g.dx;
      i_[i_offset_[e] + j] = ((ia * std::cosh(gamma * x) - va / zc * std::sinh(gamma * x)) * shift).imag();
    }
    v_[v_offset_[e]] = va.imag();
    v_[v_offset_[e] + g.cells] = vb.imag();
  }
  for (std::size_t n = 0; n < nodes.size(); ++n) node_v_[n] = nodes[n].imag();
  for (const auto& el : elements_) {
    if (el.short_circuit) {
      const auto id = static_cast<std::size_t>(&el - elements_.data());
      const auto p = el.at;
      elements_[id].current = 0.0;
      v_[voltage_slot(p)] = 0.0;
      if (const auto node = dnet_.node_at(p)) {
        node_v_[*node] = 0.0;
        for (auto slot : node_slots_[*node]) v_[slot] = 0.0;
      }
    }
  }
}

double TransientSolver::voltage(const GridPoint& p) const {
  if (const auto node = dnet_.node_at(p)) return node_v_[*node];
  return v_[voltage_slot(p)];
}

double TransientSolver::element_current(std::size_t id) const { return elements_.at(id).current; }

void TransientSolver::update_lump(Lump& lump, double v_old) {
  const double dt = dnet_.dt();

  double inflow = 0.0;
  if (lump.node) {
    for (const auto& [slot, sign] : node_currents_[*lump.node]) inflow += sign * i_[slot];
  } else {
    const auto base = i_offset_[lump.edge];
    inflow = i_[base + lump.index - 1] - i_[base + lump.index];
  }

  double g = 0.0;
  double j = 0.0;
  bool shorted = false;
  for (auto id : lump.elements) {
    auto& el = elements_[id];
    if (el.short_circuit) {
      shorted = true;
      continue;
    }
    g += el.conductance;
    if (el.emf) j += el.conductance * el.emf(step_);
  }
  const double c = lump.capacitance / dt;
  const double v_new = shorted ? 0.0 : ((c - 0.5 * g) * v_old + inflow + j) / (c + 0.5 * g);
  const double v_avg = 0.5 * (v_old + v_new);
  double short_current = inflow + j - g * v_avg - c * (v_new - v_old);
  for (auto id : lump.elements) {
    auto& el = elements_[id];
    if (el.short_circuit) {
      el.current = short_current;
      short_current = 0.0;  // several ideal shorts on one point: first carries it all
    } else if (el.emf) {
      el.current = el.conductance * (v_avg - el.emf(step_));
    } else {
      el.current = el.conductance * v_avg;
    }
  }

  if (lump.node) {
    node_v_[*lump.node] = v_new;
    for (auto slot : node_slots_[*lump.node]) v_[slot] = v_new;
  } else {
    v_[lump.voltage_slot] = v_new;
  }
}

void TransientSolver::step() {
  const auto& grids = dnet_.grids();
  const std::size_t edge_count = grids.size();

  for (std::size_t e = 0; e < edge_count; ++e) {
    double* __restrict cur = i_.data() + i_offset_[e];
    const double* __restrict volt = v_.data() + v_offset_[e];
    const double decay = coef_i_decay_[e];
    const double drive = coef_i_drive_[e];
    const std::size_t cells = grids[e].cells;
    for (std::size_t k = 0; k < cells; ++k) cur[k] = decay * cur[k] - drive * (volt[k + 1] - volt[k]);
  }

  for (std::size_t l = 0; l < lumps_.size(); ++l) {
    const auto& lump = lumps_[l];
    lump_v_old_[l] = lump.node ? node_v_[*lump.node] : v_[lump.voltage_slot];
  }

  for (std::size_t e = 0; e < edge_count; ++e) {
    double* __restrict volt = v_.data() + v_offset_[e];
    const double* __restrict cur = i_.data() + i_offset_[e];
    const double cv = coef_v_[e];
    const std::size_t cells = grids[e].cells;
    for (std::size_t k = 1; k < cells; ++k) volt[k] -= cv * (cur[k] - cur[k - 1]);
  }

  for (std::size_t l = 0; l < lumps_.size(); ++l) update_lump(lumps_[l], lump_v_old_[l]);
  ++step_;
}

// ---------------------------------------------------------------------------
// Fault simulation and back-injection

namespace {

GridPoint node_point(const DiscretizedNetwork& dnet, std::size_t node) {
  const auto& edges = dnet.topology().edges;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].a == node) return {e, 0};
    if (edges[e].b == node) return {e, dnet.grids()[e].cells};
  }
  throw std::invalid_argument("node has no incident edge");
}

void attach_healthy_network(TransientSolver& solver, const DiscretizedNetwork& dnet, double phase_rad) {
  const auto& net = dnet.topology();
  for (const auto& t : net.terminations) solver.add_shunt(node_point(dnet, t.node), t.impedance);
  const double omega = 2.0 * std::numbers::pi * net.source.frequency;
  const double dt = dnet.dt();
  const double amplitude = net.source.amplitude;
  solver.add_source(node_point(dnet, net.source.node), net.source.series_impedance,
                    [=](std::size_t n) { return amplitude * std::sin(omega * (static_cast<double>(n) + 0.5) * dt + phase_rad); });
}

}  // namespace

double default_record_window(const DiscretizedNetwork& dnet) { return 20.0 * dnet.longest_travel_time(); }

Waveform simulate_fault(const DiscretizedNetwork& dnet, const FaultScenario& scenario, SimulationInfo* info) {
  if (!(scenario.impedance >= 0.0)) throw std::invalid_argument("fault impedance must be >= 0");
  if (!(scenario.inception_angle >= 0.0 && scenario.inception_angle < 360.0)) {
    throw std::invalid_argument("inception angle must lie in [0, 360)");
  }
  const double window = scenario.record_window > 0.0 ? scenario.record_window : default_record_window(dnet);
  if (window < dnet.longest_travel_time()) {
    throw std::invalid_argument("record window shorter than the one-way travel time across the network");
  }
  double snap = 0.0;
  const auto at = dnet.snap(scenario.position, &snap);
  SimulationInfo local;
  SimulationInfo& out_info = info != nullptr ? *info : local;
  out_info.snap_distance = snap;
  out_info.grid_point = at;
  if (snap > 1e-9 * dnet.grids()[at.edge].dx) {
    out_info.warnings.push_back("fault position snapped by " + std::to_string(snap) + " m");
  }

  // The angle is the phase of the source terminal voltage; the emf leads it
  // by whatever the series resistance and the network load shift.
  const auto& net = dnet.topology();
  const double terminal_shift = std::arg(steady_state_node_phasors(net, 0.0)[net.source.node]);
  const double phase = scenario.inception_angle * std::numbers::pi / 180.0 - terminal_shift;
  TransientSolver healthy(dnet);
  TransientSolver faulted(dnet);
  attach_healthy_network(healthy, dnet, phase);
  attach_healthy_network(faulted, dnet, phase);
  healthy.initialize_steady_state(phase);
  faulted.initialize_steady_state(phase);
  if (scenario.impedance < kOpenCircuitImpedance) faulted.add_shunt(at, scenario.impedance);

  const auto obs = node_point(dnet, dnet.topology().observation_node);
  const auto n = static_cast<std::size_t>(std::ceil(window / dnet.dt()));
  Waveform out{std::vector<double>(n), dnet.dt(), 0.0};
  out_info.healthy_fault_point_voltage = Waveform{std::vector<double>(n), dnet.dt(), 0.0};
  for (std::size_t k = 0; k < n; ++k) {
    out.samples[k] = faulted.voltage(obs) - healthy.voltage(obs);
    out_info.healthy_fault_point_voltage.samples[k] = healthy.voltage(at);
    healthy.step();
    faulted.step();
  }
  return out;
}

std::size_t injection_steps(const DiscretizedNetwork& dnet, std::size_t reversed_samples) {
  const double tail = 5.0 * 2.0 * dnet.longest_travel_time();
  return reversed_samples + static_cast<std::size_t>(std::ceil(tail / dnet.dt()));
}

Waveform back_inject(const DiscretizedNetwork& dnet, const Waveform& reversed, const GridPoint& guess,
                     double guess_impedance) {
  if (reversed.samples.empty()) throw std::invalid_argument("back_inject: empty waveform");
  if (!(guess_impedance > 0.0)) throw std::invalid_argument("guess impedance must be > 0");
  const double dt = dnet.dt();
  auto drive = std::make_shared<std::vector<double>>(
      std::abs(reversed.dt - dt) > 1e-9 * dt ? resample(reversed, dt).samples : reversed.samples);

  const auto& net = dnet.topology();
  const auto obs_node = net.observation_node;
  TransientSolver solver(dnet);
  double obs_conductance = 0.0;
  for (const auto& t : net.terminations) {
    if (t.node == obs_node) {
      obs_conductance += 1.0 / t.impedance;
    } else {
      solver.add_shunt(node_point(dnet, t.node), t.impedance);
    }
  }
  // Source switched off: only its internal resistance remains.
  if (net.source.node == obs_node) {
    obs_conductance += 1.0 / net.source.series_impedance;
  } else {
    solver.add_shunt(node_point(dnet, net.source.node), net.source.series_impedance);
  }
  if (obs_conductance == 0.0) {
    throw std::invalid_argument("observation node has no termination or source to inject through");
  }
  solver.add_source(node_point(dnet, obs_node), 1.0 / obs_conductance, [drive](std::size_t n) {
    const auto& v = *drive;
    const double a = n < v.size() ? v[n] : 0.0;
    const double b = n + 1 < v.size() ? v[n + 1] : 0.0;
    return 0.5 * (a + b);
  });
  const auto branch = solver.add_shunt(guess, guess_impedance);

  const auto steps = injection_steps(dnet, drive->size());
  Waveform out{std::vector<double>(steps), dt, 0.0};
  for (std::size_t k = 0; k < steps; ++k) {
    solver.step();
    out.samples[k] = solver.element_current(branch);
  }
  return out;
}

Waveform back_inject(const DiscretizedNetwork& dnet, const Waveform& reversed, const EdgePosition& guess,
                     double guess_impedance, SimulationInfo* info) {
  double snap = 0.0;
  const auto at = dnet.snap(guess, &snap);
  if (info != nullptr) {
    info->snap_distance = snap;
    info->grid_point = at;
    if (snap > 1e-9 * dnet.grids()[at.edge].dx) {
      info->warnings.push_back("guess position snapped by " + std::to_string(snap) + " m");
    }
  }
  return back_inject(dnet, reversed, at, guess_impedance);
}

}  // namespace emtr
