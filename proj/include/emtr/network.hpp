#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "emtr/graph.hpp"

namespace emtr {

/// Per-unit-length line constants (SI: H/m, F/m, ohm/m).
struct LineParams {
  double inductance_per_m = 0.0;
  double capacitance_per_m = 0.0;
  double resistance_per_m = 0.0;

  friend bool operator==(const LineParams&, const LineParams&) = default;
};

/// sqrt(L/C), the lossless surge impedance.
double characteristic_impedance(const LineParams& p);
/// 1/sqrt(L*C) in m/s.
double propagation_speed(const LineParams& p);

struct Edge {
  std::string id;
  std::size_t a = 0;  // first endpoint; offsets are measured from here
  std::size_t b = 0;
  double length = 0.0;  // m
  std::string params_name;
  LineParams params;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Resistive shunt from a node to ground.
struct Termination {
  std::size_t node = 0;
  double impedance = 0.0;

  friend bool operator==(const Termination&, const Termination&) = default;
};

/// Sinusoidal voltage source behind a series resistance, v(t) = A sin(wt + phase).
struct SourceSpec {
  std::size_t node = 0;
  double amplitude = 0.0;  // peak volts
  double frequency = 50.0;
  double series_impedance = 0.0;

  friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

struct EdgePosition {
  std::size_t edge = 0;
  double offset = 0.0;  // m from the edge's first endpoint

  friend bool operator==(const EdgePosition&, const EdgePosition&) = default;
};

/// Parse or validation failure. line/column are 1-based and zero when the
/// problem is not tied to a location in the text.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class NetworkTopology {
 public:
  std::vector<std::string> node_ids;
  std::vector<Edge> edges;
  std::vector<Termination> terminations;
  SourceSpec source;
  std::size_t observation_node = 0;

  std::size_t node_index(std::string_view id) const;  // throws ConfigError
  std::size_t edge_index(std::string_view id) const;  // throws ConfigError
  std::size_t degree(std::size_t node) const;
  MultiGraph graph() const;

  /// Resistance to ground contributed by terminations at node, or 0 if none.
  double termination_at(std::size_t node) const;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  friend bool operator==(const NetworkTopology&, const NetworkTopology&) = default;
};

NetworkTopology parse_network(std::string_view text);
NetworkTopology load_network(const std::string& path);
std::string serialize_network(const NetworkTopology& net);

double path_length(const NetworkTopology& net, const Path& path);

/// Maps a 1-D coordinate s along path onto the edge it falls on. A junction
/// belongs to the edge that ends there, except s == 0 which belongs to the
/// first edge. The offset is expressed from the edge's first endpoint.
EdgePosition path_to_edge_position(const NetworkTopology& net, const Path& path, double s);

/// Inverse of path_to_edge_position for edges lying on the path.
double edge_position_to_path(const NetworkTopology& net, const Path& path, const EdgePosition& pos);

/// Shortest along-line distance between two points of the network.
double network_distance(const NetworkTopology& net, const EdgePosition& p, const EdgePosition& q);

}  // namespace emtr
