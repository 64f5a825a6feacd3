#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace emtr {

/// Settings of the rejection-terminated annealer. Temperatures carry the
/// objective's units.
struct SAParams {
  double t0 = 1.0;
  double cooling = 0.8;
  int n_term = 10;
  double accuracy = 10.0;  // m, spacing of the search grid
  std::optional<double> initial_point;
  std::uint64_t seed = 0;
  // Restore the full perturbation width on every acceptance. Off, the width
  // only ever shrinks, which is what lets a run settle to one grid step.
  bool reset_width = false;

  void validate() const;  // throws std::invalid_argument
};

struct TraceEntry {
  double position = 0.0;
  double value = 0.0;
  bool accepted = false;
  double temperature = 0.0;  // after this iteration
};

struct OptimizationTrace {
  std::vector<TraceEntry> entries;
  double final_position = 0.0;
  double final_value = 0.0;

  std::size_t evaluations() const { return entries.size(); }
};

using Objective = std::function<double(double position)>;

/// Maximization form of the Metropolis rule: improvements always pass,
/// a loss of d passes with probability exp(-d/t).
bool metropolis_accept(double e_new, double e_old, double t, std::mt19937_64& rng);

/// Number of search grid points accuracy, 2*accuracy, ... not exceeding length.
std::size_t grid_size(double length, double accuracy);

/// Anneals over the grid {k*accuracy : k = 1..grid_size}. Proposals are
/// uniform in [-w, w] around the current point, redrawn until they land on a
/// different grid point inside the domain. w starts at length/5 and, once
/// ceil(n_term/2) consecutive rejections have piled up, halves per iteration
/// (never below one grid step). Every acceptance cools by `cooling`. The run
/// stops after n_term consecutive rejections. Entry 0 is the starting point.
OptimizationTrace sa_maximize(const Objective& objective, double length, const SAParams& params);

struct ExhaustiveResult {
  double position = 0.0;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::vector<double> values;  // at step, 2*step, ...
};

/// Evaluates every grid point; ties go to the smaller position.
ExhaustiveResult exhaustive_maximize(const Objective& objective, double length, double step);

}  // namespace emtr
