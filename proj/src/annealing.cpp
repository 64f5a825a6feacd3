#include "emtr/annealing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emtr {

void SAParams::validate() const {
  if (!(t0 > 0.0)) throw std::invalid_argument("t0 must be positive");
  if (!(cooling > 0.0 && cooling < 1.0)) throw std::invalid_argument("cooling must lie in (0, 1)");
  if (n_term < 1) throw std::invalid_argument("n_term must be at least 1");
  if (!(accuracy > 0.0)) throw std::invalid_argument("accuracy must be positive");
}

bool metropolis_accept(double e_new, double e_old, double t, std::mt19937_64& rng) {
  if (e_new > e_old) return true;
  const double p = std::exp(-(e_old - e_new) / t);
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

std::size_t grid_size(double length, double accuracy) {
  if (!(accuracy > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (!(length > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(length / accuracy + 1e-9));
}

OptimizationTrace sa_maximize(const Objective& objective, double length, const SAParams& params) {
  params.validate();
  const auto count = grid_size(length, params.accuracy);
  if (count == 0) throw std::invalid_argument("domain shorter than one accuracy step");

  std::mt19937_64 rng(params.seed);
  const auto at = [&](std::size_t k) { return static_cast<double>(k) * params.accuracy; };

  std::size_t current = 0;
  if (params.initial_point) {
    const auto k = std::llround(*params.initial_point / params.accuracy);
    current = static_cast<std::size_t>(std::clamp<long long>(k, 1, static_cast<long long>(count)));
  } else {
    current = std::uniform_int_distribution<std::size_t>(1, count)(rng);
  }

  OptimizationTrace trace;
  double temperature = params.t0;
  double value = objective(at(current));
  trace.entries.push_back({at(current), value, true, temperature});

  const double initial_width = length / 5.0;
  const int shrink_after = (params.n_term + 1) / 2;
  double width = initial_width;
  int rejections = 0;
  while (count > 1 && rejections < params.n_term) {
    if (rejections >= shrink_after) width *= 0.5;
    const double w = std::max(width, params.accuracy);
    std::uniform_real_distribution<double> step(-w, w);
    long long k = 0;
    do {
      k = std::llround((at(current) + step(rng)) / params.accuracy);
    } while (k < 1 || k > static_cast<long long>(count) || static_cast<std::size_t>(k) == current);

    const auto candidate = static_cast<std::size_t>(k);
    const double v = objective(at(candidate));
    const bool accepted = metropolis_accept(v, value, temperature, rng);
    if (accepted) {
      current = candidate;
      value = v;
      temperature *= params.cooling;
      if (params.reset_width) width = initial_width;
      rejections = 0;
    } else {
      ++rejections;
    }
    trace.entries.push_back({at(candidate), v, accepted, temperature});
  }
  trace.final_position = at(current);
  trace.final_value = value;
  return trace;
}

ExhaustiveResult exhaustive_maximize(const Objective& objective, double length, double step) {
  const auto count = grid_size(length, step);
  ExhaustiveResult out;
  out.values.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    const double x = static_cast<double>(k) * step;
    const double v = objective(x);
    out.values.push_back(v);
    if (k == 1 || v > out.value) {
      out.position = x;
      out.value = v;
    }
  }
  out.evaluations = count;
  return out;
}

}  // namespace emtr
