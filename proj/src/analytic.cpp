#include "emtr/analytic.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace emtr {

namespace {

using cd = std::complex<double>;

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

cd gamma_of(const SingleLineSetup& s, double omega) { return {0.0, omega / propagation_speed(s.params)}; }

}  // namespace

void SingleLineSetup::validate() const {
  if (!(params.inductance_per_m > 0.0 && params.capacitance_per_m > 0.0)) {
    throw std::invalid_argument("line parameters must be positive");
  }
  if (!(z0 > 0.0)) throw std::invalid_argument("terminal impedance must be positive");
  if (!(fault_position > 0.0 && fault_position < length)) {
    throw std::invalid_argument("fault position must lie strictly inside the line");
  }
}

double reflection_coefficient(double z0, double zc) {
  if (!(z0 > 0.0 && zc > 0.0)) throw std::invalid_argument("impedances must be positive");
  return (z0 - zc) / (z0 + zc);
}

std::optional<cd> observed_voltage_spectrum(const SingleLineSetup& setup, double omega, cd uf) {
  const double rho = reflection_coefficient(setup.z0, characteristic_impedance(setup.params));
  const cd g = gamma_of(setup, omega);
  const cd den = 1.0 + rho * std::exp(-2.0 * g * setup.fault_position);
  if (std::abs(den) < kSingularDenominator) return std::nullopt;
  return (1.0 + rho) * std::exp(-g * setup.fault_position) / den * uf;
}

std::optional<cd> guess_current_spectrum(const SingleLineSetup& setup, double x_guess, double omega, cd uf_conj) {
  const double rho = reflection_coefficient(setup.z0, characteristic_impedance(setup.params));
  const cd g = gamma_of(setup, omega);
  const double xf = setup.fault_position;
  // Each resonance factor is tested on its own, so the threshold does not scale with z0.
  const cd guess_factor = 1.0 + rho * std::exp(-2.0 * g * x_guess);
  const cd fault_factor = 1.0 + rho * std::exp(2.0 * g * xf);
  if (std::abs(guess_factor) < kSingularDenominator || std::abs(fault_factor) < kSingularDenominator) {
    return std::nullopt;
  }
  return (1.0 + rho) * (1.0 + rho) * std::exp(-g * (x_guess - xf)) / (setup.z0 * guess_factor * fault_factor) * uf_conj;
}

std::vector<cd> real_dft(const std::vector<double>& x) {
  if (x.empty()) return {};
  const auto n = x.size();
  std::vector<double> in(x);
  std::vector<cd> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
  return out;
}

std::vector<double> inverse_real_dft(const std::vector<cd>& spectrum, std::size_t n) {
  if (spectrum.size() != n / 2 + 1) throw std::invalid_argument("spectrum length does not match n");
  std::vector<cd> in(spectrum);  // c2r destroys its input
  std::vector<double> out(n);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

double bin_omega(std::size_t k, std::size_t n, double dt) {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / (static_cast<double>(n) * dt);
}

namespace {

// Weight of bin k in Parseval's sum over a one-sided spectrum.
double bin_weight(std::size_t k, std::size_t n) {
  if (k == 0 || (n % 2 == 0 && k == n / 2)) return 1.0;
  return 2.0;
}

}  // namespace

double spectral_energy(const std::vector<cd>& spectrum, std::size_t n, double dt) {
  double sum = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) sum += bin_weight(k, n) * std::norm(spectrum[k]);
  return sum / static_cast<double>(n) * dt * 1e6;
}

EnergyCurve analytic_energy_curve(const SingleLineSetup& setup, const std::vector<cd>& fault_spectrum, std::size_t n,
                                  double dt, const std::vector<double>& x_grid) {
  setup.validate();
  if (fault_spectrum.size() != n / 2 + 1) throw std::invalid_argument("spectrum length does not match n");
  EnergyCurve out;
  out.energy.reserve(x_grid.size());
  for (double x : x_grid) {
    double sum = 0.0;
    for (std::size_t k = 0; k < fault_spectrum.size(); ++k) {
      const auto i = guess_current_spectrum(setup, x, bin_omega(k, n, dt), std::conj(fault_spectrum[k]));
      if (!i) {
        ++out.excluded_bins;
        continue;
      }
      sum += bin_weight(k, n) * std::norm(*i);
    }
    out.energy.push_back(sum / static_cast<double>(n) * dt * 1e6);
  }
  return out;
}

}  // namespace emtr
