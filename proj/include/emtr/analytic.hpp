#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "emtr/network.hpp"

namespace emtr {

/// Closed-form frequency-domain model of one uniform lossless line: the
/// observation end is terminated by z0, the fault sits at fault_position
/// metres from it.
struct SingleLineSetup {
  LineParams params;  // resistance is ignored
  double length = 0.0;
  double z0 = 0.0;
  double fault_position = 0.0;

  void validate() const;  // throws std::invalid_argument
};

/// Resonance factor magnitudes below this mark a singular bin.
inline constexpr double kSingularDenominator = 1e-12;

double reflection_coefficient(double z0, double zc);

/// Voltage at the observation end produced by a fault-point source Uf at
/// angular frequency omega; nullopt at a singular bin.
std::optional<std::complex<double>> observed_voltage_spectrum(const SingleLineSetup& setup, double omega,
                                                              std::complex<double> uf);

/// Guessed-branch current at x_guess for the back-injected, conjugated
/// fault spectrum; nullopt at a singular bin.
std::optional<std::complex<double>> guess_current_spectrum(const SingleLineSetup& setup, double x_guess,
                                                           double omega, std::complex<double> uf_conj);

/// One-sided spectrum of a real signal (bins 0..n/2, unnormalized).
std::vector<std::complex<double>> real_dft(const std::vector<double>& x);
/// Inverse of real_dft for a signal of n samples.
std::vector<double> inverse_real_dft(const std::vector<std::complex<double>>& spectrum, std::size_t n);

/// Angular frequency of bin k for an n-sample record with step dt.
double bin_omega(std::size_t k, std::size_t n, double dt);

/// Sum of x^2 * dt in A^2*us computed from a one-sided spectrum of an
/// n-sample signal (Parseval).
double spectral_energy(const std::vector<std::complex<double>>& spectrum, std::size_t n, double dt);

struct EnergyCurve {
  std::vector<double> energy;      // A^2*us per guessed position
  std::size_t excluded_bins = 0;   // singular bins skipped, summed over positions
};

/// Energy of the guessed-branch current for each x in x_grid, summing
/// |guess_current_spectrum|^2 over the one-sided fault spectrum of an
/// n-sample record with step dt.
EnergyCurve analytic_energy_curve(const SingleLineSetup& setup, const std::vector<std::complex<double>>& fault_spectrum,
                                  std::size_t n, double dt, const std::vector<double>& x_grid);

}  // namespace emtr
