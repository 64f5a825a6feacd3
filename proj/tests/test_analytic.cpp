#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "emtr/analytic.hpp"
#include "emtr/simulator.hpp"

using namespace emtr;
using cd = std::complex<double>;

namespace {

const LineParams kOverhead{1.60e-6, 10.54e-12, 0.0};

SingleLineSetup setup(double z0, double xf) { return {kOverhead, 10000.0, z0, xf}; }

// Spectrum of a 1 us Gaussian pulse, n samples at dt.
std::vector<cd> pulse_spectrum(std::size_t n, double dt) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) * dt - 5e-6) / 1e-6;
    x[i] = 1000.0 * std::exp(-0.5 * t * t);
  }
  return real_dft(x);
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Naive O(n^2) transform, independent of FFTW.
std::vector<cd> naive_dft(const std::vector<double>& x) {
  const auto n = x.size();
  std::vector<cd> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      out[k] += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * j % n) / static_cast<double>(n));
    }
  }
  return out;
}

}  // namespace

TEST(Reflection, Examples) {
  const double zc = characteristic_impedance(kOverhead);
  EXPECT_DOUBLE_EQ(reflection_coefficient(zc, zc), 0.0);
  EXPECT_NEAR(reflection_coefficient(100000.0, 389.6), 0.99224, 1e-5);
  EXPECT_DOUBLE_EQ(reflection_coefficient(3.0 * zc, zc), 0.5);
  EXPECT_THROW(reflection_coefficient(0.0, zc), std::invalid_argument);
}

TEST(Reflection, AlwaysInsideOpenInterval) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logz(-3.0, 8.0);
  for (int i = 0; i < 1000; ++i) {
    const double r = reflection_coefficient(std::pow(10.0, logz(rng)), std::pow(10.0, logz(rng)));
    EXPECT_GT(r, -1.0);
    EXPECT_LT(r, 1.0);
  }
}

TEST(TransferFunction, Limits) {
  const auto s = setup(100000.0, 4000.0);
  const cd uf(3.0, -2.0);
  EXPECT_LT(std::abs(*observed_voltage_spectrum(s, 0.0, uf) - uf), 1e-12);
  auto near_zero = s;
  near_zero.fault_position = 1e-9;
  EXPECT_LT(std::abs(*observed_voltage_spectrum(near_zero, 2e5, uf) - uf), 1e-6);
}

TEST(TransferFunction, PolesAtQuarterWaveResonances) {
  const auto s = setup(100000.0, 4000.0);
  const double c = propagation_speed(kOverhead);
  for (int m = 0; m < 3; ++m) {
    const double w_pole = (2 * m + 1) * std::numbers::pi * c / (2.0 * 4000.0);
    const double at_pole = std::abs(*observed_voltage_spectrum(s, w_pole, 1.0));
    // halfway to the next pole the round trip phase is a full turn
    const double between = std::abs(*observed_voltage_spectrum(s, w_pole + std::numbers::pi * c / (2.0 * 4000.0), 1.0));
    EXPECT_NEAR(at_pole, 2.0 / (1.0 - 0.99224), 2.0);  // (1+rho)/(1-rho)
    EXPECT_LT(between, 1.1);
  }
}

TEST(TransferFunction, SingularDenominatorReported) {
  const auto s = setup(1e16, 4000.0);  // rho within 1e-13 of one
  const double w_pole = std::numbers::pi * propagation_speed(kOverhead) / (2.0 * 4000.0);
  EXPECT_FALSE(observed_voltage_spectrum(s, w_pole, 1.0).has_value());
  EXPECT_FALSE(guess_current_spectrum(s, 4000.0, w_pole, 1.0).has_value());
}

TEST(GuessCurrent, VanishesWithOpenSource) {
  // away from a resonance the current falls off as 1/z0
  std::vector<double> scaled;
  for (double z0 : {1e5, 1e6, 1e7, 1e8}) {
    scaled.push_back(std::abs(*guess_current_spectrum(setup(z0, 4000.0), 3000.0, 1.234e5, 1.0)) * z0);
  }
  EXPECT_NEAR(scaled[3], scaled[2], 1e-3 * scaled[2]);
  EXPECT_NEAR(scaled[2], scaled[1], 1e-2 * scaled[2]);
}

TEST(Dft, MatchesNaiveAndInverts) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (std::size_t n : {1u, 2u, 7u, 64u, 101u}) {
    std::vector<double> x(n);
    for (double& v : x) v = g(rng);
    const auto fast = real_dft(x);
    const auto slow = naive_dft(x);
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t k = 0; k < fast.size(); ++k) EXPECT_LT(std::abs(fast[k] - slow[k]), 1e-9 * (1.0 + std::abs(slow[k])));
    const auto back = inverse_real_dft(fast, n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i], x[i], 1e-12);
  }
}

TEST(Dft, ParsevalEvenAndOdd) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (std::size_t n : {512u, 513u}) {
    Waveform w{std::vector<double>(n), 18.5e-9, 0.0};
    for (double& v : w.samples) v = g(rng);
    const double t = signal_energy(w);
    EXPECT_NEAR(spectral_energy(real_dft(w.samples), n, w.dt), t, 1e-12 * t);
  }
}

TEST(Dft, TimeReversalConjugates) {
  // y[j] = x[n-1-j]  =>  Y_k = exp(2 pi i k / n) * conj(X_k)
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (std::size_t n : {64u, 99u}) {
    Waveform w{std::vector<double>(n), 1e-6, 0.0};
    for (double& v : w.samples) v = g(rng);
    const auto x = real_dft(w.samples);
    const auto y = real_dft(time_reverse(w).samples);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const cd expect = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)) *
                        std::conj(x[k]);
      EXPECT_LT(std::abs(y[k] - expect), 1e-9 * std::abs(expect) + 1e-12);
    }
  }
}

TEST(EnergyCurve, ZeroAndQuadraticScaling) {
  const auto s = setup(3.0 * characteristic_impedance(kOverhead), 4000.0);
  const std::size_t n = 4096;
  const double dt = 0.1e-6;
  const auto spec = pulse_spectrum(n, dt);
  const std::vector<double> xs{1000, 4000, 7000};
  const auto base = analytic_energy_curve(s, spec, n, dt, xs);
  const auto zero = analytic_energy_curve(s, std::vector<cd>(spec.size()), n, dt, xs);
  auto scaled_spec = spec;
  for (auto& v : scaled_spec) v *= cd(0.0, -3.0);
  const auto scaled = analytic_energy_curve(s, scaled_spec, n, dt, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(zero.energy[i], 0.0);
    EXPECT_NEAR(scaled.energy[i], 9.0 * base.energy[i], 1e-9 * scaled.energy[i]);
  }
}

TEST(EnergyCurve, ParsevalAgainstTimeDomainCurrent) {
  const auto s = setup(100000.0, 4000.0);
  const std::size_t n = 1 << 16;
  const double dt = 0.1e-6;
  const auto spec = pulse_spectrum(n, dt);
  for (double x : {2000.0, 4000.0}) {
    std::vector<cd> current(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) {
      current[k] = *guess_current_spectrum(s, x, bin_omega(k, n, dt), std::conj(spec[k]));
    }
    const Waveform i{inverse_real_dft(current, n), dt, 0.0};
    const double curve = analytic_energy_curve(s, spec, n, dt, {x}).energy[0];
    EXPECT_NEAR(signal_energy(i), curve, 0.005 * curve);
  }
}

TEST(EnergyCurve, ArgmaxAtFaultForEveryPosition) {
  const auto s0 = setup(3.0 * characteristic_impedance(kOverhead), 0.0);
  const std::size_t n = 1 << 15;
  const double dt = 0.1e-6;
  const auto spec = pulse_spectrum(n, dt);
  std::vector<double> xs;
  for (double x = 50.0; x < 10000.0; x += 50.0) xs.push_back(x);
  for (int tenth = 1; tenth <= 9; ++tenth) {
    auto s = s0;
    s.fault_position = 1000.0 * tenth;
    const auto curve = analytic_energy_curve(s, spec, n, dt, xs);
    EXPECT_NEAR(xs[argmax(curve.energy)], s.fault_position, 50.0 + 1e-9) << "x_f=" << s.fault_position;
  }
}

TEST(EnergyCurve, ArgmaxHighReflection) {
  // 100 kOhm ends make the resonances narrow; the record must resolve them.
  const auto s = setup(100000.0, 4000.0);
  const std::size_t n = 1 << 20;
  const double dt = 0.1e-6;
  const auto spec = pulse_spectrum(n, dt);
  std::vector<double> xs;
  for (double x = 100.0; x < 10000.0; x += 100.0) xs.push_back(x);
  const auto curve = analytic_energy_curve(s, spec, n, dt, xs);
  EXPECT_EQ(curve.excluded_bins, 0u);
  EXPECT_NEAR(xs[argmax(curve.energy)], 4000.0, 100.0 + 1e-9);
}

TEST(SingleLineSetup, Validation) {
  EXPECT_THROW(setup(0.0, 4000.0).validate(), std::invalid_argument);
  EXPECT_THROW(setup(100.0, 0.0).validate(), std::invalid_argument);
  EXPECT_THROW(setup(100.0, 10000.0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(setup(100.0, 4000.0).validate());
}
