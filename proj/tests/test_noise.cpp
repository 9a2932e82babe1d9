// Copyright 2026 The spinreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spinreg/errors.hpp"
#include "spinreg/noise.hpp"

using namespace spinreg;

namespace {

constexpr double kMHz = kTwoPi * 1e6;
constexpr double kKHz = kTwoPi * 1e3;

BathSpec random_bath(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BathSpec b;
  b.omega_L = (0.2 + 2 * u(rng)) * kMHz;
  for (std::size_t j = 0; j < n; ++j) b.spins.push_back({(0.1 + 3 * u(rng)) * kMHz, kPi * u(rng)});
  return b;
}

// Tr(U1 U0 U1^dag U0^dag) / 2^n from dense propagators of the two electron
// manifolds: ms=0 precession about z at omega_L, ms=1 about the tilted axis.
cplx dense_echo_trace(const BathSpec& b, double t, double phi) {
  const std::size_t n = b.spins.size();
  const std::size_t d = std::size_t{1} << n;
  ComplexMatrix h0(d), h1(d);
  const ComplexMatrix ix = oracle::mat2(0, 0.5, 0.5, 0), iy = oracle::mat2(0, cplx(0, -0.5), cplx(0, 0.5), 0),
                      iz = oracle::mat2(0.5, 0, 0, -0.5);
  auto embed = [&](const ComplexMatrix& op, std::size_t j) {
    ComplexMatrix m = oracle::mat2(1, 0, 0, 1);
    if (j == 0) m = op;
    for (std::size_t k = 1; k < n; ++k) m = oracle::naive_kron(m, k == j ? op : oracle::mat2(1, 0, 0, 1));
    return m;
  };
  for (std::size_t j = 0; j < n; ++j) {
    const auto& s = b.spins[j];
    const ComplexMatrix a = embed(iz, j), x = embed(ix, j), y = embed(iy, j);
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = 0; q < d; ++q) {
        h0(p, q) += b.omega_L * a(p, q);
        h1(p, q) += s.omega1 * (std::sin(s.theta1) * (std::cos(phi) * x(p, q) + std::sin(phi) * y(p, q)) +
                                std::cos(s.theta1) * a(p, q));
      }
  }
  const ComplexMatrix u0 = oracle::expm_taylor(h0, t), u1 = oracle::expm_taylor(h1, t);
  const ComplexMatrix m = oracle::naive_mul(oracle::naive_mul(u1, u0),
                                            oracle::naive_mul(oracle::naive_adjoint(u1), oracle::naive_adjoint(u0)));
  return oracle::naive_trace(m) / static_cast<double>(d);
}

// Exact Gaussian echo attenuation for OU noise with the pi pulse at tau:
// <phi^2>/2 = G0 tau_c^2 (x - 3 + 4 e^{-x/2} - e^{-x}), x = 2 tau / tau_c.
double exact_ou_echo(double G0, double tau_c, double tau) {
  const double x = 2 * tau / tau_c;
  return std::exp(-G0 * tau_c * tau_c * (x - 3 + 4 * std::exp(-x / 2) - std::exp(-x)));
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("echo envelope matches the unitary trace") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n = 1; n <= 4; ++n)
    for (int rep = 0; rep < 10; ++rep) {
      const BathSpec b = random_bath(rng, n);
      const double t = 5e-6 * u(rng);
      const double f = echo_envelope(b, t);
      const cplx tr = dense_echo_trace(b, t, kTwoPi * u(rng));
      CHECK(std::abs(std::abs(f) - std::abs(tr)) <= 1e-9);
      // The trace is real; the product keeps its sign.
      CHECK(std::abs(f - tr.real()) <= 1e-9);
      CHECK(std::abs(tr.imag()) <= 1e-9);
    }
  // One spin at sin^2 theta = 1 and quarter periods drives the product to -1.
  BathSpec b;
  b.omega_L = 1 * kMHz;
  b.spins = {{3 * kMHz, kPi / 2}};
  CHECK(echo_envelope(b, 0.5e-6) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("echo envelope revivals and trivial baths") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    const BathSpec b = random_bath(rng, 1 + rep % 4);
    for (int k = 1; k <= 10; ++k) CHECK(std::abs(echo_envelope(b, kTwoPi * k / b.omega_L) - 1.0) <= 1e-12);
    for (int k = 0; k < 50; ++k) {
      const double f = echo_envelope(b, 1e-7 * k);
      CHECK(f <= 1.0);
      CHECK(f >= -1.0);
    }
  }
  BathSpec aligned;
  aligned.omega_L = 1 * kMHz;
  aligned.spins = {{2 * kMHz, 0.0}, {0.7 * kMHz, 0.0}};
  CHECK(echo_envelope(aligned, 1.234e-6) == 1.0);
  BathSpec none;
  none.omega_L = 1 * kMHz;
  CHECK(echo_envelope(none, 3e-6) == 1.0);
  CHECK_THROWS_AS(echo_envelope(none, -1.0), ValidationError);
  aligned.spins[0].omega1 = 0;
  CHECK_THROWS_AS(echo_envelope(aligned, 1e-6), ValidationError);
}

TEST_CASE("ou sampler statistics") {
  NoiseModel m;
  m.G0 = 4.0e6;
  m.tau_c = 1e-3;
  {
    NoiseModel z;
    Rng rng = make_stream(1, 0);
    const OuPath p = sample_ou_trajectory(z, 1e-6, 100, rng);
    CHECK(p.values.size() == 100);
    CHECK(std::all_of(p.values.begin(), p.values.end(), [](double v) { return v == 0.0; }));
  }
  // Independent two-point paths at lag tau_c.
  const std::size_t n = 100000;
  double s00 = 0, s01 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    Rng rng = make_stream(7, k);
    const OuPath p = sample_ou_trajectory(m, m.tau_c, 2, rng);
    s00 += p.values[0] * p.values[0];
    s01 += p.values[0] * p.values[1];
  }
  const double var = s00 / n, cov = s01 / n;
  const double rho = std::exp(-1.0);
  CHECK(std::abs(var - m.G0) <= 3 * m.G0 * std::sqrt(2.0 / n));
  CHECK(std::abs(cov - m.G0 * rho) <= 3 * m.G0 * std::sqrt((1 + rho * rho) / n));

  // Stationarity: x_0 and x_50 from disjoint path sets, KS at the 1% level.
  std::vector<double> a, b;
  for (std::size_t k = 0; k < 10000; ++k) {
    Rng r1 = make_stream(9, k);
    a.push_back(sample_ou_trajectory(m, 2e-5, 51, r1).values[0]);
    Rng r2 = make_stream(9, 10000 + k);
    b.push_back(sample_ou_trajectory(m, 2e-5, 51, r2).values[50]);
  }
  CHECK(ks_statistic(a, b) <= 1.628 * std::sqrt(2.0 / 10000));

  // Same stream, same path; different streams differ.
  Rng r1 = make_stream(3, 5), r2 = make_stream(3, 5), r3 = make_stream(3, 6);
  const auto p1 = sample_ou_trajectory(m, 1e-6, 20, r1).values;
  CHECK(p1 == sample_ou_trajectory(m, 1e-6, 20, r2).values);
  CHECK(p1 != sample_ou_trajectory(m, 1e-6, 20, r3).values);
  CHECK_THROWS_AS(sample_ou_trajectory(m, 0.0, 2, r1), ValidationError);
}

TEST_CASE("cumulant echo decay") {
  NoiseModel m;
  m.G0 = std::pow(2 * kKHz, 2);
  m.tau_c = 1e-3;
  CHECK(echo_decay(m, 0).value == 1.0);
  const double t_e = std::cbrt(3 * m.tau_c / (2 * m.G0));
  CHECK(t_e == doctest::Approx(212e-6).epsilon(0.002));
  CHECK(echo_decay(m, t_e).value == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(echo_decay(m, m.tau_c / 3).valid);
  CHECK(!echo_decay(m, m.tau_c / 3 * 1.01).valid);
  double prev = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double v = echo_decay(m, 1e-5 * k).value;
    CHECK(v <= prev);
    prev = v;
  }
  NoiseModel weaker = m;
  weaker.G0 *= 0.5;
  CHECK(echo_decay(weaker, 1e-4).value >= echo_decay(m, 1e-4).value);
  CHECK_THROWS_AS(echo_decay(m, -1e-6), ValidationError);
}

TEST_CASE("monte carlo echo") {
  NoiseModel m;
  m.G0 = std::pow(2 * kKHz, 2);
  m.tau_c = 1e-3;
  m.n_trajectories = 10000;
  m.seed = 5;
  const std::vector<double> ts{25e-6, 50e-6, 100e-6, 150e-6, 250e-6, 330e-6};
  const auto mc = echo_decay_monte_carlo(m, ts, 1e-6);
  REQUIRE(mc.size() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(mc[i].n == m.n_trajectories);
    const double se = mc[i].std / std::sqrt(double(mc[i].n));
    // Piecewise-constant sampling at 1 us is far below tau_c.
    CHECK(std::abs(mc[i].mean - exact_ou_echo(m.G0, m.tau_c, ts[i])) <= 4 * se + 1e-3);
  }
  // The t^3 law is the leading term: agreement to 5% while tau << tau_c.
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(mc[i].mean - echo_decay(m, ts[i]).value) <= 0.05);

  // Fixed-order reduction: thread count does not change the result.
  const auto one = echo_decay_monte_carlo(m, ts, 1e-6, 1);
  const auto four = echo_decay_monte_carlo(m, ts, 1e-6, 4);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(one[i].mean == four[i].mean);
    CHECK(one[i].std == four[i].std);
  }
  const std::vector<double> bad{1.5e-6};
  CHECK_THROWS_AS(echo_decay_monte_carlo(m, bad, 1e-6), ValidationError);
}

TEST_CASE("noise calibration") {
  const NoiseModel m = calibrate_noise(1.5e-6, 250e-6, 1e-3);
  CHECK(m.sigma_static == doctest::Approx(9.428e5).epsilon(1e-4));
  CHECK(std::sqrt(m.G0) / kTwoPi == doctest::Approx(1.56e3).epsilon(0.002));
  // exp(-(t/T2)^3) at T2.
  CHECK(echo_decay(m, 250e-6).value == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(m.tau_c == 1e-3);
  CHECK(calibrate_noise(INFINITY, 250e-6).sigma_static == 0.0);
  CHECK_THROWS_AS(calibrate_noise(0, 1e-4), ValidationError);
  CHECK_THROWS_AS(calibrate_noise(1e-6, 1e-4, -1), ValidationError);
  NoiseModel bad;
  bad.G0 = -1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad.G0 = 1;
  bad.tau_c = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("selectivity shifts") {
  const SelectivityShifts z = selectivity_shifts(0.0, 5 * kMHz, 20 * kMHz, 4);
  CHECK(z.bs_shift == 0.0);
  CHECK(z.rwa_shift == 0.0);
  const SelectivityShifts s = selectivity_shifts(20 * kKHz, 5 * kMHz, 20 * kMHz, 4);
  CHECK(s.bs_shift == doctest::Approx(-kTwoPi * 40).epsilon(1e-12));
  CHECK(s.rwa_shift == doctest::Approx(std::pow(20 * kKHz, 2) / (4 * 20 * kMHz)).epsilon(1e-12));
  CHECK(s.worst_case == doctest::Approx(-4 * std::pow(20 * kKHz, 2) / (2 * 20 * kMHz)).epsilon(1e-12));
  for (double r : {0.001, 0.01, 0.05, 0.1}) {
    for (double dw : {3 * kMHz, -3 * kMHz}) {
      const double exact = exact_bs_shift(r * std::abs(dw), dw);
      const double approx = selectivity_shifts(r * std::abs(dw), dw, 20 * kMHz, 1).bs_shift;
      CHECK(exact == doctest::Approx(dw - std::copysign(std::hypot(r * dw, dw), dw)).epsilon(1e-9));
      CHECK(std::abs(exact - approx) <= 0.01 * std::abs(approx));
      CHECK(std::signbit(approx) != std::signbit(dw));
    }
  }
  CHECK_THROWS_AS(selectivity_shifts(1.0, 0.0, 1.0, 1), ValidationError);
}

TEST_CASE("gauss hermite quadrature") {
  for (std::size_t n : {1, 2, 5, 7, 12}) {
    const Quadrature q = gauss_hermite_normal(n);
    REQUIRE(q.nodes.size() == n);
    // Exact for polynomial degree up to 2n - 1; E[X^2k] = (2k - 1)!!.
    for (std::size_t p = 0; p < 2 * n; ++p) {
      double s = 0, mag = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double term = q.weights[i] * std::pow(q.nodes[i], double(p));
        s += term;
        mag += std::abs(term);
      }
      double want = p % 2 ? 0.0 : 1.0;
      for (std::size_t k = p; k > 1 && p % 2 == 0; k -= 2) want *= double(k - 1);
      CHECK(std::abs(s - want) <= 1e-12 * std::max(1.0, mag));
    }
  }
  CHECK_THROWS_AS(gauss_hermite_normal(0), ValidationError);
}

TEST_CASE("curve export") {
  const auto path = std::filesystem::temp_directory_path() / "spinreg_curve_test.txt";
  const std::vector<double> t{0.0, 2e-6}, v{1.0, 0.5};
  write_curve(path, t, v);
  std::ifstream f(path);
  std::string l1, l2, l3;
  std::getline(f, l1);
  std::getline(f, l2);
  std::getline(f, l3);
  CHECK(l1 == "time_us value");
  CHECK(l2 == "0 1");
  CHECK(l3 == "2 0.5");
  std::filesystem::remove(path);
  const std::vector<double> shorter{1.0};
  CHECK_THROWS_AS(write_curve(path, t, shorter), ValidationError);
}
