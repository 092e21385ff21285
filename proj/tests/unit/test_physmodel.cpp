// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <doctest.h>

#include "ttdtrack/beampattern.hpp"
#include "ttdtrack/errors.hpp"
#include "ttdtrack/physmodel.hpp"
#include "ttdtrack/validation/oracles.hpp"

using namespace ttdtrack;
using std::numbers::pi;

TEST_SUITE("system") {
  TEST_CASE("reference system derives the subcarrier spacing from the full bandwidth") {
    const SystemConfig cfg = reference_system();
    CHECK(cfg.f_d == doctest::Approx(78.125e6));
    CHECK(cfg.m_half * cfg.f_d == doctest::Approx(5e9));
    CHECK(cfg.squint_ratio() == doctest::Approx(0.05));
    CHECK(cfg.subcarrier_count() == 129);
  }

  TEST_CASE("invalid configurations are rejected") {
    CHECK_THROWS_AS(SystemConfig::make(256, 16, 8, 100e9, 10e9, 64), std::invalid_argument);
    CHECK_THROWS_AS(SystemConfig::make(256, 16, 16, 100e9, 250e9, 64), std::invalid_argument);
    CHECK_THROWS_AS(SystemConfig::make(256, 16, 16, -1.0, 10e9, 64), std::invalid_argument);
    SystemConfig bad = reference_system();
    bad.f_d *= 1.01;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("subcarrier grid is symmetric and strictly increasing") {
    const SystemConfig cfg = reference_system();
    const SubcarrierGrid grid(cfg);
    REQUIRE(grid.size() == 129);
    for (int m = -cfg.m_half; m < cfg.m_half; ++m) CHECK(grid.frequency(m + 1) > grid.frequency(m));
    for (int m = 0; m <= cfg.m_half; ++m) {
      CHECK(grid.frequency(m) + grid.frequency(-m) == doctest::Approx(2.0 * cfg.f_c));
      CHECK(grid.baseband(m) == doctest::Approx(m * cfg.f_d));
    }
    CHECK_THROWS_AS(grid.index(cfg.m_half + 1), DomainError);
  }
}

TEST_SUITE("physmodel") {
  const SystemConfig cfg = reference_system();

  TEST_CASE("steering vector examples") {
    const cvec a = steering_vector(cfg.f_c, cfg.f_c, 1.0, 2);
    CHECK(std::abs(a[0] - 1.0) < 1e-15);
    CHECK(std::abs(a[1] + 1.0) < 1e-15);
    const cvec ones = steering_vector(cfg.f_c, cfg.f_c, 0.0, 4);
    for (int k = 0; k < 4; ++k) CHECK(ones[k] == std::complex<double>(1.0, 0.0));

    const double f_hi = cfg.highest_frequency();
    const cvec b = steering_vector(f_hi, cfg.f_c, 0.5, 3);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(b[k]) == doctest::Approx(1.0).epsilon(1e-15));
      const std::complex<double> expected = std::exp(std::complex<double>(0.0, -pi * (f_hi / cfg.f_c) * k * 0.5));
      CHECK(std::abs(b[k] - expected) < 1e-14);
    }
  }

  TEST_CASE("channel response examples") {
    const SubcarrierGrid grid(cfg);
    SUBCASE("center subcarrier equals the plain steering vector") {
      const auto h = channel_response(PathComponent{{1.0, 0.0}, 0.3, 0.0}, grid, cfg);
      CHECK((h.at(0) - steering_vector(cfg.f_c, cfg.f_c, 0.3, cfg.n_bs)).norm() < 1e-12);
      for (int m : {-cfg.m_half, 7, cfg.m_half}) {
        CHECK(h.at(m).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
        CHECK(h.at(m).cwiseAbs().minCoeff() == doctest::Approx(1.0));
      }
    }
    SUBCASE("broadside path with gain 2j") {
      const auto h = channel_response(PathComponent{{0.0, 2.0}, 0.0, 0.0}, grid, cfg);
      for (int m : {-cfg.m_half, 0, 31}) {
        CHECK((h.at(m) - cvec::Constant(cfg.n_bs, {0.0, 2.0})).norm() < 1e-12);
      }
    }
    SUBCASE("path delay adds a baseband phase") {
      const double tau = 1e-9;
      const auto h = channel_response(PathComponent{{1.0, 0.0}, 0.3, tau}, grid, cfg);
      const std::complex<double> phase = std::exp(std::complex<double>(0.0, -2.0 * pi * cfg.m_half * cfg.f_d * tau));
      const cvec expected = phase * steering_vector(cfg.highest_frequency(), cfg.f_c, 0.3, cfg.n_bs);
      CHECK((h.at(cfg.m_half) - expected).norm() < 1e-10);
    }
    SUBCASE("invalid paths are rejected") {
      CHECK_THROWS_AS(channel_response(PathComponent{{1.0, 0.0}, 1.5, 0.0}, grid, cfg), DomainError);
      CHECK_THROWS_AS(channel_response(PathComponent{{1.0, 0.0}, 0.1, -1.0}, grid, cfg), DomainError);
    }
  }

  TEST_CASE("precoder examples") {
    SUBCASE("center subcarrier gives a pure DFT vector") {
      const cvec f = assemble_precoder({0.37, 1.1}, cfg.f_c, cfg);
      CHECK((f - steering_vector(cfg.f_c, cfg.f_c, 0.37, cfg.n_bs)).norm() < 1e-12);
    }
    SUBCASE("zero slopes give all ones") {
      const cvec f = assemble_precoder({0.0, 0.0}, cfg.highest_frequency(), cfg);
      CHECK((f - cvec::Ones(cfg.n_bs)).norm() < 1e-12);
    }
    SUBCASE("entries follow the double-product expansion and match the closed-form gain") {
      const double f_hi = cfg.highest_frequency();
      const PrecoderConfig pc{0.6025, 1.6};
      const cvec f = assemble_precoder(pc, f_hi, cfg);
      for (int n = 0; n < cfg.n_bs; ++n) {
        CHECK(std::abs(f[n] - oracle::precoder_entry(n, pc.psi, pc.t_aux, f_hi, cfg)) < 1e-11);
        CHECK(std::abs(f[n]) == doctest::Approx(1.0));
      }
      std::mt19937_64 rng(5);
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      for (int k = 0; k < 5; ++k) {
        const double theta = unit(rng);
        const cvec a = steering_vector(f_hi, cfg.f_c, theta, cfg.n_bs);
        const double brute = std::abs(a.dot(f)) / cfg.n_bs;
        CHECK(brute == doctest::Approx(array_gain(f_hi, theta, pc, cfg)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("physical form round-trips to the equivalent model") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(-1.25, 1.25);
    for (int k = 0; k < 20; ++k) {
      const PrecoderConfig pc{unit(rng), unit(rng)};
      const PhysicalPrecoder phys = pc.to_physical(cfg);
      CHECK(phys.phases.size() == cfg.n_bs);
      CHECK(phys.delays.size() == cfg.n_ttd);
      const EquivalentVectors eq = to_equivalent(phys, cfg);
      CHECK((eq.psi_vec - pc.psi_vector(cfg)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((eq.t_vec - pc.delay_vector(cfg)).cwiseAbs().maxCoeff() < 1e-12);
      for (int m : {-cfg.m_half, -3, 0, 40, cfg.m_half}) {
        const double f_m = cfg.frequency(m);
        CHECK((assemble_physical_precoder(phys, f_m, cfg) - assemble_precoder(pc, f_m, cfg)).norm() < 1e-9);
      }
    }
  }

  TEST_CASE("delay vector is P times the slope ramp and delays are in seconds") {
    const PrecoderConfig pc{0.2, 0.5};
    const auto t_vec = pc.delay_vector(cfg);
    CHECK(t_vec[3] == doctest::Approx(cfg.p * 3 * 0.5));
    CHECK(pc.to_physical(cfg).delays[3] == doctest::Approx(t_vec[3] / (2.0 * cfg.f_c)));
  }

  TEST_CASE("aligned precoder peaks at the precoder direction on every subcarrier") {
    const double theta0 = 0.3;
    const PeakMap map = peak_map({theta0, theta0}, cfg, 1e-4);
    // The window factor peaks at (f_c / f_m) theta0 and tilts the product by about one sample.
  for (std::size_t i = 0; i < map.theta.size(); ++i) CHECK(std::abs(map.theta[i] - theta0) <= 2e-4);
  }

  TEST_CASE("received pilot model") {
    const cvec h = steering_vector(cfg.f_c, cfg.f_c, 0.4, cfg.n_bs);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_bs));
    SUBCASE("aligned precoder collects the full array gain") {
      const auto y = simulate_rx(h, h, {1.0, 0.0}, 0.0, 1);
      CHECK(std::abs(y - std::complex<double>(cfg.n_bs, 0.0)) < 1e-9);
      const auto y_scaled = simulate_rx(h, h * scale, {1.0, 0.0}, 0.0, 1);
      CHECK(std::abs(y_scaled) == doctest::Approx(std::sqrt(static_cast<double>(cfg.n_bs))));
    }
    SUBCASE("orthogonal precoder gives zero") {
      const cvec f = steering_vector(cfg.f_c, cfg.f_c, 0.4 + 2.0 / cfg.n_bs, cfg.n_bs);
      CHECK(std::abs(simulate_rx(h, f, {1.0, 0.0}, 0.0, 1)) < 1e-10);
    }
    SUBCASE("noise is reproducible for a fixed seed and has the requested variance") {
      const auto a = simulate_rx(h, h, {1.0, 0.0}, 0.1, 42);
      const auto b = simulate_rx(h, h, {1.0, 0.0}, 0.1, 42);
      CHECK(a == b);
      CHECK(a != simulate_rx(h, h, {1.0, 0.0}, 0.1, 43));
      auto rng = make_rng(9);
      double power = 0.0;
      constexpr int draws = 20000;
      const std::complex<double> clean = h.dot(h);
      for (int i = 0; i < draws; ++i) power += std::norm(simulate_rx(h, h, {1.0, 0.0}, 0.5, rng) - clean);
      CHECK(power / draws == doctest::Approx(0.25).epsilon(0.05));
    }
    SUBCASE("zero noise equals the exact inner product") {
      const cvec f = assemble_precoder({0.1, -0.7}, cfg.frequency(20), cfg);
      CHECK(std::abs(simulate_rx(h, f, {1.0, 0.0}, 0.0, 3) - h.dot(f)) == 0.0);
    }
    SUBCASE("length mismatch is a dimension error") {
      CHECK_THROWS_AS(simulate_rx(h, cvec::Ones(3), {1.0, 0.0}, 0.0, 1), DimensionError);
    }
  }

  TEST_CASE("substreams are deterministic and distinct") {
    auto a = make_rng(1, {2, 3});
    auto b = make_rng(1, {2, 3});
    auto c = make_rng(1, {3, 2});
    auto d = make_rng(1);
    auto e = make_rng(1, {0});
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
    CHECK(d() != e());
    CHECK(derive_seed(5, {1}) == derive_seed(5, {1}));
  }
}
