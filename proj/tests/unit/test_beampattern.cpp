// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include <doctest.h>

#include "ttdtrack/beampattern.hpp"
#include "ttdtrack/errors.hpp"
#include "ttdtrack/pairing.hpp"
#include "ttdtrack/validation/oracles.hpp"

using namespace ttdtrack;

TEST_SUITE("beampattern") {
  const SystemConfig cfg = reference_system();

  TEST_CASE("dirichlet examples") {
    CHECK(dirichlet(16, 0.0) == 1.0);
    CHECK(dirichlet(16, 2.0 / 16) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(dirichlet(16, 2.0) == 1.0);
  }

  TEST_CASE("dirichlet is even, 2-periodic, bounded and continuous at its singularities") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(-3.0, 3.0);
    for (int k = 0; k < 500; ++k) {
      const double a = unit(rng);
      for (int n : {1, 4, 16, 17}) {
        const double v = dirichlet(n, a);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(dirichlet(n, -a) == doctest::Approx(v).epsilon(1e-12));
        CHECK(dirichlet(n, a + 2.0) == doctest::Approx(v).scale(1.0).epsilon(1e-9));
      }
    }
    for (double c : {0.0, 2.0, -4.0}) CHECK(dirichlet(16, c + 1e-9) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("array gain examples") {
    const double theta0 = 0.41;
    const PrecoderConfig pc{theta0, theta0};
    CHECK(array_gain(cfg.f_c, theta0, pc, cfg) == doctest::Approx(1.0));
    for (int m : {-cfg.m_half, -9, 17, cfg.m_half}) {
      const double f_m = cfg.frequency(m);
      CHECK(array_gain(f_m, theta0, pc, cfg) ==
            doctest::Approx(dirichlet(cfg.p, cfg.baseband(m) / cfg.f_c * theta0)).epsilon(1e-12));
    }
  }

  TEST_CASE("closed-form gain equals the brute-force inner product") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> m_dist(-cfg.m_half, cfg.m_half);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double psi = unit(rng);
      const double t = 1.25 * unit(rng);
      const double theta = unit(rng);
      const double f_m = cfg.frequency(m_dist(rng));
      worst = std::max(worst, std::abs(array_gain(f_m, theta, {psi, t}, cfg) -
                                       oracle::inner_product_gain(f_m, theta, psi, t, cfg)));
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("lobe geometry examples and the W1 == T2 identity") {
    const LobeGeometry g0 = lobe_geometry(cfg.f_c, {0.3, 0.9}, cfg);
    CHECK(g0.t1 == doctest::Approx(2.0));
    CHECK(g0.w1 == doctest::Approx(0.125));
    CHECK(g0.theta_c1 == doctest::Approx(0.3));
    CHECK(g0.w2 == doctest::Approx(0.0078125));
    for (int m = -cfg.m_half; m <= cfg.m_half; m += 8) {
      const LobeGeometry g = lobe_geometry(cfg.frequency(m), {0.25, 0.25}, cfg);
      CHECK(g.w1 == g.t2);
      CHECK(g.t1 == doctest::Approx(cfg.p * g.t2));
      CHECK(g.theta_c2 == doctest::Approx(0.25));
      CHECK(g.theta_c2 == doctest::Approx(angle_map(m, {0.25, 0.25}, cfg)));
    }
    CHECK_THROWS_AS(lobe_geometry(-1.0, {0.0, 0.0}, cfg), DomainError);
  }

  TEST_CASE("angle map examples") {
    CHECK(angle_map(0, {0.33, -1.1}, cfg) == doctest::Approx(0.33));
    for (int m : {-cfg.m_half, 5, cfg.m_half}) CHECK(angle_map(m, {-0.2, -0.2}, cfg) == doctest::Approx(-0.2));
    const PairingConfig fw = make_forward_pairing(0.6, 0.05, cfg);
    CHECK(angle_map(-cfg.m_half, fw.precoder(), cfg) == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(angle_map(cfg.m_half, fw.precoder(), cfg) == doctest::Approx(0.65).epsilon(1e-12));
    CHECK_THROWS_AS(angle_map(cfg.m_half + 1, fw.precoder(), cfg), DomainError);
  }

  TEST_CASE("angle map is monotone in m on valid radii") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 30; ++k) {
      const double theta0 = 0.9 * unit(rng);
      const PairingConfig bw = make_backward_pairing(theta0, 0.99 * unit(rng) * backward_bound(theta0, cfg), cfg);
      const PairingConfig fw = make_forward_pairing(-theta0, 0.99 * unit(rng) * forward_bound(-theta0, cfg), cfg);
      REQUIRE(fw.t_aux > fw.psi);
      for (int m = -cfg.m_half; m < cfg.m_half; ++m) {
        CHECK(angle_map(m + 1, bw.precoder(), cfg) < angle_map(m, bw.precoder(), cfg));
        CHECK(angle_map(m + 1, fw.precoder(), cfg) > angle_map(m, fw.precoder(), cfg));
      }
    }
  }

  TEST_CASE("peak map on aligned and over-bound forward pairings") {
    const PeakMap aligned = peak_map({0.3, 0.3}, cfg, 1e-4);
    REQUIRE(aligned.subcarriers.size() == 129);
    for (std::size_t i = 0; i < aligned.theta.size(); ++i) {
      CHECK(std::abs(aligned.theta[i] - 0.3) <= 2e-4);
      CHECK(aligned.gain[i] <= 1.0);
      CHECK(aligned.gain[i] >= 0.0);
    }
    // 10% above the forward bound the mainlobe group breaks up.
    const PairingConfig fw = make_forward_pairing(0.8, 1.1 * forward_bound(0.8, cfg), cfg);
    const PeakMap diffused = peak_map(fw.precoder(), cfg, 1e-4);
    double worst = 0.0;
    for (std::size_t i = 0; i < diffused.theta.size(); ++i) {
      worst = std::max(worst, std::abs(diffused.theta[i] - angle_map(diffused.subcarriers[i], fw.precoder(), cfg)));
    }
    CHECK(worst > lobe_geometry(cfg.highest_frequency(), fw.precoder(), cfg).w2);
  }

  TEST_CASE("peak map within a valid backward radius stays in the beam mainlobe") {
    const PairingConfig bw = make_backward_pairing(0.6, 0.05, cfg);
    const PeakMap map = peak_map(bw.precoder(), cfg, 1e-4);
    for (std::size_t i = 0; i < map.theta.size(); ++i) {
      const int m = map.subcarriers[i];
      const double w2 = lobe_geometry(cfg.frequency(m), bw.precoder(), cfg).w2;
      CHECK(std::abs(map.theta[i] - angle_map(m, bw.precoder(), cfg)) < 0.1 * w2);
    }
  }

  TEST_CASE("peak map breaks ties toward the smallest theta") {
    // psi = t = 1 at the center subcarrier peaks at theta = 1 and again at its alias theta = -1.
    const PeakMap map = peak_map({1.0, 1.0}, cfg, 1e-3);
    CHECK(map.theta[static_cast<std::size_t>(cfg.m_half)] == doctest::Approx(-1.0));
  }

  TEST_CASE("sidelobe locations") {
    SUBCASE("numeric triple") {
      const PairingConfig pc = make_backward_pairing(0.8, 0.08, cfg);
      const SidelobeLocations s = sidelobe_locations(pc, cfg);
      CHECK(s.theta_side_minus == doctest::Approx(0.8 + 0.08 - 2.0 / (16.0 * 0.95)).epsilon(1e-12));
      CHECK(s.theta_side_plus == doctest::Approx(0.8 - 0.08 + 2.0 / (16.0 * 1.05)).epsilon(1e-12));
      CHECK(s.theta_c == doctest::Approx(0.8 - 0.05 * 0.08).epsilon(1e-12));
    }
    SUBCASE("weighted identity, opposite sides and unit gain at theta_c") {
      std::mt19937_64 rng(4);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double f_lo = cfg.lowest_frequency();
      const double f_hi = cfg.highest_frequency();
      for (int k = 0; k < 100; ++k) {
        const PairingConfig pc = make_backward_pairing(unit(rng), 0.001 + 0.15 * unit(rng), cfg);
        const SidelobeLocations s = sidelobe_locations(pc, cfg);
        CHECK(std::abs((f_lo * s.theta_side_minus + f_hi * s.theta_side_plus) / (f_lo + f_hi) - s.theta_c) <= 1e-12);
        CHECK((s.theta_side_minus - s.theta_c) * (s.theta_side_plus - s.theta_c) <= 0.0);
        CHECK(std::abs(array_gain(cfg.f_c, s.theta_c, pc.precoder(), cfg) - 1.0) <= 1e-12);
      }
    }
    SUBCASE("forward pairings are rejected") {
      CHECK_THROWS_AS(sidelobe_locations(make_forward_pairing(-0.5, 0.02, cfg), cfg), std::invalid_argument);
    }
  }

  TEST_CASE("gain surface CSV layout") {
    std::ostringstream os;
    write_gain_surface_csv(os, {0.2, 0.2}, cfg, 0.5, 64);
    const std::string text = os.str();
    CHECK(text.rfind("m,f_m,theta,gain\n", 0) == 0);
    // 3 subcarriers x 5 angles + header
    CHECK(std::count(text.begin(), text.end(), '\n') == 16);
    std::ostringstream pm;
    write_peak_map_csv(pm, peak_map({0.2, 0.2}, cfg, 1e-2), {0.2, 0.2}, cfg);
    CHECK(pm.str().rfind("m,f_m,theta,gain,angle_map\n", 0) == 0);
  }
}
