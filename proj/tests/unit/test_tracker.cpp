// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "ttdtrack/beampattern.hpp"
#include "ttdtrack/errors.hpp"
#include "ttdtrack/pairing.hpp"
#include "ttdtrack/tracker.hpp"

using namespace ttdtrack;

namespace {

ChannelResponse single_path(double theta, const SystemConfig& cfg, std::complex<double> gain = {1.0, 0.0}) {
  PathComponent path;
  path.gain = gain;
  path.direction = theta;
  return channel_response(path, SubcarrierGrid(cfg), cfg);
}

TrackingObservation constant_observation(int slots, const SystemConfig& cfg, std::complex<double> value) {
  TrackingObservation obs;
  obs.cfg = cfg;
  obs.y = Eigen::MatrixXcd::Constant(slots, cfg.subcarrier_count(), value);
  obs.pairings.assign(slots, make_pairing(0.0, 0.01, cfg));
  return obs;
}

// Largest gap between consecutive search angles of one slot.
double max_slot_spacing(const Eigen::MatrixXd& angles, int l) {
  std::vector<double> v(static_cast<std::size_t>(angles.cols()));
  for (Eigen::Index i = 0; i < angles.cols(); ++i) v[i] = angles(l, i);
  std::sort(v.begin(), v.end());
  double gap = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) gap = std::max(gap, v[i] - v[i - 1]);
  return gap;
}

}  // namespace

TEST_SUITE("tracker") {
  const SystemConfig cfg = reference_system();

  TEST_CASE("slot centers and modes") {
    SUBCASE("all positive centers use backward pairings") {
      const TrackingPlan plan = plan_tracking(0.6, 0.2, 4, cfg);
      REQUIRE(plan.slot_count() == 4);
      const double expected[] = {0.45, 0.55, 0.65, 0.75};
      for (int l = 0; l < 4; ++l) {
        CHECK(plan.slots[l].theta0 == doctest::Approx(expected[l]));
        CHECK(plan.slots[l].alpha == doctest::Approx(0.05));
        CHECK(plan.slots[l].pairing.mode == PairingMode::backward);
        CHECK(plan.slots[l].index == l);
      }
    }
    SUBCASE("the sign of each slot center picks its mode") {
      const TrackingPlan plan = plan_tracking(0.05, 0.2, 4, cfg);
      const double expected[] = {-0.1, 0.0, 0.1, 0.2};
      for (int l = 0; l < 4; ++l) CHECK(plan.slots[l].theta0 == doctest::Approx(expected[l]).epsilon(1e-12));
      CHECK(plan.slots[0].pairing.mode == PairingMode::forward);
      CHECK(plan.slots[1].pairing.mode == PairingMode::backward);
      CHECK(plan.slots[2].pairing.mode == PairingMode::backward);
      CHECK(plan.slots[3].pairing.mode == PairingMode::backward);
    }
    SUBCASE("a single slot covers the whole interval") {
      const TrackingPlan plan = plan_tracking(-0.3, 0.1, 1, cfg);
      REQUIRE(plan.slot_count() == 1);
      CHECK(plan.slots[0].theta0 == doctest::Approx(-0.3).epsilon(1e-15));
      CHECK(plan.slots[0].alpha == doctest::Approx(0.1).epsilon(1e-15));
    }
    SUBCASE("forward-only policy") {
      const TrackingPlan plan = plan_tracking(0.6, 0.2, 4, cfg, nullptr, PairingPolicy::forward_only);
      for (const auto& s : plan.slots) CHECK(s.pairing.mode == PairingMode::forward);
    }
    SUBCASE("sweep plan aligns every subcarrier") {
      const TrackingPlan plan = plan_sweep(0.6, 0.2, 4, cfg);
      const Eigen::MatrixXd angles = search_angles(plan);
      for (int l = 0; l < 4; ++l) {
        CHECK(plan.slots[l].pairing.mode == PairingMode::aligned);
        CHECK(angles.row(l).minCoeff() == doctest::Approx(plan.slots[l].theta0));
        CHECK(angles.row(l).maxCoeff() == doctest::Approx(plan.slots[l].theta0));
      }
    }
  }

  TEST_CASE("slot intervals tile the searched range") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
      const int slots = 1 + static_cast<int>(unit(rng) * 8);
      const double alpha = 0.01 + 0.3 * unit(rng);
      const double theta0 = (1.0 - alpha) * (2.0 * unit(rng) - 1.0);
      const TrackingPlan plan = plan_tracking(theta0, alpha, slots, cfg);
      CHECK(plan.slots.front().theta0 - plan.slots.front().alpha == doctest::Approx(theta0 - alpha));
      CHECK(plan.slots.back().theta0 + plan.slots.back().alpha == doctest::Approx(theta0 + alpha));
      for (int l = 1; l < slots; ++l) {
        CHECK(plan.slots[l].theta0 - plan.slots[l - 1].theta0 == doctest::Approx(2.0 * alpha / slots));
        CHECK(plan.slots[l - 1].theta0 + plan.slots[l - 1].alpha == doctest::Approx(plan.slots[l].theta0 - plan.slots[l].alpha));
      }
      for (const auto& s : plan.slots) CHECK(s.pairing.mode == (s.theta0 >= 0.0 ? PairingMode::backward : PairingMode::forward));
    }
  }

  TEST_CASE("plan errors and warnings") {
    CHECK_THROWS_AS(plan_tracking(0.9, 0.2, 4, cfg), DomainError);
    CHECK_THROWS_AS(plan_tracking(0.0, 0.2, 0, cfg), DomainError);
    CHECK_THROWS_AS(plan_tracking(0.0, 0.0, 2, cfg), DomainError);
    CHECK_NOTHROW(plan_tracking(0.8, 0.2, 1, cfg));
    CHECK(plan_tracking(0.0, 0.8, 1, cfg).exceeds_bound);
    CHECK_FALSE(plan_tracking(0.6, 0.2, 4, cfg).exceeds_bound);
  }

  TEST_CASE("codebook snapping is applied per slot") {
    const JointCodebook cb = build_codebook(cfg);
    const TrackingPlan plan = plan_tracking(0.37, 0.2, 4, cfg, &cb);
    for (const auto& s : plan.slots) {
      CHECK(std::find(cb.psi_grid.values().begin(), cb.psi_grid.values().end(), s.pairing.psi) != cb.psi_grid.values().end());
      CHECK(std::find(cb.t_grid.values().begin(), cb.t_grid.values().end(), s.pairing.t_aux) != cb.t_grid.values().end());
    }
  }

  TEST_CASE("observation shape, reproducibility and errors") {
    const TrackingPlan plan = plan_tracking(0.6, 0.2, 4, cfg);
    const ChannelResponse ch = single_path(0.62, cfg);
    const TrackingObservation a = run_tracking(plan, ch, 0.5, 42);
    const TrackingObservation b = run_tracking(plan, ch, 0.5, 42);
    const TrackingObservation c = run_tracking(plan, ch, 0.5, 43);
    CHECK(a.y.rows() == 4);
    CHECK(a.y.cols() == cfg.subcarrier_count());
    CHECK(a.pairings.size() == 4);
    CHECK(a.y == b.y);
    CHECK(a.y != c.y);
    const ChannelResponse silent = single_path(0.62, cfg, {0.0, 0.0});
    const TrackingObservation noise = run_tracking(plan, silent, 1.0, 42);
    const TrackingObservation quiet = run_tracking(plan, silent, 0.0, 42);
    CHECK(noise.y.cwiseAbs().maxCoeff() > 0.0);
    CHECK(quiet.y.cwiseAbs().maxCoeff() == 0.0);
    const SystemConfig other = SystemConfig::make(256, 16, 16, 100e9, 10e9, 32);
    CHECK_THROWS_AS(run_tracking(plan, single_path(0.6, other), 0.0, 1), DimensionError);
  }

  TEST_CASE("strongest beam selection") {
    SUBCASE("single nonzero entry") {
      TrackingObservation obs = constant_observation(4, cfg, {0.0, 0.0});
      obs.y(2, 5 + cfg.m_half) = {0.0, 1.0};
      CHECK(select_strongest(obs) == BeamIndex{2, 5});
    }
    SUBCASE("all-equal magnitudes fall back to the first slot and lowest subcarrier") {
      const TrackingObservation obs = constant_observation(4, cfg, {1.0, 1.0});
      CHECK(select_strongest(obs) == BeamIndex{0, -cfg.m_half});
      CHECK(select_strongest_slot(obs) == 0);
    }
    SUBCASE("strongest slot by energy") {
      TrackingObservation obs = constant_observation(3, cfg, {0.1, 0.0});
      obs.y.row(1).setConstant({0.5, 0.0});
      obs.y(2, 0) = {3.0, 0.0};
      CHECK(select_strongest_slot(obs) == 1);
      CHECK(select_strongest(obs) == BeamIndex{2, -cfg.m_half});
    }
    SUBCASE("empty observation") {
      TrackingObservation obs;
      obs.cfg = cfg;
      CHECK_THROWS_AS(select_strongest(obs), DimensionError);
    }
  }

  TEST_CASE("angle estimate") {
    const TrackingPlan plan = plan_tracking(0.6, 0.2, 4, cfg);
    const TrackingObservation obs = run_tracking(plan, single_path(0.6, cfg), 0.0, 1);
    CHECK(estimate_angle(obs, 2, 0) == doctest::Approx(plan.slots[2].pairing.psi).epsilon(1e-15));
    CHECK(estimate_angle(obs, 1, 7) == angle_map(7, plan.slots[1].pairing.precoder(), cfg));
    CHECK_THROWS_AS(estimate_angle(obs, 4, 0), DomainError);
    const TrackingEstimate est = coarse_estimate(obs);
    CHECK(est.theta_hat == angle_map(est.m_hat, obs.pairings[est.l_hat].precoder(), cfg));
    CHECK_FALSE(est.refined.has_value());
    CHECK(est.best_theta() == est.theta_hat);
  }

  TEST_CASE("noiseless on-grid peak is the row maximum") {
    const TrackingPlan plan = plan_tracking(0.3, 0.2, 4, cfg);
    const Eigen::MatrixXd angles = search_angles(plan);
    for (int l = 0; l < plan.slot_count(); ++l) {
      for (int m : {-48, -17, 0, 23, 60}) {
        const double theta = angles(l, m + cfg.m_half);
        const TrackingObservation obs = run_tracking(plan, single_path(theta, cfg), 0.0, 3);
        Eigen::Index best = 0;
        obs.y.row(l).cwiseAbs2().maxCoeff(&best);
        CHECK(static_cast<int>(best) - cfg.m_half == m);
      }
    }
  }

  TEST_CASE("noiseless on-grid recovery") {
    // Where two slots meet, the edge subcarrier of the neighbouring slot points less than one
    // grid step away and can win; every other on-grid direction is recovered exactly.
    for (double theta0 : {-0.6, 0.05, 0.3}) {
      const TrackingPlan plan = plan_tracking(theta0, 0.2, 4, cfg);
      const Eigen::MatrixXd angles = search_angles(plan);
      int inexact = 0;
      for (int l = 0; l < plan.slot_count(); ++l) {
        for (int m = -cfg.m_half; m <= cfg.m_half; ++m) {
          const double theta = angles(l, m + cfg.m_half);
          const TrackingObservation obs = run_tracking(plan, single_path(theta, cfg), 0.0, 3);
          const double err = std::abs(coarse_estimate(obs).theta_hat - theta);
          if (std::abs(m) < cfg.m_half - 4) {
            CHECK(err <= 1e-12);
          } else {
            CHECK(err <= max_slot_spacing(angles, l) + 1e-12);
          }
          if (err > 1e-12) ++inexact;
        }
      }
      CHECK(inexact <= plan.slot_count() - 1);
    }
  }

  TEST_CASE("noiseless off-grid error stays within one grid spacing") {
    const TrackingPlan plan = plan_tracking(-0.25, 0.2, 4, cfg);
    const Eigen::MatrixXd angles = search_angles(plan);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(-0.45 + 1e-3, -0.05 - 1e-3);
    for (int k = 0; k < 60; ++k) {
      const double theta = unit(rng);
      const TrackingObservation obs = run_tracking(plan, single_path(theta, cfg), 0.0, 3);
      const TrackingEstimate est = coarse_estimate(obs);
      int covering = 0;
      for (int l = 0; l < plan.slot_count(); ++l) {
        if (std::abs(theta - plan.slots[l].theta0) <= plan.slots[l].alpha) covering = l;
      }
      CHECK(std::abs(est.theta_hat - theta) <= max_slot_spacing(angles, covering) + 1e-12);
    }
  }

  TEST_CASE("mirrored geometry gives mirrored estimates") {
    for (double theta : {0.12, 0.37, 0.58, 0.81}) {
      const double center = std::clamp(theta - 0.07, -0.8, 0.8);
      const TrackingPlan pos = plan_tracking(center, 0.2, 4, cfg);
      const TrackingPlan neg = plan_tracking(-center, 0.2, 4, cfg);
      const TrackingEstimate a = coarse_estimate(run_tracking(pos, single_path(theta, cfg), 0.0, 1));
      const TrackingEstimate b = coarse_estimate(run_tracking(neg, single_path(-theta, cfg), 0.0, 1));
      CHECK(a.l_hat == pos.slot_count() - 1 - b.l_hat);
      CHECK(a.m_hat == b.m_hat);
      CHECK(a.theta_hat == doctest::Approx(-b.theta_hat).epsilon(1e-12));
    }
  }

  TEST_CASE("search angles cover the interval without large gaps") {
    for (double theta0 : {-0.6, -0.05, 0.05, 0.3, 0.7}) {
      const TrackingPlan plan = plan_tracking(theta0, 0.2, 4, cfg);
      const Eigen::MatrixXd angles = search_angles(plan);
      std::vector<double> all(angles.data(), angles.data() + angles.size());
      std::sort(all.begin(), all.end());
      double spacing = 0.0;
      for (int l = 0; l < plan.slot_count(); ++l) spacing = std::max(spacing, max_slot_spacing(angles, l));
      CHECK(all.front() == doctest::Approx(theta0 - 0.2).epsilon(1e-12));
      CHECK(all.back() == doctest::Approx(theta0 + 0.2).epsilon(1e-12));
      for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i] - all[i - 1] <= spacing + 1e-12);
    }
  }

  TEST_CASE("observation CSV") {
    const TrackingPlan plan = plan_tracking(0.6, 0.2, 2, cfg);
    const TrackingObservation obs = run_tracking(plan, single_path(0.6, cfg), 0.0, 1);
    std::ostringstream os;
    write_observation_csv(os, obs);
    const std::string text = os.str();
    CHECK(text.rfind("slot,m=-64,m=-63,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  }
}
