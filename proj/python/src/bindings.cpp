// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>
#include <string>

#include "ttdtrack/beampattern.hpp"
#include "ttdtrack/codebook.hpp"
#include "ttdtrack/errors.hpp"
#include "ttdtrack/harness.hpp"
#include "ttdtrack/leakage.hpp"
#include "ttdtrack/pairing.hpp"
#include "ttdtrack/tracker.hpp"

namespace py = pybind11;
using namespace ttdtrack;

namespace {

py::dict record_dict(const TrialRecord& r) {
  py::dict d;
  d["trial"] = r.trial;
  d["user"] = r.user;
  d["snr_db"] = r.snr_db;
  d["slots"] = r.slots;
  d["theta_prev"] = r.theta_prev;
  d["theta_r"] = r.theta_r;
  d["theta_coarse"] = r.theta_coarse;
  d["theta_refined"] = r.theta_refined;
  d["theta_hat"] = r.theta_hat;
  d["gain"] = r.gain;
  d["l_hat"] = r.l_hat;
  d["m_hat"] = r.m_hat;
  d["refine_iterations"] = r.refine_iterations;
  d["refine_converged"] = r.refine_converged;
  d["refine_diverged"] = r.refine_diverged;
  d["diagnostic"] = r.diagnostic;
  return d;
}

py::dict point_dict(const PointMetrics& p) {
  py::dict d;
  d["slots"] = p.point.slots;
  d["snr_db"] = p.point.snr_db;
  d["theta"] = p.point.theta ? py::cast(*p.point.theta) : py::none();
  d["records"] = p.records;
  d["excluded"] = p.nmse.excluded;
  d["nmse"] = p.nmse.linear;
  d["nmse_db"] = p.nmse.db;
  d["nmse_coarse"] = p.nmse_coarse.linear;
  d["nmse_coarse_db"] = p.nmse_coarse.db;
  d["mean_gain"] = p.mean_gain;
  d["diverged"] = p.diverged;
  return d;
}

ScenarioConfig scenario_from(const py::dict& overrides) {
  ScenarioConfig scn;
  for (const auto& item : overrides) {
    const auto key = py::str(item.first).cast<std::string>();
    std::string value;
    if (py::isinstance<py::list>(item.second) || py::isinstance<py::tuple>(item.second)) {
      for (const auto& v : item.second) {
        if (!value.empty()) value += ',';
        value += py::str(v).cast<std::string>();
      }
    } else if (py::isinstance<py::bool_>(item.second)) {
      value = item.second.cast<bool>() ? "true" : "false";
    } else if (item.second.is_none()) {
      value = "none";
    } else {
      value = py::str(item.second).cast<std::string>();
    }
    apply_override(scn, key, value);
  }
  scn.validate();
  return scn;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wideband TTD beam tracking core";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_RuntimeError);

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init([](int n_bs, int n_ttd, int p, double f_c, double bandwidth, int m_half) {
             return SystemConfig::make(n_bs, n_ttd, p, f_c, bandwidth, m_half);
           }),
           py::arg("n_bs") = 256, py::arg("n_ttd") = 16, py::arg("p") = 16, py::arg("f_c") = 100e9,
           py::arg("bandwidth") = 10e9, py::arg("m_half") = 64)
      .def_readonly("n_bs", &SystemConfig::n_bs)
      .def_readonly("n_ttd", &SystemConfig::n_ttd)
      .def_readonly("p", &SystemConfig::p)
      .def_readonly("f_c", &SystemConfig::f_c)
      .def_readonly("bandwidth", &SystemConfig::bandwidth)
      .def_readonly("m_half", &SystemConfig::m_half)
      .def_readonly("f_d", &SystemConfig::f_d)
      .def("frequency", &SystemConfig::frequency, py::arg("m"))
      .def("subcarrier_count", &SystemConfig::subcarrier_count)
      .def("squint_ratio", &SystemConfig::squint_ratio)
      .def("__repr__", [](const SystemConfig& c) {
        std::ostringstream os;
        os << "SystemConfig(n_bs=" << c.n_bs << ", n_ttd=" << c.n_ttd << ", p=" << c.p << ", f_c=" << c.f_c
           << ", bandwidth=" << c.bandwidth << ", m_half=" << c.m_half << ")";
        return os.str();
      });
  m.def("reference_system", &reference_system);

  py::enum_<PairingMode>(m, "PairingMode")
      .value("forward", PairingMode::forward)
      .value("backward", PairingMode::backward)
      .value("aligned", PairingMode::aligned);

  py::class_<PairingConfig>(m, "PairingConfig")
      .def_readonly("mode", &PairingConfig::mode)
      .def_readonly("theta0", &PairingConfig::theta0)
      .def_readonly("alpha", &PairingConfig::alpha)
      .def_readonly("psi", &PairingConfig::psi)
      .def_readonly("t_aux", &PairingConfig::t_aux)
      .def_readonly("exceeds_bound", &PairingConfig::exceeds_bound);

  m.def("dirichlet", &dirichlet, py::arg("n"), py::arg("a"));
  m.def(
      "array_gain",
      [](double f_m, double theta, double psi, double t_aux, const SystemConfig& cfg) {
        return array_gain(f_m, theta, PrecoderConfig{psi, t_aux}, cfg);
      },
      py::arg("f_m"), py::arg("theta"), py::arg("psi"), py::arg("t_aux"), py::arg("cfg"));
  m.def(
      "angle_map",
      [](int sub, double psi, double t_aux, const SystemConfig& cfg) {
        return angle_map(sub, PrecoderConfig{psi, t_aux}, cfg);
      },
      py::arg("m"), py::arg("psi"), py::arg("t_aux"), py::arg("cfg"));

  m.def("make_pairing", &make_pairing, py::arg("theta0"), py::arg("alpha"), py::arg("cfg"));
  m.def("make_forward_pairing", &make_forward_pairing, py::arg("theta0"), py::arg("alpha"), py::arg("cfg"));
  m.def("make_backward_pairing", &make_backward_pairing, py::arg("theta0"), py::arg("alpha"), py::arg("cfg"));
  m.def("forward_bound", &forward_bound, py::arg("theta0"), py::arg("cfg"));
  m.def("backward_bound", &backward_bound, py::arg("theta0"), py::arg("cfg"));
  m.def("theorem1_bound", &theorem1_bound, py::arg("theta0"), py::arg("cfg"));
  m.def("fixed_radius", &fixed_radius, py::arg("cfg"));
  m.def(
      "radius_bounds",
      [](double theta0, const SystemConfig& cfg) {
        const RadiusBounds b = radius_bounds(theta0, cfg);
        py::dict d;
        d["forward"] = b.forward;
        d["forward_single_slot"] = b.forward_single_slot;
        d["backward"] = b.backward;
        d["fb"] = b.fb;
        d["theorem1"] = b.theorem1;
        d["fixed"] = b.fixed;
        d["quasi_fixed"] = b.quasi_fixed;
        return d;
      },
      py::arg("theta0"), py::arg("cfg"));

  m.def(
      "codebook",
      [](const SystemConfig& cfg) {
        const JointCodebook cb = build_codebook(cfg);
        py::dict d;
        d["psi"] = cb.psi_grid.values();
        d["t"] = cb.t_grid.values();
        d["t_max"] = cb.t_max;
        return d;
      },
      py::arg("cfg"));
  m.def(
      "snap",
      [](double value, const std::string& grid, const SystemConfig& cfg) {
        const JointCodebook cb = build_codebook(cfg);
        if (grid == "psi") return snap(value, cb.psi_grid);
        if (grid == "t") return snap(value, cb.t_grid);
        throw std::invalid_argument("grid must be 'psi' or 't'");
      },
      py::arg("value"), py::arg("grid"), py::arg("cfg"));

  m.def(
      "search_angles",
      [](double theta0, double alpha, int slots, const SystemConfig& cfg) {
        return search_angles(plan_tracking(theta0, alpha, slots, cfg));
      },
      py::arg("theta0"), py::arg("alpha"), py::arg("slots"), py::arg("cfg"));

  m.def(
      "track",
      [](double theta_r, double theta0, double alpha, int slots, double noise_std, std::uint64_t seed,
         bool compensation, int max_iter, double tol, const SystemConfig& cfg) {
        PathComponent path;
        path.direction = theta_r;
        const ChannelResponse ch = channel_response(path, SubcarrierGrid(cfg), cfg);
        const TrackingObservation obs = run_tracking(plan_tracking(theta0, alpha, slots, cfg), ch, noise_std, seed);
        const TrackingEstimate est = coarse_estimate(obs);
        py::dict d;
        d["l_hat"] = est.l_hat;
        d["m_hat"] = est.m_hat;
        d["theta_coarse"] = est.theta_hat;
        d["y"] = obs.y;
        if (compensation) {
          RefineOptions opts;
          opts.max_iter = max_iter;
          opts.tol = tol;
          const RefineResult res = refine(build_cpr_problem(obs), est.theta_hat, opts);
          d["theta_refined"] = res.state.theta;
          d["g"] = res.state.g;
          d["iterations"] = res.iterations;
          d["converged"] = res.converged;
        }
        return d;
      },
      py::arg("theta_r"), py::arg("theta0"), py::arg("alpha"), py::arg("slots"), py::arg("noise_std") = 0.0,
      py::arg("seed") = 0, py::arg("compensation") = true, py::arg("max_iter") = RefineOptions{}.max_iter,
      py::arg("tol") = RefineOptions{}.tol, py::arg("cfg") = reference_system());

  m.def("scenario_keys", &scenario_keys);
  m.def(
      "sweep",
      [](const py::dict& overrides, bool with_records) {
        const ScenarioConfig scn = scenario_from(overrides);
        MetricsReport report;
        {
          py::gil_scoped_release release;
          report = sweep(scn);
        }
        py::list points;
        for (std::size_t i = 0; i < report.points.size(); ++i) {
          py::dict p = point_dict(report.points[i]);
          if (with_records) {
            py::list recs;
            for (const auto& r : report.records[i]) recs.append(record_dict(r));
            p["trial_records"] = recs;
          }
          points.append(p);
        }
        return points;
      },
      py::arg("overrides"), py::arg("with_records") = false,
      "Runs a Monte Carlo sweep; `overrides` maps scenario keys to values.");
  m.def(
      "nmse",
      [](const std::vector<double>& estimates, const std::vector<double>& truths) {
        const NmseSummary s = nmse_of(estimates, truths);
        return py::make_tuple(s.linear, s.db, s.used, s.excluded);
      },
      py::arg("estimates"), py::arg("truths"));
}
