// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings: feasible sets and their oracles, a few problems, the
// stochastic FW drivers, quantization, the distributed simulator and the
// experiment harness.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sfw/bench.hpp"
#include "sfw/config.hpp"
#include "sfw/constraints.hpp"
#include "sfw/distsim.hpp"
#include "sfw/problems.hpp"
#include "sfw/quantize.hpp"
#include "sfw/set_function.hpp"
#include "sfw/solvers.hpp"

namespace py = pybind11;

namespace {

py::dict TraceDict(const sfw::SolveTrace& tr) {
  std::vector<int> t;
  std::vector<double> objective, gap, est;
  std::vector<std::int64_t> calls, bits;
  for (const auto& r : tr.records) {
    t.push_back(r.t);
    objective.push_back(r.objective);
    gap.push_back(r.fw_gap);
    est.push_back(r.est_error);
    calls.push_back(r.oracle_calls);
    bits.push_back(r.cum_bits);
  }
  py::dict d;
  d["t"] = t;
  d["objective"] = objective;
  d["fw_gap"] = gap;
  d["est_error"] = est;
  d["oracle_calls"] = calls;
  d["cum_bits"] = bits;
  d["output"] = tr.output;
  d["output_index"] = tr.output_index;
  d["samples"] = tr.samples;
  d["all_feasible"] = tr.all_feasible;
  return d;
}

sfw::Schedule MakeSchedule(const std::string& name, int T) {
  if (name == "convex") return sfw::Schedule::Convex(T);
  if (name == "nonconvex") return sfw::Schedule::NonConvex(T);
  if (name == "drmax") return sfw::Schedule::DRMax(T);
  sfw::Fail(sfw::Errc::kInvalidArgument, "unknown schedule '" + name + "'");
}

sfw::SolveOptions Options(bool log_gap, bool log_est_error) {
  sfw::SolveOptions o;
  o.log_gap = log_gap;
  o.log_est_error = log_est_error;
  return o;
}

}  // namespace

PYBIND11_MODULE(_sfw, m) {
  m.doc() = "Stochastic Frank-Wolfe toolkit";

  static py::handle error = py::exception<sfw::Error>(m, "SfwError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sfw::Error& e) {
      py::set_error(error, (std::string(sfw::ErrcName(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<sfw::PartitionMatroid>(m, "PartitionMatroid")
      .def(py::init<int, std::vector<std::vector<int>>, std::vector<int>>(), py::arg("ground_size"),
           py::arg("blocks"), py::arg("budgets"))
      .def("rank", &sfw::PartitionMatroid::rank)
      .def("is_base", &sfw::PartitionMatroid::IsBase)
      .def("count_bases", &sfw::PartitionMatroid::CountBases);

  py::class_<sfw::FeasibleSet>(m, "FeasibleSet")
      .def_static("l1_ball", &sfw::FeasibleSet::MakeL1Ball, py::arg("dim"), py::arg("radius") = 1.0)
      .def_static("box", &sfw::FeasibleSet::MakeBox, py::arg("lower"), py::arg("upper"))
      .def_static("unit_box", &sfw::FeasibleSet::MakeUnitBox, py::arg("dim"), py::arg("upper") = 1.0)
      .def_static("simplex", &sfw::FeasibleSet::MakeSimplex, py::arg("dim"), py::arg("scale") = 1.0)
      .def_static("matroid_polytope", &sfw::FeasibleSet::MakeMatroidPolytope, py::arg("matroid"))
      .def_static("nuclear_ball", &sfw::FeasibleSet::MakeNuclearBall, py::arg("rows"), py::arg("cols"),
                  py::arg("radius") = 1.0)
      .def_property_readonly("dim", &sfw::FeasibleSet::dim)
      .def_property_readonly("name", &sfw::FeasibleSet::name)
      .def("__repr__", [](const sfw::FeasibleSet& s) { return "<FeasibleSet " + s.name() + ">"; });

  m.def("lmo_min", &sfw::LmoMin, py::arg("set"), py::arg("g"));
  m.def("lmo_max", &sfw::LmoMax, py::arg("set"), py::arg("g"));
  m.def("contains", &sfw::Contains, py::arg("set"), py::arg("x"), py::arg("tol") = sfw::kMembershipTol);
  m.def("diameter", &sfw::Diameter, py::arg("set"));
  m.def("default_start", &sfw::DefaultStart, py::arg("set"));
  m.def("fw_gap", &sfw::FwGap, py::arg("grad"), py::arg("set"), py::arg("x"));

  py::class_<sfw::RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
      .def("split", py::overload_cast<std::uint64_t>(&sfw::RngStream::Split, py::const_))
      .def("uniform", &sfw::RngStream::Uniform)
      .def("normal", &sfw::RngStream::Normal);

  py::class_<sfw::StochasticProblem, std::shared_ptr<sfw::StochasticProblem>>(m, "Problem")
      .def_property_readonly("name", &sfw::StochasticProblem::name)
      .def_property_readonly("dim", &sfw::StochasticProblem::dim)
      .def_property_readonly("num_components", &sfw::StochasticProblem::num_components)
      .def("value", &sfw::StochasticProblem::ExactValue, py::arg("x"))
      .def("gradient", &sfw::StochasticProblem::ExactGradient, py::arg("x"));

  m.def(
      "quadratic",
      [](const sfw::Vector& target, double sigma) -> std::shared_ptr<sfw::StochasticProblem> {
        return std::make_shared<sfw::QuadraticProblem>(target, sigma);
      },
      py::arg("target"), py::arg("sigma") = 0.0);
  m.def(
      "logistic_synthetic",
      [](int n, int d, double flip, std::uint64_t seed) -> std::shared_ptr<sfw::StochasticProblem> {
        sfw::RngStream rng(seed, 0);
        return sfw::LogisticL1Problem::Synthetic(n, d, flip, rng);
      },
      py::arg("n"), py::arg("d"), py::arg("flip") = 0.1, py::arg("seed") = 0);
  m.def(
      "build_problem",
      [](const std::string& name, const std::map<std::string, std::string>& params, std::uint64_t seed) {
        return std::const_pointer_cast<sfw::StochasticProblem>(sfw::BuildProblem({name, params, seed}));
      },
      py::arg("name"), py::arg("params") = std::map<std::string, std::string>{}, py::arg("seed") = 0);

  m.def(
      "one_sfw",
      [](const sfw::StochasticProblem& p, const sfw::FeasibleSet& set, const std::string& schedule, int T,
         std::uint64_t seed, bool grad_diff, bool log_gap, bool log_est_error) {
        const auto option = grad_diff ? sfw::HessianOption::kGradDiff : sfw::HessianOption::kExactHessian;
        return TraceDict(sfw::OneSfw(p, set, MakeSchedule(schedule, T), option, sfw::RngStream(seed, 0),
                                     Options(log_gap, log_est_error)));
      },
      py::arg("problem"), py::arg("set"), py::arg("schedule") = "convex", py::arg("T") = 100,
      py::arg("seed") = 0, py::arg("grad_diff") = false, py::arg("log_gap") = false,
      py::arg("log_est_error") = false);
  m.def(
      "oblivious_sfw",
      [](const sfw::StochasticProblem& p, const sfw::FeasibleSet& set, const std::string& schedule, int T,
         std::uint64_t seed, bool log_gap) {
        return TraceDict(sfw::ObliviousSfw(p, set, MakeSchedule(schedule, T), sfw::RngStream(seed, 0),
                                           Options(log_gap, false)));
      },
      py::arg("problem"), py::arg("set"), py::arg("schedule") = "convex", py::arg("T") = 100,
      py::arg("seed") = 0, py::arg("log_gap") = false);

  m.def("level_bits", &sfw::LevelBits, py::arg("s"));
  m.def("message_bits", py::overload_cast<int, std::uint32_t>(&sfw::MessageBits), py::arg("d"), py::arg("s"));
  m.def("exact_variance", &sfw::ExactVariance, py::arg("g"), py::arg("s"));
  m.def(
      "quantize",
      [](const sfw::Vector& g, std::uint32_t s, std::uint64_t seed) {
        sfw::RngStream rng(seed, 0);
        const auto msg = sfw::EncodePartition(g, s, rng);
        py::dict d;
        d["levels"] = msg.levels;
        d["signs"] = msg.signs;
        d["inf_norm"] = msg.inf_norm;
        d["bits"] = msg.bits;
        d["decoded"] = sfw::Decode(msg);
        return d;
      },
      py::arg("g"), py::arg("s"), py::arg("seed") = 0);

  m.def(
      "run_qfw",
      [](const sfw::StochasticProblem& p, const sfw::FeasibleSet& set, const std::string& setting, int M, int T,
         std::uint64_t seed, bool quantized) {
        const std::int64_t N = p.num_components();
        auto cfg = sfw::ScheduleFromTheorem(sfw::ParseQfwSetting(setting), N > 0 ? N / M : 0, M, p.dim(), T);
        if (!quantized) sfw::MakeUnquantized(cfg);
        const auto res = sfw::RunQfw(p, set, cfg, sfw::RngStream(seed, 0));
        py::dict d = TraceDict(res.trace);
        d["bits_up"] = res.ledger.up;
        d["bits_down"] = res.ledger.down;
        return d;
      },
      py::arg("problem"), py::arg("set"), py::arg("setting") = "finite_convex", py::arg("M") = 1,
      py::arg("T") = 63, py::arg("seed") = 0, py::arg("quantized") = true);

  m.def(
      "brute_force_opt",
      [](const std::string& name, const std::map<std::string, std::string>& params, std::uint64_t seed,
         const sfw::PartitionMatroid& matroid) {
        const auto f = sfw::BuildSetFunction({name, params, seed});
        const auto r = sfw::BruteForceOpt(*f, matroid);
        return py::make_tuple(r.opt, r.set);
      },
      py::arg("name"), py::arg("params"), py::arg("seed"), py::arg("matroid"));

  m.def(
      "run_experiment",
      [](const std::string& config_text, const std::string& command, const std::vector<std::string>& overrides) {
        const auto cfg = sfw::ParseConfigString(config_text, overrides);
        const auto res = sfw::RunExperiment(cfg, command);
        py::list rows;
        for (const auto& r : res.rows) {
          py::dict d;
          d["seed"] = r.seed;
          d["variant"] = r.variant;
          d["ok"] = r.ok;
          d["error"] = r.error;
          d["rows"] = r.rows;
          d["final_objective"] = r.final_objective;
          d["final_gap"] = r.final_gap;
          d["opt_ratio"] = r.opt_ratio;
          d["cum_bits"] = r.cum_bits;
          d["bits_ratio"] = r.bits_ratio;
          d["trace_path"] = r.trace_path;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config_text"), py::arg("command"), py::arg("overrides") = std::vector<std::string>{});
}
