#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "olrg/engine.hpp"
#include "olrg/train.hpp"
#include "olrg/verify.hpp"

namespace py = pybind11;
using namespace olrg;

namespace {

model::RelevantSet set_from_parts(int n_sites, const Matrix& rho,
                                  const Matrix& ham, const Matrix& obs,
                                  const std::vector<Matrix>& boundary,
                                  bool is_virtual) {
  model::RelevantSet s;
  s.n_sites = n_sites;
  s.rho = {rho, true};
  s.hamiltonian = {ham, true};
  s.observable = {obs, true};
  for (const auto& b : boundary) s.boundary.push_back({b, true});
  s.is_virtual = is_virtual;
  return s;
}

tobc::TOBCIndex index_from_parts(const std::vector<int>& ids,
                                 const std::vector<double>& times,
                                 const std::vector<int>& signs) {
  tobc::TOBCIndex idx;
  idx.order = static_cast<int>(ids.size());
  idx.boundary_ids = ids;
  idx.times = times;
  idx.signs = signs;
  return idx;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Operator-learning renormalization group core";

  // --- operator algebra -----------------------------------------------------
  m.def(
      "pauli",
      [](const std::string& label) {
        if (label.size() != 1) throw std::invalid_argument("bad Pauli label");
        return qops::pauli(label[0]).data;
      },
      py::arg("label"));
  m.def(
      "kron",
      [](const std::vector<Matrix>& ops) {
        std::vector<qops::DenseOperator> dense;
        for (const auto& o : ops) dense.push_back({o, false});
        return qops::kron(dense).data;
      },
      py::arg("ops"));
  m.def(
      "adjoint_apply",
      [](const Matrix& a, int sigma, const Matrix& b) {
        return qops::adjoint_apply(a, sigma, b);
      },
      py::arg("a"), py::arg("sigma"), py::arg("b"));
  m.def(
      "thin_qr_isometry",
      [](const Matrix& x) { return qops::thin_qr_isometry(x).data; },
      py::arg("m"));

  // --- model ------------------------------------------------------------------
  m.def(
      "tfim_hamiltonian",
      [](int n, double h) { return model::tfim_hamiltonian(n, h).data; },
      py::arg("n"), py::arg("h"));
  m.def(
      "two_point_observable",
      [](int n, int a, int b) { return model::two_point_observable(n, a, b).data; },
      py::arg("n"), py::arg("a"), py::arg("b"));

  py::class_<model::RelevantSet>(m, "RelevantSet")
      .def_property_readonly("n_sites",
                             [](const model::RelevantSet& s) { return s.n_sites; })
      .def_property_readonly("dim",
                             [](const model::RelevantSet& s) { return s.dim(); })
      .def_property_readonly(
          "rho", [](const model::RelevantSet& s) { return s.rho.data; })
      .def_property_readonly(
          "hamiltonian",
          [](const model::RelevantSet& s) { return s.hamiltonian.data; })
      .def_property_readonly(
          "observable",
          [](const model::RelevantSet& s) { return s.observable.data; })
      .def_property_readonly("boundary",
                             [](const model::RelevantSet& s) {
                               std::vector<Matrix> out;
                               for (const auto& b : s.boundary)
                                 out.push_back(b.data);
                               return out;
                             })
      .def_property_readonly(
          "is_virtual", [](const model::RelevantSet& s) { return s.is_virtual; });

  m.def(
      "initial_set",
      [](int n, double h, int obs_a, int obs_b) {
        return model::initial_set(model::ModelSpec{h}, n, obs_a, obs_b);
      },
      py::arg("n"), py::arg("h") = 1.0, py::arg("obs_a") = 1,
      py::arg("obs_b") = 2);
  m.def(
      "grow_set",
      [](const model::RelevantSet& set, double h, int l) {
        return model::grow_set(model::ModelSpec{h}, set, l);
      },
      py::arg("set"), py::arg("h"), py::arg("l") = 1);
  m.def(
      "make_set", &set_from_parts, py::arg("n_sites"), py::arg("rho"),
      py::arg("hamiltonian"), py::arg("observable"), py::arg("boundary"),
      py::arg("is_virtual") = false);

  // --- dynamics ----------------------------------------------------------------
  m.def(
      "expm", [](const Matrix& h, double t) { return dynamics::expm(h, t); },
      py::arg("h"), py::arg("t"), "exp(-i t H) for Hermitian H");
  m.def(
      "heisenberg_evolve",
      [](const Matrix& h, const Matrix& a, double total_time, int checkpoints) {
        return dynamics::heisenberg_evolve(
            h, a, dynamics::Checkpoints::uniform(total_time, checkpoints), {});
      },
      py::arg("h"), py::arg("a"), py::arg("total_time"),
      py::arg("checkpoints"));

  // --- correlators ---------------------------------------------------------
  m.def(
      "eval_tobc",
      [](const model::RelevantSet& set, const std::vector<int>& ids,
         const std::vector<double>& times, const std::vector<int>& signs,
         double total_time) {
        return tobc::eval_tobc(set, index_from_parts(ids, times, signs),
                               total_time, {});
      },
      py::arg("set"), py::arg("boundary_ids"), py::arg("times"),
      py::arg("signs"), py::arg("total_time"));
  m.def(
      "loss_step",
      [](const model::RelevantSet& real_set,
         const model::RelevantSet& virtual_set, int order, int batch,
         double total_time, int checkpoints, std::uint64_t seed) {
        const auto grid =
            dynamics::Checkpoints::uniform(total_time, checkpoints);
        const auto indices = tobc::sample_mixed_orders(
            seed, order, batch, grid,
            static_cast<int>(real_set.boundary.size()));
        return tobc::loss_step(real_set, virtual_set, indices, total_time, {});
      },
      py::arg("real_set"), py::arg("virtual_set"), py::arg("order"),
      py::arg("batch"), py::arg("total_time"), py::arg("checkpoints") = 20,
      py::arg("seed") = 1);

  // --- oracles and verifiers -----------------------------------------------
  m.def("exact_expectation",
        [](int n, double h, int a, int b, double t) {
          return verify::exact_expectation(n, h, a, b, t);
        },
        py::arg("n"), py::arg("h"), py::arg("obs_a"), py::arg("obs_b"),
        py::arg("total_time"));
  m.def("check_telescoping",
        [](int n, int l, int q, double t, std::uint64_t seed) {
          const auto r = verify::check_telescoping(n, l, q, t, seed);
          return py::make_tuple(r.lhs, r.rhs, r.satisfied);
        },
        py::arg("n"), py::arg("l"), py::arg("q"), py::arg("total_time"),
        py::arg("seed"));
  m.def("check_rt_bound",
        [](int n, int l, double t, double perturbation, std::uint64_t seed) {
          const auto r = verify::check_rt_bound(n, l, t, perturbation, seed);
          return py::make_tuple(r.lhs, r.rhs, r.satisfied);
        },
        py::arg("n"), py::arg("l"), py::arg("total_time"),
        py::arg("perturbation"), py::arg("seed"));
  m.def("check_dyson_truncation",
        [](double t, int k_max, int m, double h, double coupling) {
          std::vector<std::pair<int, double>> rows;
          for (const auto& r :
               verify::check_dyson_truncation(t, k_max, m, h, coupling))
            rows.emplace_back(r.order, r.error);
          return rows;
        },
        py::arg("total_time"), py::arg("k_max"), py::arg("m"),
        py::arg("h") = 1.0, py::arg("coupling") = 1.0);
  m.def("pulse_duration_estimate", &hem::pulse_duration_estimate,
        py::arg("k"), py::arg("checkpoints"), py::arg("total_time"),
        py::arg("boundary_norm") = 1.0, py::arg("c_theta") = 1.0);
  m.def("shot_count_estimate", &hem::shot_count_estimate, py::arg("batch"),
        py::arg("growing_steps"), py::arg("shots_per_expectation"),
        py::arg("n_params"), py::arg("order"));

  // --- training --------------------------------------------------------------
  py::class_<train::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("order", &train::TrainConfig::order)
      .def_readwrite("tobc_batch", &train::TrainConfig::tobc_batch)
      .def_readwrite("checkpoints", &train::TrainConfig::checkpoints)
      .def_readwrite("total_time", &train::TrainConfig::total_time)
      .def_readwrite("h", &train::TrainConfig::h)
      .def_readwrite("start_n", &train::TrainConfig::start_n)
      .def_readwrite("target_n", &train::TrainConfig::target_n)
      .def_readwrite("grow_l", &train::TrainConfig::grow_l)
      .def_readwrite("epochs", &train::TrainConfig::epochs)
      .def_readwrite("learning_rate", &train::TrainConfig::learning_rate)
      .def_readwrite("seed", &train::TrainConfig::seed)
      .def_readwrite("moving_avg_window", &train::TrainConfig::moving_avg_window)
      .def_readwrite("depth", &train::TrainConfig::depth)
      .def_readwrite("width", &train::TrainConfig::width)
      .def_readwrite("noise_dim", &train::TrainConfig::noise_dim)
      .def_readwrite("ensemble_size", &train::TrainConfig::ensemble_size)
      .def_readwrite("substeps", &train::TrainConfig::substeps)
      .def_readwrite("identity_embedding",
                     &train::TrainConfig::identity_embedding)
      .def_property(
          "mode",
          [](const train::TrainConfig& c) {
            return c.mode == train::MapMode::omm ? "omm" : "hem";
          },
          [](train::TrainConfig& c, const std::string& mode) {
            if (mode == "omm")
              c.mode = train::MapMode::omm;
            else if (mode == "hem")
              c.mode = train::MapMode::hem;
            else
              throw std::invalid_argument("mode must be 'omm' or 'hem'");
          });

  m.def(
      "train",
      [](const train::TrainConfig& cfg) {
        const auto history = train::train(cfg);
        py::dict out;
        std::vector<double> totals;
        for (const auto& rec : history.epochs) totals.push_back(rec.total_loss);
        out["totals"] = totals;
        out["best_epoch"] = history.best_epoch;
        out["best_params"] = history.best_params;
        out["diverged"] = history.diverged;
        return out;
      },
      py::arg("config"));
  m.def(
      "predict",
      [](const train::TrainConfig& cfg, const std::vector<double>& theta) {
        return train::predict(cfg, theta);
      },
      py::arg("config"), py::arg("theta"));
  m.def("select_best_epoch", &train::select_best_epoch, py::arg("totals"),
        py::arg("window") = 10);
}
