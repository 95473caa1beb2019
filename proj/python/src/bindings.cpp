#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lsm/commands.hpp"
#include "lsm/config.hpp"
#include "lsm/cost_model.hpp"
#include "lsm/errors.hpp"
#include "lsm/sweep.hpp"

namespace py = pybind11;
using namespace lsm;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

KernelSpec kernel_spec(const std::string& order, double tau_fall, double tau_rise, double delay_ms, double dt_ms) {
  KernelSpec k;
  k.order = parse_synapse_order(order);
  k.tau_fall_ms = tau_fall;
  k.tau_rise_ms = tau_rise;
  k.delay_ms = delay_ms;
  k.dt_ms = dt_ms;
  return k;
}

ReadoutConfig readout_config(double k, double w_lim, double ridge, std::size_t n_classes) {
  ReadoutConfig c;
  c.k = k;
  c.w_lim = w_lim;
  c.ridge = ridge;
  c.n_classes = n_classes;
  c.validate();
  return c;
}

py::dict point_dict(const PointResult& p) {
  py::dict d;
  d["alpha_in"] = p.alpha_in;
  d["alpha_res"] = p.alpha_res;
  d["activity"] = p.activity;
  d["mean_error"] = p.mean_error;
  d["std_error"] = p.std_error;
  d["fold_errors"] = p.fold_errors;
  d["failure"] = p.failure;
  return d;
}

// Dataset and topology resolved once from a run configuration.
class Session {
 public:
  explicit Session(const std::string& config_json)
      : config_(parse_run_config(nlohmann::json::parse(config_json))),
        data_(cli::resolve_dataset(config_)),
        topology_(cli::resolve_topology(config_)) {}

  py::dict evaluate(double alpha_in, double alpha_res) const {
    PointDetail detail;
    {
      py::gil_scoped_release release;
      detail = evaluate_point(experiment(), config_.sweep_config(), ScalingPoint{alpha_in, alpha_res}, false);
    }
    return point_dict(detail.result);
  }

  py::dict sweep() const {
    SweepGrid grid;
    {
      py::gil_scoped_release release;
      grid = grid_sweep(experiment(), config_.sweep_config());
    }
    py::dict d;
    py::list points;
    for (const auto& p : grid.points) points.append(point_dict(p));
    d["alpha_in_values"] = grid.alpha_in_values;
    d["alpha_res_values"] = grid.alpha_res_values;
    d["points"] = points;
    d["csv"] = grid_csv(grid);
    d["analysis"] = to_py(analysis_json(grid, config_.band_size));
    return d;
  }

  py::dict simulate(double alpha_in, double alpha_res, std::size_t sample) const {
    if (sample >= data_.samples.size()) throw py::index_error("sample index out of range");
    const ReservoirSimulator sim(topology_.graph, topology_.wiring, config_.kernel, config_.lif);
    std::vector<double> membrane;
    const auto record = sim.run(ScalingPoint{alpha_in, alpha_res}, data_.samples[sample], &membrane);
    py::dict d;
    d["raster"] = record.raster;
    d["rates"] = record.rates;
    d["total_spikes"] = record.total_spikes;
    d["duration_ms"] = record.duration_ms;
    d["membrane"] = membrane;
    return d;
  }

  std::vector<int> labels() const { return data_.labels(); }
  std::size_t n_samples() const { return data_.samples.size(); }

  py::list samples() const {
    py::list out;
    for (const auto& s : data_.samples) {
      std::vector<std::uint32_t> channels;
      std::vector<double> times;
      for (const auto& e : s.spikes) {
        channels.push_back(e.channel);
        times.push_back(e.time_ms);
      }
      py::dict d;
      d["label"] = s.label;
      d["duration_ms"] = s.duration_ms;
      d["channels"] = channels;
      d["times_ms"] = times;
      out.append(d);
    }
    return out;
  }

  py::object topology() const { return to_py(topology_to_json(topology_)); }
  py::object config() const { return to_py(config_echo(config_)); }

 private:
  Experiment experiment() const { return Experiment{data_, topology_}; }

  RunConfig config_;
  Dataset data_;
  Topology topology_;
};

}  // namespace

PYBIND11_MODULE(_lsm, m) {
  m.doc() = "Liquid state machine simulator core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<SingularSystemError>(m, "SingularSystemError", PyExc_ArithmeticError);

  m.def(
      "kernel",
      [](const std::string& order, double tau_fall, double tau_rise, double delay_ms, double dt_ms) {
        const auto k = discretize_kernel(kernel_spec(order, tau_fall, tau_rise, delay_ms, dt_ms));
        py::dict d;
        d["samples"] = k.samples;
        d["charge"] = k.charge;
        d["delay_steps"] = k.delay_steps;
        d["dt_ms"] = k.dt_ms;
        return d;
      },
      py::arg("order"), py::arg("tau_fall_ms") = 8.0, py::arg("tau_rise_ms") = 4.0, py::arg("delay_ms") = 1.0,
      py::arg("dt_ms") = 1.0);

  m.def(
      "filter_response",
      [](const std::string& order, const std::vector<double>& impulses, double tau_fall, double tau_rise,
         double delay_ms, double dt_ms) {
        SynapticFilter f(discretize_kernel(kernel_spec(order, tau_fall, tau_rise, delay_ms, dt_ms)));
        std::vector<double> out;
        out.reserve(impulses.size());
        for (double x : impulses) {
          if (x != 0.0) f.inject(x);
          out.push_back(f.step());
        }
        return out;
      },
      "Filter output per step for impulses injected before each step.", py::arg("order"), py::arg("impulses"),
      py::arg("tau_fall_ms") = 8.0, py::arg("tau_rise_ms") = 4.0, py::arg("delay_ms") = 1.0, py::arg("dt_ms") = 1.0);

  m.def(
      "step_neuron",
      [](double v, double i_syn, std::size_t refractory_remaining) {
        const auto s = step_neuron(v, i_syn, LifParams{}, refractory_remaining);
        return py::make_tuple(s.v, s.spiked, s.refractory_remaining);
      },
      py::arg("v"), py::arg("i_syn"), py::arg("refractory_remaining") = 0);

  m.def(
      "solve_readout",
      [](const Eigen::MatrixXd& responses, const std::vector<int>& labels, double k, double w_lim, double ridge,
         std::size_t n_classes, bool clip) -> Eigen::MatrixXd {
        const auto c = readout_config(k, w_lim, ridge, n_classes);
        if (clip) return train_readout(responses, labels, c).w;
        return solve_readout(responses, labels, c);
      },
      py::arg("responses"), py::arg("labels"), py::arg("k") = 1000.0, py::arg("w_lim") = 8.0,
      py::arg("ridge") = 1e-6, py::arg("n_classes") = 10, py::arg("clip") = true);

  m.def(
      "kfold_evaluate",
      [](const Eigen::MatrixXd& responses, const std::vector<int>& labels, std::size_t n_folds, std::uint64_t seed,
         double k, double w_lim, double ridge, std::size_t n_classes) {
        const auto r = kfold_evaluate(responses, labels, readout_config(k, w_lim, ridge, n_classes), n_folds, seed);
        py::dict d;
        d["fold_accuracy"] = r.fold_accuracy;
        d["mean_accuracy"] = r.mean_accuracy;
        d["std_accuracy"] = r.std_accuracy;
        d["confusion"] = r.confusion;
        return d;
      },
      py::arg("responses"), py::arg("labels"), py::arg("n_folds") = 5, py::arg("seed") = 1, py::arg("k") = 1000.0,
      py::arg("w_lim") = 8.0, py::arg("ridge") = 1e-6, py::arg("n_classes") = 10);

  m.def(
      "cost", [](const std::string& order) { return to_py(cost_report_json(estimate(parse_synapse_order(order)))); },
      py::arg("order") = "zeroth");
  m.def(
      "cost_table", [](const std::string& order) { return cost_report_table(estimate(parse_synapse_order(order))); },
      py::arg("order") = "zeroth");

  m.def("analyze_grid_csv", [](const std::string& text, std::size_t band_size) {
    return to_py(analysis_json(grid_from_csv(text), band_size));
  }, py::arg("text"), py::arg("band_size") = 10);

  py::class_<Session>(m, "Session")
      .def(py::init<const std::string&>(), py::arg("config_json"))
      .def("evaluate", &Session::evaluate, py::arg("alpha_in"), py::arg("alpha_res"))
      .def("sweep", &Session::sweep)
      .def("simulate", &Session::simulate, py::arg("alpha_in"), py::arg("alpha_res"), py::arg("sample") = 0)
      .def("labels", &Session::labels)
      .def("samples", &Session::samples)
      .def("topology", &Session::topology)
      .def("config", &Session::config)
      .def_property_readonly("n_samples", &Session::n_samples);
}
