#include "linbandit/experiments.hpp"
#include "linbandit/simulation.hpp"
#include "linbandit/statistics.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
namespace lb = linbandit;

namespace {

lb::ContextRound make_round(const lb::Matrix& contexts, const std::vector<bool>& available) {
  const auto k = static_cast<std::size_t>(contexts.cols());
  if (!available.empty() && available.size() != k) {
    throw lb::DimensionError("available mask must have one entry per column");
  }
  lb::ContextRound r(contexts.rows(), k);
  for (std::size_t a = 0; a < k; ++a) {
    if (available.empty() || available[a]) r.set(a, contexts.col(static_cast<Eigen::Index>(a)));
  }
  return r;
}

lb::SufficientStats make_stats(const lb::RowMatrix& x, const lb::Vector& r) {
  if (x.rows() != r.size()) throw lb::DimensionError("contexts and rewards differ in length");
  lb::SufficientStats s(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) s.update(x.row(i).transpose(), r(i));
  return s;
}

py::dict table_to_dict(const lb::ResultTable& t) {
  py::dict d;
  d["experiment"] = t.experiment;
  d["csv"] = lb::emit_csv(t.rows);
  d["summary_json"] = lb::emit_summary_json(t);
  d["curves_csv"] = lb::emit_curves_csv(t.experiment, t.curves);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Linear contextual bandit simulation core";

  py::register_exception<lb::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<lb::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "two_bridge_rounds",
      [](std::int64_t horizon, std::int64_t rounds, std::uint64_t seed) {
        lb::TwoBridgeConfig cfg;
        cfg.horizon = horizon;
        cfg.validate();
        lb::Rng rng(seed);
        std::vector<std::string> kinds;
        kinds.reserve(static_cast<std::size_t>(rounds));
        lb::ContextRound r;
        for (std::int64_t t = 1; t <= rounds; ++t) {
          lb::sample_two_bridge_round(cfg, rng, t, r);
          kinds.emplace_back(lb::to_string(*r.kind));
        }
        return kinds;
      },
      py::arg("horizon"), py::arg("rounds"), py::arg("seed"),
      "Round kinds ('A', 'B' or 'C') of a seeded two-bridge sequence.");

  m.def("ols_estimate",
        [](const lb::RowMatrix& x, const lb::Vector& r) { return lb::ols_estimate(make_stats(x, r)); },
        py::arg("contexts"), py::arg("rewards"), "Minimum-norm least-squares estimate.");

  m.def(
      "bayes_posterior_mean",
      [](const lb::RowMatrix& x, const lb::Vector& r, const lb::Vector& prior_mean, const lb::Matrix& prior_cov) {
        return lb::bayes_posterior_mean(make_stats(x, r), prior_mean, prior_cov);
      },
      py::arg("contexts"), py::arg("rewards"), py::arg("prior_mean"), py::arg("prior_cov"));

  m.def("min_eigenvalue", &lb::min_eigenvalue, py::arg("matrix"));

  m.def(
      "interval_width",
      [](std::int64_t observations, double theta_bound, double context_bound, double c0,
         std::int64_t horizon, Eigen::Index dim) {
        lb::LinUCBParams p;
        p.theta_bound = theta_bound;
        p.context_bound = context_bound;
        p.confidence_scale = c0;
        p.horizon = horizon;
        p.validate();
        return lb::interval_width(observations, p, dim);
      },
      py::arg("observations"), py::arg("theta_bound"), py::arg("context_bound"), py::arg("c0"),
      py::arg("horizon"), py::arg("dim"));

  m.def(
      "linucb_select",
      [](const lb::Matrix& contexts, const lb::RowMatrix& x, const lb::Vector& r, double width,
         double ridge, const std::vector<bool>& available) {
        return lb::linucb_select(make_round(contexts, available), make_stats(x, r), width, ridge);
      },
      py::arg("contexts"), py::arg("history_contexts"), py::arg("history_rewards"), py::arg("width"),
      py::arg("ridge") = 0.0, py::arg("available") = std::vector<bool>{},
      "Index of the LinUCB choice; `contexts` holds one column per action.");

  m.def(
      "greedy_select",
      [](const lb::Matrix& contexts, const lb::Vector& estimate, const std::vector<bool>& available) {
        return lb::greedy_select(make_round(contexts, available), estimate);
      },
      py::arg("contexts"), py::arg("estimate"), py::arg("available") = std::vector<bool>{});

  m.def("suggested_batch_size",
        py::overload_cast<double, double, Eigen::Index, std::int64_t, double>(&lb::suggested_batch_size),
        py::arg("rho"), py::arg("context_radius"), py::arg("dim"), py::arg("horizon"), py::arg("delta"));

  m.def(
      "simulation_weights",
      [](const lb::RowMatrix& batch, const lb::Vector& x) {
        const auto w = lb::simulation_weights(batch, x);
        return py::make_tuple(w.w, w.residual_var);
      },
      py::arg("batch_contexts"), py::arg("x"), "Returns (w, residual_var).");

  m.def(
      "ks_two_sample",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = lb::ks_two_sample(a, b);
        return py::make_tuple(r.statistic, r.p_value);
      },
      py::arg("a"), py::arg("b"));

  m.def("list_experiments", []() {
    std::vector<std::string> names;
    for (auto k : lb::all_experiments()) names.emplace_back(lb::to_string(k));
    return names;
  });

  m.def(
      "default_config",
      [](const std::string& name) {
        const auto kind = lb::parse_experiment_kind(name);
        if (!kind) throw lb::ConfigError("experiment", "unknown experiment '" + name + "'");
        return lb::render_config(lb::ExperimentConfig::defaults_for(*kind));
      },
      py::arg("experiment"));

  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        const auto cfg = lb::parse_config(config_text);
        lb::ResultTable table;
        {
          py::gil_scoped_release release;
          table = lb::run_experiment(cfg);
        }
        return table_to_dict(table);
      },
      py::arg("config_text"),
      "Runs a config given as text; returns a dict with csv, summary_json and curves_csv.");

  m.def(
      "verify_simulation",
      [](const std::string& config_text) {
        const auto cfg = config_text.empty()
                             ? lb::ExperimentConfig::defaults_for(lb::ExperimentKind::SimulationVerify)
                             : lb::parse_config(config_text);
        py::gil_scoped_release release;
        return lb::emit_simulation_csv(lb::verify_simulation(cfg));
      },
      py::arg("config_text") = std::string());
}
