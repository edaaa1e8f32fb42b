#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pauc/cli.hpp"
#include "pauc/covariance.hpp"
#include "pauc/inference.hpp"
#include "pauc/io.hpp"
#include "pauc/simulation.hpp"

namespace py = pybind11;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace {

// Rows are subjects, columns are markers.
pauc::PairedSample to_paired(const RowMatrix& m) {
  std::vector<pauc::Sample> cols;
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    std::vector<double> v(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) v[static_cast<std::size_t>(r)] = m(r, i);
    cols.emplace_back(std::move(v));
  }
  if (cols.empty()) throw std::invalid_argument("no marker columns");
  return pauc::PairedSample(std::move(cols));
}

pauc::DiagnosticSample to_sample(const RowMatrix& xi, const RowMatrix& eta) {
  return pauc::DiagnosticSample(to_paired(xi), to_paired(eta));
}

std::vector<double> cuts(const std::vector<pauc::ExtendedReal>& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.to_double());
  return out;
}

py::dict estimate_dict(const pauc::PaucEstimate& e) {
  py::dict d;
  d["theta"] = e.theta;
  d["lower_cuts"] = cuts(e.lower_cuts);
  d["upper_cuts"] = cuts(e.upper_cuts);
  return d;
}

pauc::ContrastMatrix contrast_arg(const Eigen::MatrixXd& rows, std::vector<std::string> labels) {
  return pauc::custom(rows, std::move(labels));
}

py::tuple contrast_tuple(const pauc::ContrastMatrix& c) { return py::make_tuple(c.rows(), c.labels()); }

// Library exceptions that carry exit codes map onto ValueError like the rest.
void translate(std::exception_ptr p) {
  try {
    if (p) std::rethrow_exception(p);
  } catch (const pauc::DataError& e) {
    PyErr_SetString(PyExc_ValueError, e.what());
  } catch (const pauc::UsageError& e) {
    PyErr_SetString(PyExc_ValueError, e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Partial-AUC multiple contrast tests";
  py::register_exception_translator(&translate);

  m.def("estimate_pauc",
        [](const RowMatrix& xi, const RowMatrix& eta, double p, double q) {
          return estimate_dict(pauc::estimate_pauc(to_sample(xi, eta), pauc::TrimSpec(p, q)));
        },
        py::arg("xi"), py::arg("eta"), py::arg("p") = 1.0, py::arg("q") = 0.0);
  m.def("estimate_pauc_trimmed_mw",
        [](const RowMatrix& xi, const RowMatrix& eta, double p, double q) {
          return estimate_dict(
              pauc::estimate_pauc_trimmed_mw(to_sample(xi, eta), pauc::TrimSpec(p, q)));
        },
        py::arg("xi"), py::arg("eta"), py::arg("p") = 1.0, py::arg("q") = 0.0);
  m.def("estimate_covariance",
        [](const RowMatrix& xi, const RowMatrix& eta, double p, double q, bool independent) {
          const auto data = to_sample(xi, eta);
          const pauc::TrimSpec trim(p, q);
          return pauc::estimate_covariance(data, trim, pauc::estimate_pauc(data, trim), independent)
              .sigma;
        },
        py::arg("xi"), py::arg("eta"), py::arg("p") = 1.0, py::arg("q") = 0.0,
        py::arg("assume_independent_groups") = true);
  m.def("true_pauc",
        [](const std::string& f_kind, double f_mu, double f_sigma, const std::string& g_kind,
           double g_mu, double g_sigma, double p, double q, int resolution) {
          const pauc::MarginalSpec f(pauc::MarginalSpec::parse_kind(f_kind), f_mu, f_sigma);
          const pauc::MarginalSpec g(pauc::MarginalSpec::parse_kind(g_kind), g_mu, g_sigma);
          return pauc::true_pauc(f, g, pauc::TrimSpec(p, q), resolution);
        },
        py::arg("f_kind"), py::arg("f_mu"), py::arg("f_sigma"), py::arg("g_kind"), py::arg("g_mu"),
        py::arg("g_sigma"), py::arg("p") = 1.0, py::arg("q") = 0.0, py::arg("resolution") = 200000);

  m.def("tukey", [](std::size_t k) { return contrast_tuple(pauc::tukey(k)); });
  m.def("dunnett", [](std::size_t k, std::size_t ref) { return contrast_tuple(pauc::dunnett(k, ref)); },
        py::arg("kappa"), py::arg("reference") = 0);
  m.def("interaction",
        [](std::size_t a, std::size_t b) { return contrast_tuple(pauc::interaction(a, b)); });

  m.def("run_mct",
        [](const RowMatrix& xi, const RowMatrix& eta, const Eigen::MatrixXd& contrast,
           std::vector<std::string> labels, double p, double q, double delta, std::size_t reps,
           std::uint64_t seed, unsigned workers, bool independent) {
          const auto c = contrast_arg(contrast, std::move(labels));
          pauc::MctOptions opts;
          opts.delta = delta;
          opts.bootstrap_reps = reps;
          opts.seed = seed;
          opts.workers = workers;
          opts.assume_independent_groups = independent;
          const pauc::TrimSpec trim(p, q);
          pauc::MctResult res;
          {
            py::gil_scoped_release release;
            res = pauc::run_mct(to_sample(xi, eta), c, trim, opts);
          }
          return pauc::mct_result_to_json(res, c, trim).dump();
        },
        py::arg("xi"), py::arg("eta"), py::arg("contrast"), py::arg("labels") = std::vector<std::string>{},
        py::arg("p") = 1.0, py::arg("q") = 0.0, py::arg("delta") = 0.05,
        py::arg("bootstrap_reps") = 2000, py::arg("seed") = 1, py::arg("workers") = 1,
        py::arg("assume_independent_groups") = true);

  m.def("holm_adjust", [](const std::vector<double>& p) { return pauc::holm_adjust(p); });

  m.def("spearman_to_pearson", [](const Eigen::MatrixXd& s) {
    const auto conv = pauc::spearman_to_pearson(s);
    return py::make_tuple(conv.pearson, conv.repaired, conv.min_eigenvalue);
  });

  m.def("preset", [](const std::string& name) { return pauc::preset_json(name).dump(); });

  m.def("run_plan",
        [](const std::string& plan_json, unsigned workers) {
          const auto plan = pauc::plan_from_json(nlohmann::json::parse(plan_json));
          std::vector<pauc::PlanResult> results;
          {
            py::gil_scoped_release release;
            results = pauc::run_plan(plan, workers);
          }
          nlohmann::json out = nlohmann::json::array();
          for (const auto& r : results) out.push_back(pauc::experiment_report_to_json(r.report));
          return out.dump();
        },
        py::arg("plan_json"), py::arg("workers") = 1);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    std::vector<std::string> argv{"pauc"};
    argv.insert(argv.end(), args.begin(), args.end());
    const int code = pauc::run_cli(argv, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
