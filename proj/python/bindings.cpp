#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cdr/assembler.hpp"
#include "cdr/characterization.hpp"
#include "cdr/cli.hpp"
#include "cdr/error.hpp"
#include "cdr/features.hpp"
#include "cdr/pca.hpp"
#include "cdr/recurrence_detector.hpp"
#include "cdr/variance_detector.hpp"

namespace py = pybind11;
using namespace cdr;

namespace {

std::optional<double> opt_z(double v) {
  return std::isnan(v) ? std::nullopt : std::optional<double>(v);
}

std::vector<std::optional<double>> as_list(const ZSeries& z) {
  std::vector<std::optional<double>> out;
  out.reserve(z.size());
  for (double v : z.z) out.push_back(opt_z(v));
  return out;
}

using Span = std::tuple<int, int>;

}  // namespace

PYBIND11_MODULE(cdr_anomaly, m) {
  m.doc() = "Anomaly detection and characterisation for gridded call-volume series";

  static py::exception<Error> base(m, "CdrError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), (std::string(to_string(e.category())) + ": " + e.what()).c_str());
    }
  });

  m.def(
      "z_series",
      [](const std::vector<double>& v, int bins_per_week, bool leave_one_out) {
        VarianceOptions o;
        o.profile_mode = leave_one_out ? ProfileMode::leave_one_out : ProfileMode::self_inclusive;
        return as_list(compute_z(v, bins_per_week, o));
      },
      py::arg("volume"), py::arg("bins_per_week"), py::arg("leave_one_out") = true,
      "Weekly z-scores; None where the baseline has no spread.");

  m.def(
      "variance_runs",
      [](const std::vector<std::optional<double>>& z, double z_thr) {
        ZSeries s;
        for (auto v : z) s.z.push_back(v ? *v : kUndefinedZ);
        std::vector<Span> out;
        for (const auto& r : flag_variance_runs(s, z_thr)) out.emplace_back(r.t_start, r.t_stop);
        return out;
      },
      py::arg("z"), py::arg("z_thr") = 2.5);

  m.def(
      "recurrence_points",
      [](const std::vector<double>& v, int bins_per_week, double width) {
        RecurrenceOptions o;
        o.phase_bin_width = width;
        return detect_recurrence(v, bins_per_week, o).points;
      },
      py::arg("volume"), py::arg("bins_per_week"), py::arg("phase_bin_width") = 20.0);

  m.def(
      "merge_runs",
      [](const std::vector<Span>& spans, int max_gap, int min_long) {
        std::vector<cdr::Run> runs;
        for (auto [a, b] : spans) runs.push_back({{}, a, b, {}, {}});
        std::vector<Span> out;
        for (const auto& r : merge_runs(runs, {max_gap, min_long})) out.emplace_back(r.t_start, r.t_stop);
        return out;
      },
      py::arg("runs"), py::arg("max_gap") = 4, py::arg("min_long") = 4);

  m.def(
      "midpoint_fraction", [](const std::vector<double>& d) { return midpoint_fraction(d); }, py::arg("delta"));

  m.def(
      "decay_length",
      [](const std::map<std::pair<int, int>, double>& excess, std::pair<double, double> epicenter,
         double cell_size, double ring_width, double max_radius) {
        std::map<CellKey, double> cells;
        for (const auto& [k, v] : excess) cells[{k.first, k.second}] = v;
        const auto fit =
            fit_decay(ring_profile(cells, cell_size, {epicenter.first, epicenter.second}, ring_width, max_radius));
        return fit.r_c;
      },
      py::arg("excess"), py::arg("epicenter"), py::arg("cell_size") = 1.0, py::arg("ring_width") = 1.0,
      py::arg("max_radius") = 20.0, "Exponential decay length (km) of per-cell excess, or None.");

  m.def(
      "social_decay_rate", [](const std::vector<double>& t) { return social_decay_rate(t); }, py::arg("totals"));
  m.def(
      "weighted_social_distance", [](const std::vector<double>& t) { return weighted_social_distance(t); },
      py::arg("totals"));

  m.def(
      "pca",
      [](const std::vector<std::vector<double>>& rows) {
        const auto r = pca(rows);
        py::dict d;
        d["components"] = r.components;
        d["explained_variance"] = r.explained_variance;
        d["projections"] = r.projections;
        d["standardized"] = r.standardized;
        d["columns"] = r.columns;
        d["dropped"] = r.dropped;
        return d;
      },
      py::arg("rows"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one cdr-anomaly subcommand; returns (exit_code, stdout, stderr).");

  m.attr("feature_names") = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());
  m.attr("__version__") = "0.1.0";
}
