#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "moon/encode.hpp"
#include "moon/error.hpp"
#include "moon/experiment.hpp"
#include "moon/geometry.hpp"
#include "moon/io.hpp"
#include "moon/models.hpp"
#include "moon/renderer.hpp"
#include "moon/survey.hpp"

namespace py = pybind11;

namespace {

moon::Json to_json(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return moon::parse_json(obj.cast<std::string>());
  return moon::parse_json(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::object to_python(const moon::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

moon::Angle deg(double d) { return moon::Angle::degrees(d); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stereo moon-illusion geometry, models, renderer and experiment engine";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const moon::Error& e) {
      const std::string msg = std::string(moon::to_string(e.kind())) + ": " + e.what();
      if (e.kind() == moon::ErrorKind::Io) {
        PyErr_SetString(PyExc_OSError, msg.c_str());
      } else {
        PyErr_SetString(PyExc_ValueError, msg.c_str());
      }
    }
  });

  m.attr("MOON_ANGULAR_DIAMETER_DEG") = moon::constants::kMoonAngularDiameterDeg;

  m.def("angular_size_deg",
        [](double diameter, double distance) { return moon::angular_size_of(diameter, distance).deg(); },
        py::arg("diameter"), py::arg("distance"));
  m.def("angular_expansion_deg",
        [](double theta_deg, double r) {
          return moon::angular_expansion(deg(theta_deg), moon::DisplacementRatio(r)).deg();
        },
        py::arg("theta_deg"), py::arg("r"));
  m.def("magnification",
        [](double theta_deg, double r) { return moon::magnification(deg(theta_deg), moon::DisplacementRatio(r)); },
        py::arg("theta_deg"), py::arg("r"));
  m.def("displacement_for_magnification",
        [](double theta_deg, double mag) {
          return moon::displacement_for_magnification(deg(theta_deg), mag).value();
        },
        py::arg("theta_deg"), py::arg("m"));
  m.def("vergence_rad",
        [](double distance, double baseline) {
          return moon::vergence_angle(moon::make_observer(baseline), distance).rad();
        },
        py::arg("distance"), py::arg("baseline") = moon::ObserverGeometry::kDefaultBaseline);
  m.def("expansion_curve",
        [](double theta_deg, const std::vector<double>& samples) {
          std::vector<std::tuple<double, double, double>> rows;
          for (const auto& p : moon::expansion_curve(deg(theta_deg), samples))
            rows.emplace_back(p.r, p.magnification, p.theta_hat.deg());
          return rows;
        },
        py::arg("theta_deg"), py::arg("samples"),
        "Rows of (r, magnification, theta_hat_deg).");

  m.def("survey_proportions",
        [](long long closer, long long farther) {
          const auto e = moon::survey_proportions({closer, farther});
          return py::make_tuple(e.proportion_closer, py::make_tuple(e.ci_low, e.ci_high));
        },
        py::arg("n_closer"), py::arg("n_farther"),
        "(proportion_closer, (wilson_low, wilson_high)).");

  m.def("compare_models",
        [](const py::object& context) {
          const auto in = moon::model_inputs_from_json(to_json(context));
          return to_python(moon::comparison_to_json(
              in.context.elevation, moon::compare_models(in.context, in.dome, in.gamma, in.mapping)));
        },
        py::arg("context"), "Context as a dict or JSON string.");

  m.def("render",
        [](const py::object& scene_file, const std::string& format, const std::string& layout) {
          const auto file = moon::scene_file_from_json(to_json(scene_file));
          moon::Presentation mode;
          if (layout == "side-by-side") {
            mode = moon::Presentation::SideBySide;
          } else if (layout == "anaglyph") {
            mode = moon::Presentation::Anaglyph;
          } else {
            moon::fail(moon::ErrorKind::Validation, "layout must be side-by-side or anaglyph");
          }
          const auto img = moon::present(moon::render_stereo(file.rig, file.scene), mode);
          const auto bytes = moon::encode_image(img, moon::parse_image_format(format));
          return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        },
        py::arg("scene"), py::arg("format") = "ppm", py::arg("layout") = "side-by-side",
        "Encoded image of a scene file ({rig, scene}).");

  m.def("simulate",
        [](const py::object& config, double true_m, double sigma, std::uint64_t seed) {
          const auto cfg = moon::session_config_from_json(to_json(config));
          const auto report = moon::run_closed_loop(cfg, moon::SimulatedObserver(true_m, sigma, seed));
          py::dict out;
          out["pse"] = report.pse;
          out["trials"] = report.trials;
          out["reversals"] = report.reversals;
          out["final_step"] = report.final_step;
          return out;
        },
        py::arg("config"), py::arg("true_m"), py::arg("sigma") = 0.05, py::arg("seed") = 0);
}
