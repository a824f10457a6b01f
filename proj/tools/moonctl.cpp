// moonctl: batch entry points for the moon illusion workbench.
//
// Exit codes: 0 success, 1 usage, 2 validation, 3 runtime.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "moon/encode.hpp"
#include "moon/error.hpp"
#include "moon/experiment.hpp"
#include "moon/format.hpp"
#include "moon/geometry.hpp"
#include "moon/io.hpp"
#include "moon/models.hpp"
#include "moon/renderer.hpp"
#include "moon/service.hpp"
#include "moon/survey.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

double round9(double x) { return std::stod(moon::sig9(x)); }

void print_json(const moon::Json& j) { std::cout << j.dump(2) << '\n'; }

std::string curve_svg(const std::vector<moon::CurvePoint>& curve) {
  const double w = 480, h = 320, pad = 20;
  double max_m = 1.0;
  for (const auto& p : curve) max_m = std::max(max_m, p.magnification);
  std::string pts;
  for (const auto& p : curve) {
    const double x = pad + p.r * (w - 2 * pad);
    const double y = h - pad - (p.magnification - 1.0) / std::max(max_m - 1.0, 1e-9) *
                                   (h - 2 * pad);
    pts += moon::sig9(x) + "," + moon::sig9(y) + " ";
  }
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"320\">"
         "<polyline fill=\"none\" stroke=\"black\" points=\"" +
         pts + "\"/></svg>\n";
}

int cmd_expansion_curve(double theta_deg, double r_min, double r_max, int steps,
                        const std::string& out, const std::string& svg) {
  if (steps < 1 || (steps == 1 && r_min != r_max) || (steps >= 2 && !(r_min < r_max)))
    moon::fail(moon::ErrorKind::Validation,
               "need r_min < r_max with steps >= 2, or r_min == r_max with steps == 1");
  std::vector<double> samples;
  for (int i = 0; i < steps; ++i)
    samples.push_back(steps == 1 ? r_min
                                 : r_min + i * (r_max - r_min) / (steps - 1));
  const auto curve =
      moon::expansion_curve(moon::Angle::degrees(theta_deg), samples);
  const std::string csv = moon::curve_to_csv(curve);
  if (out.empty() || out == "-") {
    std::cout << csv;
  } else {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) moon::fail(moon::ErrorKind::Io, "cannot write " + out);
    f << csv;
  }
  if (!svg.empty()) {
    std::ofstream f(svg, std::ios::binary | std::ios::trunc);
    if (!f) moon::fail(moon::ErrorKind::Io, "cannot write " + svg);
    f << curve_svg(curve);
  }
  return 0;
}

int cmd_render(const std::string& scene_path, const std::string& format,
               const std::string& layout, const std::string& out) {
  const moon::SceneFile file =
      moon::scene_file_from_json(moon::read_json_file(scene_path));
  const auto fmt = moon::parse_image_format(format);
  moon::Presentation mode;
  if (layout == "side-by-side")
    mode = moon::Presentation::SideBySide;
  else if (layout == "anaglyph")
    mode = moon::Presentation::Anaglyph;
  else
    moon::fail(moon::ErrorKind::Validation, "unknown layout '" + layout + "'");
  const auto image = moon::present(moon::render_stereo(file.rig, file.scene), mode);
  moon::write_file(out, moon::encode_image(image, fmt));
  return 0;
}

int cmd_simulate(const std::string& config_path, double true_m, double sigma,
                 std::uint64_t seed) {
  const moon::SessionConfig config =
      moon::session_config_from_json(moon::read_json_file(config_path));
  const moon::SimulatedObserver observer(true_m, sigma, seed);
  const auto report = moon::run_closed_loop(config, observer);
  moon::Json reversals = moon::Json::array();
  for (double r : report.reversals) reversals.push_back(round9(r));
  print_json({{"pse", round9(report.pse)},
              {"trials", report.trials},
              {"reversals", reversals},
              {"final_step", round9(report.final_step)}});
  return 0;
}

int cmd_survey_stats(const std::string& csv_path) {
  const auto counts = moon::read_survey_csv(csv_path);
  const auto est = moon::survey_proportions(counts);
  print_json({{"n_closer", counts.n_closer},
              {"n_farther", counts.n_farther},
              {"proportion_closer", round9(est.proportion_closer)},
              {"wilson_95_ci", {round9(est.ci_low), round9(est.ci_high)}}});
  return 0;
}

int cmd_compare_models(const std::string& context_path) {
  const auto in = moon::model_inputs_from_json(moon::read_json_file(context_path));
  const auto preds = moon::compare_models(in.context, in.dome, in.gamma, in.mapping);
  moon::Json j = moon::comparison_to_json(in.context.elevation, preds);
  j["elevation_deg"] = round9(j["elevation_deg"].get<double>());
  for (auto& p : j["predictions"])
    p["magnification"] = round9(p["magnification"].get<double>());
  print_json(j);
  return 0;
}

int cmd_serve(int port, const std::string& host, const std::string& data_dir) {
  moon::SessionService service(moon::ServiceOptions{data_dir, std::nullopt});
  moon::serve(service, host, port, [&] {
    std::cerr << "moonctl: serving on http://" << host << ":" << port
              << "/v1 (data dir " << data_dir << ")\n";
  });
  std::cerr << "moonctl: shut down\n";
  return 0;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moon illusion workbench: geometry, stimuli, experiments"};
  app.require_subcommand(1);

  auto* curve = app.add_subcommand("expansion-curve",
                                   "Magnification vs displacement ratio as CSV");
  double theta_deg = moon::constants::kMoonAngularDiameterDeg;
  double r_min = 0.0, r_max = 0.9;
  int steps = 10;
  std::string curve_out, curve_svg_out;
  curve->add_option("--theta-deg", theta_deg, "True angular size in degrees")
      ->capture_default_str();
  curve->add_option("--r-min", r_min, "First displacement ratio")->capture_default_str();
  curve->add_option("--r-max", r_max, "Last displacement ratio")->capture_default_str();
  curve->add_option("--steps", steps, "Number of samples")->capture_default_str();
  curve->add_option("--out", curve_out, "Output CSV path (default stdout)");
  curve->add_option("--svg", curve_svg_out, "Also write an SVG polyline");

  auto* render = app.add_subcommand("render", "Render a stereo stimulus from a scene file");
  std::string scene_path, format = "ppm", layout = "side-by-side", render_out;
  render->add_option("--scene", scene_path, "Scene JSON")->required();
  render->add_option("--format", format, "ppm or png")->capture_default_str();
  render->add_option("--layout", layout, "side-by-side or anaglyph")->capture_default_str();
  render->add_option("--out", render_out, "Output image path")->required();

  auto* simulate = app.add_subcommand("simulate", "Closed-loop session against a simulated observer");
  std::string config_path;
  double true_m = 1.25, sigma = 0.05;
  std::uint64_t seed = 1;
  simulate->add_option("--config", config_path, "Session config JSON")->required();
  simulate->add_option("--true-m", true_m, "Observer's true magnification")->capture_default_str();
  simulate->add_option("--sigma", sigma, "Observer noise")->capture_default_str();
  simulate->add_option("--seed", seed, "Observer seed")->capture_default_str();

  auto* survey = app.add_subcommand("survey-stats", "Proportion and Wilson CI from label,count CSV");
  std::string csv_path;
  survey->add_option("--csv", csv_path, "Survey CSV")->required();

  auto* compare = app.add_subcommand("compare-models", "Evaluate the three illusion models");
  std::string context_path;
  compare->add_option("--context", context_path, "Context JSON")->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  int port = std::stoi(env_or("PORT", "8080"));
  std::string host = "127.0.0.1";
  std::string data_dir = env_or("DATA_DIR", "data");
  serve->add_option("--port", port, "Listen port (env PORT)")->capture_default_str();
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--data-dir", data_dir, "Journal directory (env DATA_DIR)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*curve)
      return cmd_expansion_curve(theta_deg, r_min, r_max, steps, curve_out, curve_svg_out);
    if (*render) return cmd_render(scene_path, format, layout, render_out);
    if (*simulate) return cmd_simulate(config_path, true_m, sigma, seed);
    if (*survey) return cmd_survey_stats(csv_path);
    if (*compare) return cmd_compare_models(context_path);
    if (*serve) return cmd_serve(port, host, data_dir);
  } catch (const moon::Error& e) {
    std::cerr << "moonctl: " << moon::to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == moon::ErrorKind::Io ? kExitRuntime : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "moonctl: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
