#include "moon/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "moon/error.hpp"

namespace moon {

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
  fail(ErrorKind::Validation, "field '" + path + "': " + why);
}

const Json& member(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) bad_field(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad_field(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

double number(const Json& j, const std::string& path, const char* key) {
  const Json& v = member(j, path, key);
  if (!v.is_number()) bad_field(join(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad_field(join(path, key), "must be finite");
  return d;
}

double number_or(const Json& j, const std::string& path, const char* key,
                 double fallback) {
  return j.contains(key) ? number(j, path, key) : fallback;
}

std::int64_t integer(const Json& j, const std::string& path, const char* key) {
  const Json& v = member(j, path, key);
  if (!v.is_number_integer()) bad_field(join(path, key), "expected an integer");
  return v.get<std::int64_t>();
}

std::string text(const Json& j, const std::string& path, const char* key) {
  const Json& v = member(j, path, key);
  if (!v.is_string()) bad_field(join(path, key), "expected a string");
  return v.get<std::string>();
}

Rgb color(const Json& j, const std::string& path, const char* key) {
  const Json& v = member(j, path, key);
  const std::string p = join(path, key);
  if (!v.is_array() || v.size() != 3) bad_field(p, "expected [r, g, b]");
  std::uint8_t c[3];
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number_integer() || v[i].get<int>() < 0 || v[i].get<int>() > 255)
      bad_field(p, "components must be integers in [0, 255]");
    c[i] = static_cast<std::uint8_t>(v[i].get<int>());
  }
  return {c[0], c[1], c[2]};
}

Json color_json(Rgb c) { return Json::array({c.r, c.g, c.b}); }

template <typename T>
T check(T value, bool ok, const std::string& path, const char* why) {
  if (!ok) bad_field(path, why);
  return value;
}

}  // namespace

Json to_json(const CameraRig& rig) {
  return {{"baseline_m", rig.baseline},
          {"focal_px", rig.focal_px},
          {"width_px", rig.width_px},
          {"height_px", rig.height_px}};
}

CameraRig rig_from_json(const Json& j) {
  CameraRig rig;
  rig.baseline = number_or(j, "rig", "baseline_m", rig.baseline);
  rig.focal_px = number_or(j, "rig", "focal_px", rig.focal_px);
  if (j.contains("width_px"))
    rig.width_px = static_cast<int>(integer(j, "rig", "width_px"));
  if (j.contains("height_px"))
    rig.height_px = static_cast<int>(integer(j, "rig", "height_px"));
  validate(rig);
  return rig;
}

Json to_json(const StereoScene& scene) {
  Json sky = {{"distance_m", scene.sky.distance},
              {"color", color_json(scene.sky.color)}};
  if (scene.sky.texture_seed) sky["texture_seed"] = *scene.sky.texture_seed;
  const Moon& m = scene.moon;
  Json moon = {{"angular_diameter_deg", m.angular_diameter.deg()},
               {"azimuth_deg", m.azimuth.deg()},
               {"elevation_deg", m.elevation.deg()},
               {"luminance", m.luminance},
               {"distance_m", m.distance}};
  if (m.disparity_override)
    moon["disparity_deg"] = m.disparity_override->deg();
  else
    moon["disparity_deg"] = "veridical";
  Json cues = Json::array();
  for (const Cue& c : scene.cues)
    cues.push_back({{"rect_m",
                     {c.silhouette.x_min, c.silhouette.y_min,
                      c.silhouette.x_max, c.silhouette.y_max}},
                    {"distance_m", c.distance},
                    {"color", color_json(c.color)}});
  return {{"sky", sky}, {"moon", moon}, {"cues", cues}};
}

StereoScene scene_from_json(const Json& j) {
  StereoScene scene;
  const Json& sky = member(j, "", "sky");
  scene.sky.distance = number(sky, "sky", "distance_m");
  if (sky.contains("color")) scene.sky.color = color(sky, "sky", "color");
  if (sky.contains("texture_seed") && !sky["texture_seed"].is_null()) {
    const Json& s = sky["texture_seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      bad_field("sky.texture_seed", "expected a non-negative integer");
    scene.sky.texture_seed = s.get<std::uint64_t>();
  }

  const Json& moon = member(j, "", "moon");
  Moon& m = scene.moon;
  m.angular_diameter = Angle::degrees(number(moon, "moon", "angular_diameter_deg"));
  m.azimuth = Angle::degrees(number_or(moon, "moon", "azimuth_deg", 0.0));
  m.elevation = Angle::degrees(number_or(moon, "moon", "elevation_deg", 0.0));
  m.luminance = number_or(moon, "moon", "luminance", m.luminance);
  m.distance = number_or(moon, "moon", "distance_m", m.distance);
  if (moon.contains("disparity_deg")) {
    const Json& d = moon["disparity_deg"];
    if (d.is_string()) {
      if (d.get<std::string>() != "veridical")
        bad_field("moon.disparity_deg", "expected a number or \"veridical\"");
      m.disparity_override.reset();
    } else {
      m.disparity_override = Angle::degrees(number(moon, "moon", "disparity_deg"));
    }
  }

  if (j.contains("cues")) {
    const Json& cues = j["cues"];
    if (!cues.is_array()) bad_field("cues", "expected an array");
    for (std::size_t i = 0; i < cues.size(); ++i) {
      const std::string p = "cues[" + std::to_string(i) + "]";
      const Json& c = cues[i];
      const Json& rect = member(c, p, "rect_m");
      if (!rect.is_array() || rect.size() != 4 ||
          !std::all_of(rect.begin(), rect.end(),
                       [](const Json& v) { return v.is_number(); }))
        bad_field(p + ".rect_m", "expected [x_min, y_min, x_max, y_max]");
      scene.cues.push_back(
          {{rect[0].get<double>(), rect[1].get<double>(), rect[2].get<double>(),
            rect[3].get<double>()},
           number(c, p, "distance_m"),
           color(c, p, "color")});
    }
  }
  validate(scene);
  return scene;
}

SceneFile scene_file_from_json(const Json& j) {
  SceneFile f;
  if (j.is_object() && j.contains("rig")) f.rig = rig_from_json(j["rig"]);
  f.scene = scene_from_json(j);
  return f;
}

std::string_view to_string(Procedure p) {
  return p == Procedure::MethodOfAdjustment ? "MethodOfAdjustment"
                                            : "Staircase1Up1Down";
}

std::string_view to_string(Presentation p) {
  return p == Presentation::Anaglyph ? "Anaglyph" : "SideBySide";
}

std::string_view to_string(SessionStatus s) {
  return s == SessionStatus::Complete ? "Complete" : "Active";
}

Json to_json(const SessionConfig& c) {
  return {{"procedure", to_string(c.procedure)},
          {"rig", to_json(c.rig)},
          {"reference_scene", to_json(c.reference_scene)},
          {"start_m", c.start_m},
          {"step_initial", c.step_initial},
          {"reversals_to_stop", c.reversals_to_stop},
          {"presentation", to_string(c.presentation)},
          {"rng_seed", c.rng_seed}};
}

SessionConfig session_config_from_json(const Json& j) {
  if (!j.is_object()) bad_field("", "expected a JSON object");
  SessionConfig c;
  if (j.contains("procedure")) {
    const std::string p = text(j, "", "procedure");
    if (p == "Staircase1Up1Down")
      c.procedure = Procedure::Staircase1Up1Down;
    else if (p == "MethodOfAdjustment")
      c.procedure = Procedure::MethodOfAdjustment;
    else
      bad_field("procedure", "expected Staircase1Up1Down or MethodOfAdjustment");
  }
  if (j.contains("rig")) c.rig = rig_from_json(j["rig"]);
  if (j.contains("reference_scene"))
    c.reference_scene = scene_from_json(j["reference_scene"]);
  c.start_m = number_or(j, "", "start_m", c.start_m);
  check(c.start_m, c.start_m > 0.0, "start_m", "must be > 0");
  c.step_initial = number_or(j, "", "step_initial", c.step_initial);
  check(c.step_initial, c.step_initial > 0.0, "step_initial", "must be > 0");
  if (j.contains("reversals_to_stop"))
    c.reversals_to_stop = static_cast<int>(integer(j, "", "reversals_to_stop"));
  check(c.reversals_to_stop, c.reversals_to_stop >= 4, "reversals_to_stop",
        "must be >= 4");
  if (j.contains("presentation")) {
    const std::string p = text(j, "", "presentation");
    if (p == "SideBySide")
      c.presentation = Presentation::SideBySide;
    else if (p == "Anaglyph")
      c.presentation = Presentation::Anaglyph;
    else
      bad_field("presentation", "expected SideBySide or Anaglyph");
  }
  if (j.contains("rng_seed")) {
    const Json& s = j["rng_seed"];
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                   s.get<std::int64_t>() < 0))
      bad_field("rng_seed", "expected a non-negative integer");
    c.rng_seed = s.get<std::uint64_t>();
  }
  validate(c);
  return c;
}

Json to_json(const Trial& t) {
  return {{"trial_index", t.index},
          {"stimulus_m", t.stimulus_m},
          {"scene_digest", t.scene_digest},
          {"clamped", t.clamped}};
}

Trial trial_from_json(const Json& j) {
  Trial t;
  t.index = static_cast<int>(integer(j, "trial", "trial_index"));
  t.stimulus_m = number(j, "trial", "stimulus_m");
  t.scene_digest = text(j, "trial", "scene_digest");
  t.clamped = j.value("clamped", false);
  return t;
}

Json to_json(const Response& r) {
  Json j = {{"trial_index", r.trial_index}, {"latency_ms", r.latency_ms}};
  if (const auto* judgment = std::get_if<Judgment>(&r.answer)) {
    j["judgment"] = *judgment == Judgment::Larger ? "Larger" : "Smaller";
  } else {
    const auto& adj = std::get<Adjustment>(r.answer);
    j[adj.final ? "final_m" : "adjust_m"] = adj.m;
  }
  return j;
}

Response response_from_json(const Json& j) {
  if (!j.is_object()) bad_field("", "expected a JSON object");
  Response r;
  r.trial_index = static_cast<int>(integer(j, "", "trial_index"));
  r.latency_ms = j.contains("latency_ms") ? integer(j, "", "latency_ms") : 0;
  check(r.latency_ms, r.latency_ms >= 0, "latency_ms", "must be >= 0");
  const int kinds = int{j.contains("judgment")} + int{j.contains("final_m")} +
                    int{j.contains("adjust_m")};
  if (kinds != 1)
    bad_field("judgment", "exactly one of judgment, final_m, adjust_m required");
  if (j.contains("judgment")) {
    const std::string v = text(j, "", "judgment");
    if (v == "Larger")
      r.answer = Judgment::Larger;
    else if (v == "Smaller")
      r.answer = Judgment::Smaller;
    else
      bad_field("judgment", "expected Larger or Smaller");
  } else if (j.contains("final_m")) {
    r.answer = Adjustment{number(j, "", "final_m"), true};
  } else {
    r.answer = Adjustment{number(j, "", "adjust_m"), false};
  }
  return r;
}

ModelInputs model_inputs_from_json(const Json& j) {
  if (!j.is_object()) bad_field("", "expected a JSON object");
  ModelInputs in;
  SceneContext& ctx = in.context;
  ctx.elevation = Angle::degrees(number(j, "", "elevation_deg"));
  ctx.referent_angular_size = Angle::degrees(number(j, "", "referent_deg"));
  if (j.contains("reference_referent_deg"))
    ctx.reference_referent_angular_size =
        Angle::degrees(number(j, "", "reference_referent_deg"));
  if (j.contains("perceived_sky_distance_m") &&
      !j["perceived_sky_distance_m"].is_null())
    ctx.perceived_sky_distance = number(j, "", "perceived_sky_distance_m");
  if (j.contains("moon_deg"))
    ctx.moon_angular_size = Angle::degrees(number(j, "", "moon_deg"));
  try {
    validate(ctx);
  } catch (const Error& e) {
    bad_field("context", e.what());
  }

  if (j.contains("dome")) {
    const Json& d = j["dome"];
    in.dome.horizon_distance = number(d, "dome", "horizon_distance_m");
    in.dome.zenith_distance = number(d, "dome", "zenith_distance_m");
    try {
      validate(in.dome);
    } catch (const Error& e) {
      bad_field("dome", e.what());
    }
  }
  in.gamma = number_or(j, "", "gamma", 1.0);
  check(in.gamma, in.gamma > 0.0, "gamma", "must be > 0");

  if (j.contains("mapping")) {
    const Json& m = j["mapping"];
    try {
      if (m.contains("calibrate_magnification")) {
        // r chosen so the moon is magnified by the given factor at the
        // calibration distance.
        const double target = number(m, "mapping", "calibrate_magnification");
        const double at = number(m, "mapping", "at_distance_m");
        const double d0 = number_or(m, "mapping", "d0_m", at);
        in.mapping = CueMapping::calibrated(
            displacement_for_magnification(ctx.moon_angular_size, target), at,
            d0, number_or(m, "mapping", "r_floor", 0.0));
      } else {
        in.mapping = CueMapping(number(m, "mapping", "r_max"),
                                number(m, "mapping", "d0_m"),
                                number_or(m, "mapping", "r_floor", 0.0));
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Validation) throw;
      bad_field("mapping", e.what());
    }
  }
  return in;
}

Json comparison_to_json(Angle elevation,
                        const std::array<ModelPrediction, 3>& predictions) {
  Json preds = Json::array();
  for (const auto& p : predictions)
    preds.push_back({{"model", to_string(p.model)},
                     {"magnification", p.magnification}});
  return {{"elevation_deg", elevation.deg()}, {"predictions", preds}};
}

std::string scene_digest(const StereoScene& scene) {
  const std::string canonical = to_json(scene).dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), md, &len, EVP_sha256(),
                 nullptr) != 1)
    fail(ErrorKind::Io, "SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xF];
  }
  return hex;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::Validation, std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

}  // namespace moon
