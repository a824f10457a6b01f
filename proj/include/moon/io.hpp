#pragma once

// JSON wire formats: scene files, session configs, model contexts, and the
// records of the session event log. Lengths are meters and angles degrees on
// the wire. Parse errors are Validation errors naming the offending field.

#include <json.hpp>

#include <string>

#include "moon/experiment.hpp"
#include "moon/models.hpp"
#include "moon/renderer.hpp"

namespace moon {

using Json = nlohmann::json;

Json to_json(const CameraRig& rig);
CameraRig rig_from_json(const Json& j);

Json to_json(const StereoScene& scene);
StereoScene scene_from_json(const Json& j);

/// A scene file: a StereoScene document with an optional "rig" member.
struct SceneFile {
  CameraRig rig;
  StereoScene scene;
};
SceneFile scene_file_from_json(const Json& j);

Json to_json(const SessionConfig& config);
SessionConfig session_config_from_json(const Json& j);

Json to_json(const Trial& trial);
Trial trial_from_json(const Json& j);

Json to_json(const Response& response);
Response response_from_json(const Json& j);

/// Inputs to compare_models bundled as one document.
struct ModelInputs {
  SceneContext context;
  SkyDome dome;
  double gamma = 1.0;
  CueMapping mapping;
};
ModelInputs model_inputs_from_json(const Json& j);

/// {elevation_deg, predictions: [{model, magnification}]}
Json comparison_to_json(Angle elevation,
                        const std::array<ModelPrediction, 3>& predictions);

std::string_view to_string(Procedure p);
std::string_view to_string(Presentation p);
std::string_view to_string(SessionStatus s);

/// Hex SHA-256 of the canonical (sorted-key, compact) JSON of the scene.
std::string scene_digest(const StereoScene& scene);

Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);

}  // namespace moon
