#pragma once

// Adaptive measurement of perceived moon magnification.
//
// Staircase1Up1Down: a "Larger" judgment lowers the comparison magnification
// by the current step, "Smaller" raises it. Every change of direction is a
// reversal; the step halves at each reversal and the session completes after
// `reversals_to_stop` reversals. The point of subjective equality is the
// mean stimulus at the last R - 2 reversals.
//
// MethodOfAdjustment: the subject moves a slider; each non-final adjustment
// becomes the next stimulus, and the submitted final value is the PSE.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "moon/renderer.hpp"

namespace moon {

enum class Procedure { Staircase1Up1Down, MethodOfAdjustment };

struct SessionConfig {
  static constexpr double kMinMagnification = 0.1;

  Procedure procedure = Procedure::Staircase1Up1Down;
  CameraRig rig;
  StereoScene reference_scene;
  double start_m = 1.0;
  double step_initial = 0.2;
  int reversals_to_stop = 8;
  Presentation presentation = Presentation::SideBySide;
  std::uint64_t rng_seed = 0;
};

void validate(const SessionConfig& config);

/// Reference scene with the moon's angular diameter scaled by m. When the sky
/// is textured, each trial gets its own texture seed derived from rng_seed.
StereoScene trial_scene(const SessionConfig& config, double m,
                        int trial_index);

struct Trial {
  int index = 0;
  double stimulus_m = 0.0;
  std::string scene_digest;
  bool clamped = false;

  friend bool operator==(const Trial&, const Trial&) = default;
};

enum class Judgment { Larger, Smaller };

struct Adjustment {
  double m = 0.0;
  bool final = false;

  friend bool operator==(const Adjustment&, const Adjustment&) = default;
};

struct Response {
  int trial_index = 0;
  std::variant<Judgment, Adjustment> answer;
  std::int64_t latency_ms = 0;

  friend bool operator==(const Response&, const Response&) = default;
};

enum class SessionStatus { Active, Complete };

class SessionState {
 public:
  explicit SessionState(SessionConfig config);

  /// Issues the next trial. Throws SessionOver when complete and Sequencing
  /// when the previous trial is still unanswered.
  const Trial& next_stimulus();

  /// Validates then applies; a rejected response leaves the state untouched.
  void record_response(const Response& response);

  /// Throws NotReady until the session is complete.
  double estimate_pse() const;

  const SessionConfig& config() const { return config_; }
  SessionStatus status() const { return status_; }
  bool has_pending_trial() const { return pending_; }
  const std::vector<Trial>& trials() const { return trials_; }
  const std::vector<Response>& responses() const { return responses_; }
  const std::vector<double>& reversals() const { return reversals_; }
  double current_m() const { return current_m_; }
  double current_step() const { return step_; }

  friend bool operator==(const SessionState&, const SessionState&);

 private:
  void apply_judgment(const Trial& trial, Judgment judgment);

  SessionConfig config_;
  SessionStatus status_ = SessionStatus::Active;
  std::vector<Trial> trials_;
  std::vector<Response> responses_;
  std::vector<double> reversals_;
  double current_m_;
  double step_;
  int last_direction_ = 0;
  bool pending_ = false;
  bool next_clamped_ = false;
  std::optional<double> final_m_;
};

/// Mean of the last R - 2 entries of `reversals` (the first two are burn-in).
double mean_of_last_reversals(std::span<const double> reversals,
                              int reversals_to_stop);

/// Deterministic psychometric observer: P(Larger) = Phi((s - true_m) / sigma).
/// The draw for a trial depends only on (seed, trial index), so replaying a
/// log and resuming reproduces the same answers.
class SimulatedObserver {
 public:
  SimulatedObserver(double true_m, double noise_sigma, std::uint64_t seed);

  Judgment judge(const Trial& trial) const;
  /// Staircase: a judgment. Adjustment: a final setting of true_m plus
  /// Gaussian noise, floored at the minimum magnification.
  Response respond(const Trial& trial, Procedure procedure) const;

  double true_m() const { return true_m_; }

 private:
  double true_m_;
  double sigma_;
  std::uint64_t seed_;
};

struct SimulationReport {
  double pse;
  int trials;
  std::vector<double> reversals;
  double final_step;
};

/// Drives a session to completion against the observer.
SimulationReport run_closed_loop(const SessionConfig& config,
                                 const SimulatedObserver& observer);

}  // namespace moon
