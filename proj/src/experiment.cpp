#include "moon/experiment.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "moon/error.hpp"
#include "moon/format.hpp"
#include "moon/io.hpp"

namespace moon {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1) from the top 53 bits; avoids the implementation-defined
// std distributions so draws match across standard libraries.
double unit_open(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

void validate(const SessionConfig& c) {
  if (!(c.start_m > 0.0))
    fail(ErrorKind::Validation, "field 'start_m': must be > 0");
  if (!(c.step_initial > 0.0))
    fail(ErrorKind::Validation, "field 'step_initial': must be > 0");
  if (c.reversals_to_stop < 4)
    fail(ErrorKind::Validation, "field 'reversals_to_stop': must be >= 4");
  validate(c.rig);
  validate(c.reference_scene);
}

StereoScene trial_scene(const SessionConfig& config, double m,
                        int trial_index) {
  StereoScene scene = config.reference_scene;
  scene.moon.angular_diameter = scene.moon.angular_diameter * m;
  if (scene.sky.texture_seed)
    scene.sky.texture_seed =
        mix(config.rng_seed ^ mix(static_cast<std::uint64_t>(trial_index)));
  return scene;
}

SessionState::SessionState(SessionConfig config)
    : config_(std::move(config)),
      current_m_(config_.start_m),
      step_(config_.step_initial) {
  validate(config_);
}

const Trial& SessionState::next_stimulus() {
  if (status_ == SessionStatus::Complete)
    fail(ErrorKind::SessionOver, "session is complete");
  if (pending_)
    fail(ErrorKind::Sequencing, "trial " + std::to_string(trials_.back().index) +
                                    " is still awaiting a response");
  const int index = static_cast<int>(trials_.size());
  StereoScene scene = trial_scene(config_, current_m_, index);
  Trial trial{index, current_m_, scene_digest(scene), next_clamped_};
  trials_.push_back(std::move(trial));
  pending_ = true;
  next_clamped_ = false;
  return trials_.back();
}

void SessionState::record_response(const Response& response) {
  if (status_ == SessionStatus::Complete)
    fail(ErrorKind::Sequencing, "session is complete");
  if (!pending_ || response.trial_index != trials_.back().index)
    fail(ErrorKind::Sequencing,
         "response for trial " + std::to_string(response.trial_index) +
             " does not match a pending trial");
  if (response.latency_ms < 0)
    fail(ErrorKind::Validation, "field 'latency_ms': must be >= 0");

  const Trial& trial = trials_.back();
  if (config_.procedure == Procedure::Staircase1Up1Down) {
    const auto* judgment = std::get_if<Judgment>(&response.answer);
    if (!judgment)
      fail(ErrorKind::Validation, "field 'judgment': staircase needs a judgment");
    apply_judgment(trial, *judgment);
  } else {
    const auto* adj = std::get_if<Adjustment>(&response.answer);
    if (!adj)
      fail(ErrorKind::Validation,
           "field 'final_m': adjustment sessions need final_m or adjust_m");
    if (!(adj->m > 0.0) || !std::isfinite(adj->m))
      fail(ErrorKind::Validation, "field 'final_m': must be > 0");
    if (adj->final) {
      final_m_ = adj->m;
      status_ = SessionStatus::Complete;
    } else {
      current_m_ = adj->m;
    }
  }
  responses_.push_back(response);
  pending_ = false;
}

void SessionState::apply_judgment(const Trial& trial, Judgment judgment) {
  const int direction = judgment == Judgment::Larger ? -1 : +1;
  if (last_direction_ != 0 && direction != last_direction_) {
    reversals_.push_back(trial.stimulus_m);
    step_ *= 0.5;
  }
  last_direction_ = direction;
  if (static_cast<int>(reversals_.size()) >= config_.reversals_to_stop) {
    status_ = SessionStatus::Complete;
    return;
  }
  current_m_ += direction * step_;
  if (current_m_ < SessionConfig::kMinMagnification) {
    current_m_ = SessionConfig::kMinMagnification;
    next_clamped_ = true;
  }
}

double SessionState::estimate_pse() const {
  if (status_ != SessionStatus::Complete)
    fail(ErrorKind::NotReady, "session is not complete");
  if (final_m_) return *final_m_;
  return mean_of_last_reversals(reversals_, config_.reversals_to_stop);
}

double mean_of_last_reversals(std::span<const double> reversals,
                              int reversals_to_stop) {
  const auto used = static_cast<std::size_t>(reversals_to_stop - 2);
  if (reversals_to_stop < 4 || reversals.size() < used)
    fail(ErrorKind::NotReady, "not enough reversals for a PSE");
  const auto tail = reversals.last(used);
  return std::accumulate(tail.begin(), tail.end(), 0.0) /
         static_cast<double>(used);
}

bool operator==(const SessionState& a, const SessionState& b) {
  return to_json(a.config_) == to_json(b.config_) && a.status_ == b.status_ &&
         a.trials_ == b.trials_ && a.responses_ == b.responses_ &&
         a.reversals_ == b.reversals_ && a.current_m_ == b.current_m_ &&
         a.step_ == b.step_ && a.last_direction_ == b.last_direction_ &&
         a.pending_ == b.pending_ && a.next_clamped_ == b.next_clamped_ &&
         a.final_m_ == b.final_m_;
}

SimulatedObserver::SimulatedObserver(double true_m, double noise_sigma,
                                     std::uint64_t seed)
    : true_m_(true_m), sigma_(noise_sigma), seed_(seed) {
  if (!(true_m > 0.0))
    fail(ErrorKind::Domain, "true_m must be > 0, got " + sig9(true_m));
  if (!(noise_sigma >= 0.0))
    fail(ErrorKind::Domain, "noise_sigma must be >= 0, got " + sig9(noise_sigma));
}

Judgment SimulatedObserver::judge(const Trial& trial) const {
  const double s = trial.stimulus_m;
  if (sigma_ == 0.0) return s > true_m_ ? Judgment::Larger : Judgment::Smaller;
  std::mt19937_64 gen(mix(seed_ ^ mix(static_cast<std::uint64_t>(trial.index))));
  const double p_larger = normal_cdf((s - true_m_) / sigma_);
  return unit_open(gen) < p_larger ? Judgment::Larger : Judgment::Smaller;
}

Response SimulatedObserver::respond(const Trial& trial,
                                    Procedure procedure) const {
  if (procedure == Procedure::Staircase1Up1Down)
    return {trial.index, judge(trial), 0};
  std::mt19937_64 gen(mix(seed_ ^ mix(static_cast<std::uint64_t>(trial.index))));
  // Box-Muller.
  const double u1 = unit_open(gen);
  const double u2 = unit_open(gen);
  const double z =
      std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  const double m =
      std::max(SessionConfig::kMinMagnification, true_m_ + sigma_ * z);
  return {trial.index, Adjustment{m, true}, 0};
}

SimulationReport run_closed_loop(const SessionConfig& config,
                                 const SimulatedObserver& observer) {
  SessionState state(config);
  while (state.status() == SessionStatus::Active) {
    const Trial& trial = state.next_stimulus();
    state.record_response(observer.respond(trial, config.procedure));
  }
  return {state.estimate_pse(), static_cast<int>(state.trials().size()),
          state.reversals(), state.current_step()};
}

}  // namespace moon
