#pragma once

#include <cstdint>

#include "pitchstats/pose/joints.hpp"
#include "pitchstats/pose/sequence.hpp"
#include "pitchstats/rng.hpp"
#include "pitchstats/tcn/train.hpp"
#include "pitchstats/types.hpp"

namespace pitchstats::synth {

// Parameters for one synthetic pitch. The throwing wrist rides a planar
// circular arc about a fixed elbow pivot, so the lever-arm velocity formula
// is exact on noiseless output and every truth field is analytic.
struct SynthPitchSpec {
  pose::Handedness handedness = pose::Handedness::right;
  pose::PitchPosition position_style = pose::PitchPosition::windup;
  Scalar fps = 30.0;
  Index n_frames = 120;
  Index release_frame = 80;    // r*: peak angular rate lands exactly here
  Scalar angular_rate = 78.0;  // omega*: rad/s of the wrist at release
  Scalar lever_arm = 0.42;     // l*: wrist-to-elbow distance, meters
  Scalar noise_sigma = 0.0;    // i.i.d. Gaussian, meters, per joint per frame
  std::uint64_t seed = 0;

  // 2 <= r* <= n-2, omega* > 0, l* > 0, sigma >= 0, fps > 0, and
  // omega*/fps <= 2.9 so the per-frame arc step stays clear of the pi
  // wrap-around (larger steps alias and the release angle is ambiguous).
  void validate() const;
};

// Analytic ground truth recorded at generation time, from the clean
// trajectory before noise is added.
struct PitchTruth {
  pose::Role role = pose::Role::pitcher;
  pose::Handedness handedness = pose::Handedness::right;
  pose::PitchPosition position_style = pose::PitchPosition::windup;
  Index release_frame = 0;
  Scalar release_speed_mps = 0.0;  // omega* x lever arm
  Scalar extension_m = 0.0;        // wrist-to-pitching-ankle at release
  Vector3 release_point = Vector3::Zero();  // clean wrist at release
};

struct SynthPitch {
  pose::PoseSequence sequence;
  PitchTruth truth;
};

// Builds the three-phase delivery: hold, cocking retreat to the Point-A
// extreme, geometric-ramp acceleration arc peaking exactly at r*, then a
// decaying follow-through. Windup style adds a preparatory glove-arm and
// stride-leg oscillation that stretch omits. A left-handed spec produces
// the exact x-mirror of the right-handed one for the same seed.
SynthPitch generate_pitch(const SynthPitchSpec& spec);

// Spec with handedness, style, length, release frame, angular rate, and
// lever arm drawn from generator-default ranges. noise_sigma is left 0.
SynthPitchSpec random_pitch_spec(Rng& rng);

// Four-class motion set: pitchers (generate_pitch), batters (lateral swing
// burst), catchers (deep static squat), fielders (translating gait). Each
// class contributes exactly n_per_class sequences with per-sample jitter;
// labels follow pose::Role values.
tcn::LabeledDataset generate_role_dataset(Index n_per_class,
                                          std::uint64_t seed);

}  // namespace pitchstats::synth
