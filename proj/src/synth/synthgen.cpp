#include "pitchstats/synth/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "pitchstats/error.hpp"

namespace pitchstats::synth {

namespace {

using pose::JointId;

constexpr Scalar kPi = std::numbers::pi_v<Scalar>;

// Right-handed elbow pivot during the delivery; the wrist orbits this point
// so the wrist-to-elbow distance is the lever arm at every frame.
const Vector3 kElbowPivot(-0.20, 1.40, -0.10);

// Nominal cocked-back sweep of the acceleration arc, radians. The actual
// sweep shrinks when the pre-release span or the cocking span is too short
// to cover it with per-frame steps below the release step.
constexpr Scalar kNominalSweep = 2.85;
constexpr Scalar kSweepCap = 2.95;

// Follow-through angular budget: the post-release steps decay geometrically
// with total mass ~kFollowThrough, swinging the arm across the body.
constexpr Scalar kFollowThrough = 2.3;

void set(pose::PoseFrame& frame, JointId id, Scalar x, Scalar y, Scalar z) {
  frame.set_joint(id, Vector3(x, y, z));
}

// Neutral standing skeleton for a right-hander facing the plate (+x).
pose::PoseFrame base_skeleton(Scalar scale) {
  pose::PoseFrame f;
  const Scalar s = scale;
  set(f, JointId::pelvis, 0.00, 1.00 * s, 0.00);
  set(f, JointId::r_hip, 0.00, 1.00 * s, -0.11 * s);
  set(f, JointId::r_knee, 0.00, 0.55 * s, -0.11 * s);
  set(f, JointId::r_ankle, 0.00, 0.08 * s, -0.11 * s);
  set(f, JointId::l_hip, 0.00, 1.00 * s, 0.11 * s);
  set(f, JointId::l_knee, 0.00, 0.55 * s, 0.11 * s);
  set(f, JointId::l_ankle, 0.10 * s, 0.08 * s, 0.11 * s);
  set(f, JointId::spine, 0.00, 1.25 * s, 0.00);
  set(f, JointId::thorax, 0.00, 1.45 * s, 0.00);
  set(f, JointId::neck, 0.00, 1.55 * s, 0.00);
  set(f, JointId::head, 0.00, 1.70 * s, 0.00);
  set(f, JointId::l_shoulder, 0.00, 1.48 * s, 0.19 * s);
  set(f, JointId::l_elbow, 0.02 * s, 1.25 * s, 0.21 * s);
  set(f, JointId::l_wrist, 0.05 * s, 1.02 * s, 0.22 * s);
  set(f, JointId::r_shoulder, 0.00, 1.48 * s, -0.19 * s);
  set(f, JointId::r_elbow, kElbowPivot.x(), kElbowPivot.y(), kElbowPivot.z());
  set(f, JointId::r_wrist, 0.05 * s, 1.02 * s, -0.22 * s);
  return f;
}

// Half-cosine ease from 0 to 1.
Scalar ease(Scalar u) { return 0.5 - 0.5 * std::cos(kPi * u); }

// Solves sum_{j=0}^{m-1} q^j = target for q in (0, 1) by bisection. The sum
// grows monotonically from 1 (q -> 0) to m (q -> 1), so a root exists
// whenever 1 < target < m.
Scalar solve_geometric_ratio(Index m, Scalar target) {
  Scalar lo = 0.0;
  Scalar hi = 1.0;
  for (int iter = 0; iter < 70; ++iter) {
    const Scalar q = 0.5 * (lo + hi);
    Scalar sum = 0.0;
    Scalar term = 1.0;
    for (Index j = 0; j < m; ++j) {
      sum += term;
      term *= q;
    }
    (sum < target ? lo : hi) = q;
  }
  return 0.5 * (lo + hi);
}

// Per-frame elbow-relative wrist angle over the whole sequence. The phase
// boundaries are chosen so that on clean data the wrist x-coordinate has
// its interior minimum exactly at Point A (end of cocking), its interior
// maximum exactly at r* (the angle nearest zero), and the largest wrapped
// angle step exactly Delta = omega*/fps at r*.
ArrayX build_theta(const SynthPitchSpec& spec) {
  const Index n = spec.n_frames;
  const Index r = spec.release_frame;
  const Scalar delta = spec.angular_rate / spec.fps;

  // Arc length: enough steps for the nominal sweep, capped by the frames
  // available before release.
  const Index want =
      static_cast<Index>(std::ceil(kNominalSweep / delta)) + 4;
  const Index m = std::clamp<Index>(want, std::min<Index>(6, r - 1), r - 1);
  const Index a = r - m;  // Point A
  const Index cock_len = std::min<Index>(a, std::max<Index>(6, n / 4));
  const Index cock_start = a - cock_len;

  // Sweep small enough that (a) the geometric ramp fits in m steps all
  // strictly below delta, and (b) the cocking ease never out-steps the
  // release frame even when squeezed into a single frame.
  const Scalar sweep =
      std::min({kSweepCap, 0.95 * static_cast<Scalar>(m) * delta,
                1.2 * delta * static_cast<Scalar>(cock_len)});

  const Scalar q_post = kFollowThrough / (kFollowThrough + delta);
  // Release angle: close to the x-maximum at zero, but small enough that
  // the first follow-through step overshoots past -theta_rel, keeping the
  // x-maximum strictly at r*.
  const Scalar theta_rel = std::min(0.1, 0.4 * delta * q_post);
  const Scalar theta_a = theta_rel + sweep;
  const Scalar theta_start = theta_rel + 0.55 * sweep;

  Scalar q_pre = 0.0;
  if (m >= 2) q_pre = solve_geometric_ratio(m, sweep / delta);

  ArrayX theta(n);
  for (Index t = 0; t <= cock_start; ++t) theta[t] = theta_start;
  for (Index t = cock_start + 1; t <= a; ++t) {
    const Scalar u = static_cast<Scalar>(t - cock_start) /
                     static_cast<Scalar>(cock_len);
    theta[t] = theta_start + (theta_a - theta_start) * ease(u);
  }
  for (Index t = a + 1; t <= r; ++t) {
    theta[t] = theta[t - 1] - delta * std::pow(q_pre, static_cast<Scalar>(r - t));
  }
  for (Index t = r + 1; t < n; ++t) {
    theta[t] = theta[t - 1] - delta * std::pow(q_post, static_cast<Scalar>(t - r));
  }
  return theta;
}

// Preparatory oscillation envelope on [0, a]: 1.5 smooth cycles.
Scalar prep_wave(Scalar u) { return 0.5 - 0.5 * std::cos(3.0 * kPi * u); }

SynthPitch generate_right_handed(const SynthPitchSpec& spec) {
  const Index n = spec.n_frames;
  const Index r = spec.release_frame;
  const ArrayX theta = build_theta(spec);

  const Index a = [&theta] {
    Index best = 0;
    for (Index t = 1; t < theta.size(); ++t) {
      if (theta[t] > theta[best]) best = t;
    }
    return best;
  }();

  const bool windup = spec.position_style == pose::PitchPosition::windup;
  const Scalar amp = windup ? 0.22 : 0.0;

  pose::PoseSequence seq;
  seq.tracklet_id = "synth-pitch";
  seq.fps = spec.fps;
  seq.frames.reserve(static_cast<std::size_t>(n));

  const pose::PoseFrame base = base_skeleton(1.0);
  for (Index t = 0; t < n; ++t) {
    pose::PoseFrame frame = base;

    // Throwing arm: wrist on the circle about the fixed elbow pivot.
    const Scalar th = theta[t];
    frame.set_joint(JointId::r_wrist,
                    kElbowPivot + spec.lever_arm *
                                      Vector3(std::cos(th), std::sin(th), 0.0));

    if (!windup) {
      // Stretch: compact stance, stride foot already planted forward.
      Vector3 ankle = frame.joint(JointId::l_ankle);
      ankle.x() += 0.18;
      frame.set_joint(JointId::l_ankle, ankle);
    } else if (t <= a && a > 0) {
      // Windup: leg kick and glove-arm pump during the preparation.
      const Scalar u = static_cast<Scalar>(t) / static_cast<Scalar>(a);
      const Scalar env = prep_wave(u);
      const Scalar swing = std::sin(3.0 * kPi * u);
      auto lift = [&frame](JointId id, Scalar dx, Scalar dy) {
        Vector3 p = frame.joint(id);
        p.x() += dx;
        p.y() += dy;
        frame.set_joint(id, p);
      };
      lift(JointId::l_ankle, 0.35 * amp * swing, amp * env);
      lift(JointId::l_knee, 0.20 * amp * swing, 0.6 * amp * env);
      lift(JointId::l_wrist, 0.0, 0.8 * amp * env);
      lift(JointId::l_elbow, 0.0, 0.4 * amp * env);
    }

    seq.frames.push_back(frame);
  }

  PitchTruth truth;
  truth.role = pose::Role::pitcher;
  truth.handedness = pose::Handedness::right;
  truth.position_style = spec.position_style;
  truth.release_frame = r;
  truth.release_speed_mps = spec.angular_rate * spec.lever_arm;
  truth.release_point = seq.joint(r, JointId::r_wrist);
  truth.extension_m =
      (truth.release_point - seq.joint(r, JointId::r_ankle)).norm();

  if (spec.noise_sigma > 0.0) {
    Rng noise = Rng(spec.seed).derive(0x6e6f697365ull);  // noise stream
    for (pose::PoseFrame& frame : seq.frames) {
      for (Index j = 0; j < pose::kNumJoints; ++j) {
        for (Index c = 0; c < pose::kNumCoords; ++c) {
          frame.joints(j, c) += noise.normal(0.0, spec.noise_sigma);
        }
      }
    }
  }

  return SynthPitch{std::move(seq), truth};
}

}  // namespace

void SynthPitchSpec::validate() const {
  if (!std::isfinite(fps) || fps <= 0.0) {
    throw ValidationError("fps must be finite and positive");
  }
  if (n_frames < 4 || release_frame < 2 || release_frame > n_frames - 2) {
    throw ValidationError("release frame must lie in [2, n_frames - 2]");
  }
  if (!std::isfinite(angular_rate) || angular_rate <= 0.0) {
    throw ValidationError("angular rate must be finite and positive");
  }
  if (!std::isfinite(lever_arm) || lever_arm <= 0.0) {
    throw ValidationError("lever arm must be finite and positive");
  }
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) {
    throw ValidationError("noise sigma must be finite and non-negative");
  }
  if (angular_rate / fps > 2.9) {
    throw ValidationError(
        "angular_rate/fps exceeds 2.9 rad per frame; the sampled arc would "
        "alias across the pi wrap-around");
  }
}

SynthPitch generate_pitch(const SynthPitchSpec& spec) {
  spec.validate();
  if (spec.handedness == pose::Handedness::right) {
    return generate_right_handed(spec);
  }
  // A left-handed pitch is the anatomical mirror of the right-handed pitch
  // generated from the same spec, noise included.
  SynthPitchSpec right = spec;
  right.handedness = pose::Handedness::right;
  SynthPitch pitch = generate_right_handed(right);
  pitch.sequence = pose::mirror_x(pitch.sequence);
  pitch.truth.handedness = pose::Handedness::left;
  pitch.truth.release_point.x() = -pitch.truth.release_point.x();
  return pitch;
}

SynthPitchSpec random_pitch_spec(Rng& rng) {
  SynthPitchSpec spec;
  spec.handedness = rng.uniform() < 0.5 ? pose::Handedness::right
                                        : pose::Handedness::left;
  spec.position_style = rng.uniform() < 0.5 ? pose::PitchPosition::windup
                                            : pose::PitchPosition::stretch;
  spec.fps = 30.0;
  spec.n_frames = 90 + static_cast<Index>(rng.uniform_int(51));
  const Index lo = (spec.n_frames * 55 + 99) / 100;  // ceil(0.55 n)
  const Index hi = spec.n_frames * 3 / 4;
  spec.release_frame = lo + static_cast<Index>(
                                rng.uniform_int(static_cast<std::uint64_t>(
                                    hi - lo + 1)));
  spec.angular_rate = rng.uniform(75.0, 85.0);
  spec.lever_arm = rng.uniform(0.40, 0.45);
  spec.noise_sigma = 0.0;
  spec.seed = rng.bits();
  return spec;
}

namespace {

std::string sample_id(const char* stem, Index i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%04lld", stem,
                static_cast<long long>(i));
  return buf;
}

pose::PoseSequence make_batter(Index i, Rng& rng) {
  const Index n = 90 + static_cast<Index>(rng.uniform_int(51));
  const Scalar scale = rng.uniform(0.94, 1.06);
  const Scalar radius = 0.75 * scale;
  const Index swing_start = n / 2 - 6;
  const Scalar phase0 = -2.2 + rng.uniform(-0.15, 0.15);
  const Scalar phase1 = 1.0 + rng.uniform(-0.15, 0.15);

  pose::PoseSequence seq;
  seq.tracklet_id = sample_id("batter", i);
  seq.fps = 30.0;
  const pose::PoseFrame base = base_skeleton(scale);
  const Vector3 hub(0.0, 1.30 * scale, 0.0);
  for (Index t = 0; t < n; ++t) {
    pose::PoseFrame frame = base;
    // Slight crouch, wide stance.
    for (JointId id : {JointId::pelvis, JointId::r_hip, JointId::l_hip}) {
      Vector3 p = frame.joint(id);
      p.y() -= 0.08 * scale;
      frame.set_joint(id, p);
    }
    Scalar u = 0.0;
    if (t >= swing_start) u = std::min(1.0, static_cast<Scalar>(t - swing_start) / 12.0);
    const Scalar phi = phase0 + (phase1 - phase0) * ease(u);
    const Scalar dip = -0.06 * std::sin(kPi * u);
    // Hands together on the bat; the pair sweeps a horizontal arc.
    const Vector3 grip =
        hub + Vector3(radius * std::cos(phi), dip, radius * std::sin(phi));
    frame.set_joint(JointId::r_wrist, grip + Vector3(0.0, 0.02, -0.02));
    frame.set_joint(JointId::l_wrist, grip + Vector3(0.0, -0.02, 0.02));
    frame.set_joint(JointId::r_elbow,
                    hub + Vector3(0.55 * radius * std::cos(phi - 0.5), 0.02,
                                  0.55 * radius * std::sin(phi - 0.5) - 0.05));
    frame.set_joint(JointId::l_elbow,
                    hub + Vector3(0.55 * radius * std::cos(phi + 0.5), 0.02,
                                  0.55 * radius * std::sin(phi + 0.5) + 0.05));
    seq.frames.push_back(frame);
  }
  return seq;
}

pose::PoseSequence make_catcher(Index i, Rng& rng) {
  const Index n = 90 + static_cast<Index>(rng.uniform_int(51));
  const Scalar scale = rng.uniform(0.94, 1.06);
  const Scalar sway_phase = rng.uniform(0.0, 2.0 * kPi);

  pose::PoseSequence seq;
  seq.tracklet_id = sample_id("catcher", i);
  seq.fps = 30.0;
  for (Index t = 0; t < n; ++t) {
    pose::PoseFrame f;
    const Scalar s = scale;
    const Scalar time = static_cast<Scalar>(t) / 30.0;
    const Scalar sway = 0.012 * std::sin(2.0 * kPi * 0.5 * time + sway_phase);
    set(f, JointId::pelvis, sway, 0.55 * s, 0.00);
    set(f, JointId::r_hip, sway, 0.55 * s, -0.13 * s);
    set(f, JointId::r_knee, sway + 0.15 * s, 0.35 * s, -0.25 * s);
    set(f, JointId::r_ankle, sway + 0.12 * s, 0.08 * s, -0.27 * s);
    set(f, JointId::l_hip, sway, 0.55 * s, 0.13 * s);
    set(f, JointId::l_knee, sway + 0.15 * s, 0.35 * s, 0.25 * s);
    set(f, JointId::l_ankle, sway + 0.12 * s, 0.08 * s, 0.27 * s);
    set(f, JointId::spine, sway, 0.80 * s, 0.00);
    set(f, JointId::thorax, sway, 1.05 * s, 0.00);
    set(f, JointId::neck, sway, 1.18 * s, 0.00);
    set(f, JointId::head, sway, 1.30 * s, 0.00);
    set(f, JointId::r_shoulder, sway, 1.08 * s, -0.19 * s);
    set(f, JointId::r_elbow, sway + 0.12 * s, 0.85 * s, -0.22 * s);
    set(f, JointId::r_wrist, sway + 0.20 * s, 0.70 * s, -0.18 * s);
    set(f, JointId::l_shoulder, sway, 1.08 * s, 0.19 * s);
    set(f, JointId::l_elbow, sway + 0.25 * s, 0.85 * s, 0.20 * s);
    const Scalar glove = 0.05 * std::sin(2.0 * kPi * 0.3 * time + sway_phase);
    set(f, JointId::l_wrist, sway + 0.45 * s, 0.75 * s, 0.10 * s + glove);
    seq.frames.push_back(f);
  }
  return seq;
}

pose::PoseSequence make_fielder(Index i, Rng& rng) {
  const Index n = 90 + static_cast<Index>(rng.uniform_int(51));
  const Scalar scale = rng.uniform(0.94, 1.06);
  const Scalar speed = rng.uniform(2.6, 3.4);       // m/s
  const Scalar stride_hz = rng.uniform(2.0, 2.5);   // strides per second

  pose::PoseSequence seq;
  seq.tracklet_id = sample_id("fielder", i);
  seq.fps = 30.0;
  const pose::PoseFrame base = base_skeleton(scale);
  for (Index t = 0; t < n; ++t) {
    pose::PoseFrame frame = base;
    const Scalar time = static_cast<Scalar>(t) / 30.0;
    const Scalar phi = 2.0 * kPi * stride_hz * time;
    const Scalar forward = speed * time;
    const Scalar bob = 0.03 * std::sin(2.0 * phi);
    for (Index j = 0; j < pose::kNumJoints; ++j) {
      frame.joints(j, 0) += forward;
      frame.joints(j, 1) += bob;
    }
    auto swing = [&frame](JointId id, Scalar dx, Scalar dy) {
      Vector3 p = frame.joint(id);
      p.x() += dx;
      p.y() += dy;
      frame.set_joint(id, p);
    };
    const Scalar leg = std::sin(phi);
    swing(JointId::r_ankle, 0.30 * scale * leg, 0.10 * scale * std::max(0.0, leg));
    swing(JointId::l_ankle, -0.30 * scale * leg, 0.10 * scale * std::max(0.0, -leg));
    swing(JointId::r_knee, 0.15 * scale * leg, 0.05 * scale * std::max(0.0, leg));
    swing(JointId::l_knee, -0.15 * scale * leg, 0.05 * scale * std::max(0.0, -leg));
    swing(JointId::r_wrist, -0.25 * scale * leg, 0.0);
    swing(JointId::l_wrist, 0.25 * scale * leg, 0.0);
    swing(JointId::r_elbow, -0.12 * scale * leg, 0.0);
    swing(JointId::l_elbow, 0.12 * scale * leg, 0.0);
    seq.frames.push_back(frame);
  }
  return seq;
}

void add_noise(pose::PoseSequence& seq, Scalar sigma, Rng& rng) {
  for (pose::PoseFrame& frame : seq.frames) {
    for (Index j = 0; j < pose::kNumJoints; ++j) {
      for (Index c = 0; c < pose::kNumCoords; ++c) {
        frame.joints(j, c) += rng.normal(0.0, sigma);
      }
    }
  }
}

}  // namespace

tcn::LabeledDataset generate_role_dataset(Index n_per_class,
                                          std::uint64_t seed) {
  if (n_per_class < 1) {
    throw ValidationError("n_per_class must be at least 1");
  }
  constexpr Scalar kJitterSigma = 0.01;
  Rng root(seed);
  tcn::LabeledDataset data;
  data.sequences.reserve(static_cast<std::size_t>(4 * n_per_class));
  data.labels.reserve(static_cast<std::size_t>(4 * n_per_class));
  std::uint64_t stream = 0;
  for (Index i = 0; i < n_per_class; ++i) {
    {
      Rng rng = root.derive(stream++);
      SynthPitchSpec spec = random_pitch_spec(rng);
      spec.noise_sigma = kJitterSigma;
      pose::PoseSequence seq = generate_pitch(spec).sequence;
      seq.tracklet_id = sample_id("pitcher", i);
      data.sequences.push_back(std::move(seq));
      data.labels.push_back(static_cast<int>(pose::Role::pitcher));
    }
    {
      Rng rng = root.derive(stream++);
      pose::PoseSequence seq = make_batter(i, rng);
      add_noise(seq, kJitterSigma, rng);
      data.sequences.push_back(std::move(seq));
      data.labels.push_back(static_cast<int>(pose::Role::batter));
    }
    {
      Rng rng = root.derive(stream++);
      pose::PoseSequence seq = make_catcher(i, rng);
      add_noise(seq, kJitterSigma, rng);
      data.sequences.push_back(std::move(seq));
      data.labels.push_back(static_cast<int>(pose::Role::catcher));
    }
    {
      Rng rng = root.derive(stream++);
      pose::PoseSequence seq = make_fielder(i, rng);
      add_noise(seq, kJitterSigma, rng);
      data.sequences.push_back(std::move(seq));
      data.labels.push_back(static_cast<int>(pose::Role::fielder));
    }
  }
  return data;
}

}  // namespace pitchstats::synth
