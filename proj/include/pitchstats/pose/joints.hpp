#pragma once

#include <array>
#include <string>

namespace pitchstats::pose {

inline constexpr int kNumJoints = 17;
inline constexpr int kNumCoords = 3;

// 17-joint skeleton in Human3.6M order. Coordinates are meters with
// x = lateral (toward home plate for a pitch), y = up, z = toward camera.
enum class JointId : int {
  pelvis = 0,
  r_hip = 1,
  r_knee = 2,
  r_ankle = 3,
  l_hip = 4,
  l_knee = 5,
  l_ankle = 6,
  spine = 7,
  thorax = 8,
  neck = 9,
  head = 10,
  l_shoulder = 11,
  l_elbow = 12,
  l_wrist = 13,
  r_shoulder = 14,
  r_elbow = 15,
  r_wrist = 16,
};

const std::array<std::string, kNumJoints>& joint_names();

const std::string& joint_name(JointId id);

// Canonical index for a name; throws SchemaError for unknown names.
JointId joint_from_name(const std::string& name);

// The same joint on the opposite body side (identity for midline joints).
JointId mirror_joint(JointId id);

enum class Handedness { right = 0, left = 1 };
enum class PitchPosition { windup = 0, stretch = 1 };
enum class Role { pitcher = 0, batter = 1, catcher = 2, fielder = 3 };

inline constexpr int kNumRoles = 4;

const std::string& handedness_name(Handedness h);
const std::string& pitch_position_name(PitchPosition p);
const std::string& role_name(Role r);

Handedness handedness_from_name(const std::string& name);
PitchPosition pitch_position_from_name(const std::string& name);
Role role_from_name(const std::string& name);

// Throwing-arm and pitching-leg joints for a given handedness.
JointId throwing_wrist(Handedness h);
JointId throwing_elbow(Handedness h);
JointId pitching_ankle(Handedness h);

}  // namespace pitchstats::pose
