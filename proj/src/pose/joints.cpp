#include "pitchstats/pose/joints.hpp"

#include <unordered_map>

#include "pitchstats/error.hpp"

namespace pitchstats::pose {

const std::array<std::string, kNumJoints>& joint_names() {
  static const std::array<std::string, kNumJoints> names = {
      "pelvis",     "r_hip",   "r_knee",    "r_ankle", "l_hip",   "l_knee",
      "l_ankle",    "spine",   "thorax",    "neck",    "head",    "l_shoulder",
      "l_elbow",    "l_wrist", "r_shoulder", "r_elbow", "r_wrist"};
  return names;
}

const std::string& joint_name(JointId id) {
  return joint_names()[static_cast<std::size_t>(id)];
}

JointId joint_from_name(const std::string& name) {
  static const std::unordered_map<std::string, JointId> lookup = [] {
    std::unordered_map<std::string, JointId> map;
    for (int i = 0; i < kNumJoints; ++i) {
      map.emplace(joint_names()[static_cast<std::size_t>(i)], static_cast<JointId>(i));
    }
    return map;
  }();
  const auto it = lookup.find(name);
  if (it == lookup.end()) throw SchemaError("unknown joint name: " + name);
  return it->second;
}

JointId mirror_joint(JointId id) {
  switch (id) {
    case JointId::r_hip: return JointId::l_hip;
    case JointId::l_hip: return JointId::r_hip;
    case JointId::r_knee: return JointId::l_knee;
    case JointId::l_knee: return JointId::r_knee;
    case JointId::r_ankle: return JointId::l_ankle;
    case JointId::l_ankle: return JointId::r_ankle;
    case JointId::r_shoulder: return JointId::l_shoulder;
    case JointId::l_shoulder: return JointId::r_shoulder;
    case JointId::r_elbow: return JointId::l_elbow;
    case JointId::l_elbow: return JointId::r_elbow;
    case JointId::r_wrist: return JointId::l_wrist;
    case JointId::l_wrist: return JointId::r_wrist;
    default: return id;
  }
}

namespace {
const std::string kRight = "right";
const std::string kLeft = "left";
const std::string kWindup = "windup";
const std::string kStretch = "stretch";
const std::array<std::string, kNumRoles> kRoles = {"pitcher", "batter",
                                                   "catcher", "fielder"};
}  // namespace

const std::string& handedness_name(Handedness h) {
  return h == Handedness::right ? kRight : kLeft;
}

const std::string& pitch_position_name(PitchPosition p) {
  return p == PitchPosition::windup ? kWindup : kStretch;
}

const std::string& role_name(Role r) {
  return kRoles[static_cast<std::size_t>(r)];
}

Handedness handedness_from_name(const std::string& name) {
  if (name == kRight) return Handedness::right;
  if (name == kLeft) return Handedness::left;
  throw SchemaError("unknown handedness: " + name);
}

PitchPosition pitch_position_from_name(const std::string& name) {
  if (name == kWindup) return PitchPosition::windup;
  if (name == kStretch) return PitchPosition::stretch;
  throw SchemaError("unknown pitch position: " + name);
}

Role role_from_name(const std::string& name) {
  for (int i = 0; i < kNumRoles; ++i) {
    if (kRoles[static_cast<std::size_t>(i)] == name) return static_cast<Role>(i);
  }
  throw SchemaError("unknown role: " + name);
}

JointId throwing_wrist(Handedness h) {
  return h == Handedness::right ? JointId::r_wrist : JointId::l_wrist;
}

JointId throwing_elbow(Handedness h) {
  return h == Handedness::right ? JointId::r_elbow : JointId::l_elbow;
}

JointId pitching_ankle(Handedness h) {
  return h == Handedness::right ? JointId::r_ankle : JointId::l_ankle;
}

}  // namespace pitchstats::pose
