// Pose-layer tests: joint fusion against hand-computed references, skeleton
// name/mirror maps, sequence validation, anatomical mirroring, batching, and
// the tracklet JSONL round trip with its failure modes.

#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pitchstats/error.hpp"
#include "pitchstats/pose/fusion.hpp"
#include "pitchstats/pose/joints.hpp"
#include "pitchstats/pose/sequence.hpp"
#include "pitchstats/pose/tracklet_io.hpp"
#include "pitchstats/rng.hpp"
#include "test_support.hpp"

using namespace pitchstats;
using pose::JointId;

namespace {

pose::PoseSequence random_sequence(Rng& rng, const std::string& id,
                                   Index n_frames, bool with_gaps) {
  pose::PoseSequence seq;
  seq.tracklet_id = id;
  seq.fps = rng.uniform(24.0, 60.0);
  seq.frames.resize(static_cast<std::size_t>(n_frames));
  for (pose::PoseFrame& frame : seq.frames) {
    for (int k = 0; k < pose::kNumJoints; ++k) {
      for (int c = 0; c < pose::kNumCoords; ++c) {
        frame.joints(k, c) = rng.normal(0, 1.0);
      }
      if (with_gaps && rng.uniform() < 0.15) {
        frame.valid_mask[static_cast<std::size_t>(k)] = false;
      }
    }
  }
  return seq;
}

}  // namespace

TEST_CASE("joint fusion matches a hand-worked two-joint example") {
  pose::FusionInputs in;
  in.j3d.resize(2, 3);
  in.j3d << 1.0, 2.0, 3.0,  //
      -1.0, 0.5, 2.0;
  in.vertices.resize(3, 3);
  in.vertices << 0.0, 0.0, 0.0,  //
      2.0, 2.0, 2.0,             //
      4.0, 0.0, -4.0;
  in.regressor.resize(2, 3);
  in.regressor << 0.2, 0.3, 0.5,  //
      0.5, 0.5, 0.0;
  in.w1 = 0.6;
  in.w2 = 0.4;

  const MatrixX3R fused = pose::fuse_joints(in);
  // Row 0: regressed = 0.2*(0,0,0) + 0.3*(2,2,2) + 0.5*(4,0,-4) = (2.6, .6, -1.4)
  CHECK(fused(0, 0) == doctest::Approx(0.6 * 1.0 + 0.4 * 2.6).epsilon(1e-12));
  CHECK(fused(0, 1) == doctest::Approx(0.6 * 2.0 + 0.4 * 0.6).epsilon(1e-12));
  CHECK(fused(0, 2) == doctest::Approx(0.6 * 3.0 + 0.4 * -1.4).epsilon(1e-12));
  // Row 1: regressed = 0.5*(0,0,0) + 0.5*(2,2,2) = (1, 1, 1)
  CHECK(fused(1, 0) == doctest::Approx(0.6 * -1.0 + 0.4 * 1.0).epsilon(1e-12));
  CHECK(fused(1, 1) == doctest::Approx(0.6 * 0.5 + 0.4 * 1.0).epsilon(1e-12));
  CHECK(fused(1, 2) == doctest::Approx(0.6 * 2.0 + 0.4 * 1.0).epsilon(1e-12));
}

TEST_CASE("joint fusion is linear in its weights") {
  Rng rng(211);
  pose::FusionInputs in;
  in.j3d = MatrixX3R::Random(4, 3);
  in.vertices = MatrixX3R::Random(6, 3);
  in.regressor.resize(4, 6);
  for (Index r = 0; r < 4; ++r) {
    ArrayX row(6);
    for (Index c = 0; c < 6; ++c) row[c] = rng.uniform(0.05, 1.0);
    in.regressor.row(r) = (row / row.sum()).matrix().transpose();
  }

  in.w1 = 0.7;
  in.w2 = 0.0;
  const MatrixX3R direct_only = pose::fuse_joints(in);
  in.w1 = 0.0;
  in.w2 = 0.3;
  const MatrixX3R mesh_only = pose::fuse_joints(in);
  in.w1 = 0.7;
  in.w2 = 0.3;
  const MatrixX3R both = pose::fuse_joints(in);
  CHECK((both - direct_only - mesh_only).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("joint fusion commutes with translation at unit total weight") {
  Rng rng(223);
  pose::FusionInputs in;
  in.j3d = MatrixX3R::Random(3, 3);
  in.vertices = MatrixX3R::Random(5, 3);
  in.regressor.resize(3, 5);
  for (Index r = 0; r < 3; ++r) {
    ArrayX row(5);
    for (Index c = 0; c < 5; ++c) row[c] = rng.uniform(0.05, 1.0);
    in.regressor.row(r) = (row / row.sum()).matrix().transpose();
  }
  in.w1 = 0.35;
  in.w2 = 0.65;
  const MatrixX3R base = pose::fuse_joints(in);

  const Eigen::RowVector3d shift(0.8, -1.5, 2.25);
  pose::FusionInputs moved = in;
  moved.j3d.rowwise() += shift;
  moved.vertices.rowwise() += shift;
  const MatrixX3R shifted = pose::fuse_joints(moved);
  CHECK((shifted - (base.rowwise() + shift)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("joint fusion validation") {
  pose::FusionInputs in;
  in.j3d = MatrixX3R::Zero(2, 3);
  in.vertices = MatrixX3R::Zero(3, 3);
  in.regressor = MatrixXR::Zero(2, 3);
  in.regressor << 0.5, 0.25, 0.25, 1.0, 0.0, 0.0;

  pose::FusionInputs bad_rows = in;
  bad_rows.regressor(0, 0) = 0.75;  // row sums to 1.25
  CHECK_THROWS_AS(pose::fuse_joints(bad_rows), ValidationError);

  pose::FusionInputs bad_shape = in;
  bad_shape.regressor = MatrixXR::Zero(2, 4);
  CHECK_THROWS_AS(pose::fuse_joints(bad_shape), ValidationError);

  pose::FusionInputs bad_weight = in;
  bad_weight.w1 = -0.1;
  CHECK_THROWS_AS(pose::fuse_joints(bad_weight), ValidationError);

  pose::FusionInputs bad_value = in;
  bad_value.j3d(0, 0) = std::nan("");
  CHECK_THROWS_AS(pose::fuse_joints(bad_value), ValidationError);
}

TEST_CASE("joint name map round trips and rejects unknowns") {
  for (int k = 0; k < pose::kNumJoints; ++k) {
    const auto id = static_cast<JointId>(k);
    CHECK(pose::joint_from_name(pose::joint_name(id)) == id);
  }
  CHECK_THROWS_AS(pose::joint_from_name("l_finger"), SchemaError);
}

TEST_CASE("mirror joint map is an involution that swaps sides") {
  for (int k = 0; k < pose::kNumJoints; ++k) {
    const auto id = static_cast<JointId>(k);
    CHECK(pose::mirror_joint(pose::mirror_joint(id)) == id);
  }
  CHECK(pose::mirror_joint(JointId::l_wrist) == JointId::r_wrist);
  CHECK(pose::mirror_joint(JointId::r_hip) == JointId::l_hip);
  CHECK(pose::mirror_joint(JointId::pelvis) == JointId::pelvis);
  CHECK(pose::mirror_joint(JointId::head) == JointId::head);
}

TEST_CASE("throwing-side joints follow handedness") {
  CHECK(pose::throwing_wrist(pose::Handedness::right) == JointId::r_wrist);
  CHECK(pose::throwing_wrist(pose::Handedness::left) == JointId::l_wrist);
  CHECK(pose::throwing_elbow(pose::Handedness::right) == JointId::r_elbow);
  CHECK(pose::throwing_elbow(pose::Handedness::left) == JointId::l_elbow);
  // The planted drive leg is on the throwing side.
  CHECK(pose::pitching_ankle(pose::Handedness::right) == JointId::r_ankle);
  CHECK(pose::pitching_ankle(pose::Handedness::left) == JointId::l_ankle);
}

TEST_CASE("label name round trips") {
  CHECK(pose::handedness_from_name("right") == pose::Handedness::right);
  CHECK(pose::handedness_from_name("left") == pose::Handedness::left);
  CHECK(pose::pitch_position_from_name("windup") == pose::PitchPosition::windup);
  CHECK(pose::pitch_position_from_name("stretch") == pose::PitchPosition::stretch);
  for (int r = 0; r < pose::kNumRoles; ++r) {
    const auto role = static_cast<pose::Role>(r);
    CHECK(pose::role_from_name(pose::role_name(role)) == role);
  }
  CHECK_THROWS_AS(pose::handedness_from_name("switch"), SchemaError);
  CHECK_THROWS_AS(pose::role_from_name("umpire"), SchemaError);
}

TEST_CASE("sequence validation catches structural problems") {
  Rng rng(229);
  pose::PoseSequence seq = random_sequence(rng, "ok", 4, false);
  CHECK_NOTHROW(seq.validate());

  pose::PoseSequence empty;
  empty.tracklet_id = "empty";
  CHECK_THROWS_AS(empty.validate(), ValidationError);

  pose::PoseSequence bad_fps = seq;
  bad_fps.fps = 0.0;
  CHECK_THROWS_AS(bad_fps.validate(), ValidationError);

  pose::PoseSequence bad_coord = seq;
  bad_coord.frames[1].joints(3, 2) = std::nan("");
  CHECK_THROWS_AS(bad_coord.validate(), ValidationError);

  // A non-finite coordinate under an invalid mask carries no information.
  bad_coord.frames[1].valid_mask[3] = false;
  CHECK_NOTHROW(bad_coord.validate());
}

TEST_CASE("anatomical mirror negates x, swaps sides, and self-inverts") {
  Rng rng(233);
  const pose::PoseSequence seq = random_sequence(rng, "mirror", 5, true);
  const pose::PoseSequence flipped = pose::mirror_x(seq);

  for (Index n = 0; n < seq.n_frames(); ++n) {
    const Vector3 r_wrist = seq.joint(n, JointId::r_wrist);
    const Vector3 as_left = flipped.joint(n, JointId::l_wrist);
    CHECK(as_left.x() == -r_wrist.x());
    CHECK(as_left.y() == r_wrist.y());
    CHECK(as_left.z() == r_wrist.z());
    const Vector3 pelvis = seq.joint(n, JointId::pelvis);
    const Vector3 pelvis_flipped = flipped.joint(n, JointId::pelvis);
    CHECK(pelvis_flipped.x() == -pelvis.x());
    CHECK(flipped.frame(n).joint_valid(JointId::l_knee) ==
          seq.frame(n).joint_valid(JointId::r_knee));
  }
  CHECK(pose::mirror_x(flipped) == seq);
}

TEST_CASE("batching pads short sequences and center-crops long ones") {
  Rng rng(239);
  const pose::PoseSequence short_seq = random_sequence(rng, "short", 3, false);
  const pose::PoseSequence long_seq = random_sequence(rng, "long", 9, false);
  const pose::PoseBatch batch = pose::make_batch({short_seq, long_seq}, 5);

  REQUIRE(batch.size() == 2);
  CHECK(batch.seq_len == 5);

  // Padded tail: invalid joints, pad_mask false.
  const pose::PoseSequence& padded = batch.sequences[0];
  REQUIRE(padded.n_frames() == 5);
  CHECK(padded.frame(2) == short_seq.frame(2));
  CHECK(batch.pad_mask[0] == std::vector<bool>({true, true, true, false, false}));
  for (Index t = 3; t < 5; ++t) {
    for (int k = 0; k < pose::kNumJoints; ++k) {
      CHECK_FALSE(padded.frame(t).valid_mask[static_cast<std::size_t>(k)]);
    }
  }

  // Center crop keeps frames [2, 7) of the 9-frame sequence.
  const pose::PoseSequence& cropped = batch.sequences[1];
  REQUIRE(cropped.n_frames() == 5);
  for (Index t = 0; t < 5; ++t) CHECK(cropped.frame(t) == long_seq.frame(t + 2));
  CHECK(batch.pad_mask[1] == std::vector<bool>(5, true));

  // Exact-length passthrough.
  const pose::PoseBatch same = pose::make_batch({long_seq}, 9);
  CHECK(same.sequences[0] == long_seq);

  CHECK_THROWS_AS(pose::make_batch({short_seq}, 0), ValidationError);
}

TEST_CASE("tracklet files round trip exactly") {
  testsup::TempDir dir;
  Rng rng(241);
  std::vector<pose::PoseSequence> original;
  for (int i = 0; i < 20; ++i) {
    original.push_back(random_sequence(rng, "trk-" + std::to_string(i),
                                       2 + static_cast<Index>(rng.uniform_int(6)),
                                       i % 2 == 1));
  }
  const std::string path = dir.file("tracklets.jsonl");
  pose::save_tracklets(original, path);
  const std::vector<pose::PoseSequence> loaded = pose::load_tracklets(path);
  REQUIRE(loaded.size() == original.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    CHECK(loaded[i] == original[i]);
  }

  // A second save of the loaded data is byte-identical to the first file.
  const std::string path2 = dir.file("tracklets2.jsonl");
  pose::save_tracklets(loaded, path2);
  CHECK(testsup::read_file(path) == testsup::read_file(path2));
}

TEST_CASE("records with permuted joint names load in canonical order") {
  testsup::TempDir dir;
  Rng rng(251);
  const pose::PoseSequence seq = random_sequence(rng, "perm", 2, false);

  // Write the record with joints listed in reverse order.
  std::string joint_list;
  std::string frame_rows;
  for (Index n = 0; n < 2; ++n) {
    std::string row;
    for (int k = pose::kNumJoints - 1; k >= 0; --k) {
      if (!row.empty()) row += ",";
      const Vector3 p = seq.joint(n, static_cast<JointId>(k));
      row += "[" + std::to_string(p.x()) + "," + std::to_string(p.y()) + "," +
             std::to_string(p.z()) + "]";
    }
    if (!frame_rows.empty()) frame_rows += ",";
    frame_rows += "[" + row + "]";
  }
  for (int k = pose::kNumJoints - 1; k >= 0; --k) {
    if (!joint_list.empty()) joint_list += ",";
    joint_list += "\"" + pose::joint_name(static_cast<JointId>(k)) + "\"";
  }
  const std::string path = dir.file("permuted.jsonl");
  testsup::write_file(
      path,
      "{\"format\":\"pose-tracklet\",\"version\":1}\n"
      "{\"tracklet_id\":\"perm\",\"fps\":30.0,\"joint_names\":[" +
          joint_list + "],\"frames\":[" + frame_rows + "]}\n");

  const std::vector<pose::PoseSequence> loaded = pose::load_tracklets(path);
  REQUIRE(loaded.size() == 1);
  for (Index n = 0; n < 2; ++n) {
    for (int k = 0; k < pose::kNumJoints; ++k) {
      const Vector3 got = loaded[0].joint(n, static_cast<JointId>(k));
      const Vector3 want = seq.joint(n, static_cast<JointId>(k));
      // std::to_string truncates, so compare loosely.
      CHECK((got - want).norm() <= 1e-5);
    }
  }
}

TEST_CASE("tracklet load failures carry line numbers") {
  testsup::TempDir dir;
  const std::string header = "{\"format\":\"pose-tracklet\",\"version\":1}\n";

  const std::string no_header = dir.file("no_header.jsonl");
  testsup::write_file(no_header, "{\"tracklet_id\":\"x\"}\n");
  CHECK_THROWS_AS(pose::load_tracklets(no_header), SchemaError);

  const std::string empty = dir.file("empty.jsonl");
  testsup::write_file(empty, "");
  CHECK_THROWS_AS(pose::load_tracklets(empty), SchemaError);

  const std::string bad_version = dir.file("bad_version.jsonl");
  testsup::write_file(bad_version, "{\"format\":\"pose-tracklet\",\"version\":9}\n");
  CHECK_THROWS_AS(pose::load_tracklets(bad_version), SchemaError);

  const std::string garbled = dir.file("garbled.jsonl");
  testsup::write_file(garbled, header + "{not json\n");
  const std::string parse_msg = testsup::thrown_message<ParseError>(
      [&] { pose::load_tracklets(garbled); });
  CHECK(parse_msg.find("line 2") != std::string::npos);

  const std::string missing_key = dir.file("missing_key.jsonl");
  testsup::write_file(missing_key,
                      header + "{\"tracklet_id\":\"x\",\"fps\":30.0}\n");
  const std::string schema_msg = testsup::thrown_message<SchemaError>(
      [&] { pose::load_tracklets(missing_key); });
  CHECK(schema_msg.find("joint_names") != std::string::npos);

  CHECK_THROWS_AS(pose::load_tracklets(dir.file("does_not_exist.jsonl")),
                  IoError);
}

TEST_CASE("lenient reader skips bad records and honors early stop") {
  testsup::TempDir dir;
  Rng rng(257);
  const pose::PoseSequence a = random_sequence(rng, "a", 2, false);
  const pose::PoseSequence c = random_sequence(rng, "c", 2, false);
  const std::string good_path = dir.file("good.jsonl");
  pose::save_tracklets({a, c}, good_path);

  // Splice a malformed line between the two records.
  std::string content = testsup::read_file(good_path);
  const std::size_t first_end = content.find('\n', content.find('\n') + 1);
  content.insert(first_end + 1, "{\"tracklet_id\":42}\n");
  const std::string path = dir.file("mixed.jsonl");
  testsup::write_file(path, content);

  std::vector<std::string> ids;
  std::vector<long> bad_lines;
  pose::for_each_tracklet(
      path, [&](pose::PoseSequence seq) { ids.push_back(seq.tracklet_id); },
      [&](long line, const std::string& message) {
        bad_lines.push_back(line);
        CHECK_FALSE(message.empty());
        return true;
      });
  CHECK(ids == std::vector<std::string>({"a", "c"}));
  CHECK(bad_lines == std::vector<long>({3}));

  // Returning false from on_error stops the scan.
  ids.clear();
  pose::for_each_tracklet(
      path, [&](pose::PoseSequence seq) { ids.push_back(seq.tracklet_id); },
      [&](long, const std::string&) { return false; });
  CHECK(ids == std::vector<std::string>({"a"}));
}

TEST_CASE("saving an invalid sequence is rejected") {
  testsup::TempDir dir;
  Rng rng(263);
  pose::PoseSequence seq = random_sequence(rng, "bad", 3, false);
  seq.frames[0].joints(0, 0) = std::numeric_limits<Scalar>::infinity();
  CHECK_THROWS_AS(pose::save_tracklets({seq}, dir.file("bad.jsonl")),
                  ValidationError);
}
