// Release gate for the pitch-analytics stack. Each criterion below is an
// independent end-to-end check with its own data, tolerance, and (where it
// matters) wall-clock budget; the binary prints exactly one PASS/FAIL line
// per criterion and exits nonzero if any of them fail.
//
// The checks deliberately re-derive their expectations from first principles
// (naive convolution, finite differences, analytic synthesis truths) instead
// of reusing library helpers, so a regression in the library cannot hide
// itself.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iterator>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pitchstats/error.hpp"
#include "pitchstats/kin/analyze.hpp"
#include "pitchstats/kin/kinematics.hpp"
#include "pitchstats/metrics/eval.hpp"
#include "pitchstats/nn/loss.hpp"
#include "pitchstats/nn/ops.hpp"
#include "pitchstats/nn/tape.hpp"
#include "pitchstats/nn/tensor.hpp"
#include "pitchstats/nn/threading.hpp"
#include "pitchstats/pose/sequence.hpp"
#include "pitchstats/pose/tracklet_io.hpp"
#include "pitchstats/rng.hpp"
#include "pitchstats/synth/synthgen.hpp"
#include "pitchstats/tcn/classify.hpp"
#include "pitchstats/tcn/model.hpp"
#include "pitchstats/tcn/model_io.hpp"
#include "pitchstats/tcn/train.hpp"
#include "pitchstats/types.hpp"

#include "../test_support.hpp"

using namespace pitchstats;
using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Small reporting helpers.
// ---------------------------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, ...) {
  va_list args;
  va_start(args, pattern);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return std::string(buf);
}

// Accumulates sub-checks; remembers the first failure so the criterion line
// can say what actually went wrong.
struct Check {
  long n = 0;
  long failed = 0;
  std::string why;

  void expect(bool cond, const std::string& msg) {
    ++n;
    if (!cond) {
      ++failed;
      if (why.empty()) why = msg;
    }
  }
  bool ok() const { return failed == 0; }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------------
// Random tensors and a scalar-reduction tape node for gradient checking.
// ---------------------------------------------------------------------------

nn::Tensor random_tensor(std::vector<Index> shape, Rng& rng, Scalar scale = 1.0) {
  nn::Tensor t(std::move(shape));
  for (Index i = 0; i < t.size(); ++i) t[i] = rng.normal(0.0, scale);
  return t;
}

// Values bounded away from zero, for kink-free ReLU/dropout probing.
nn::Tensor random_offzero(std::vector<Index> shape, Rng& rng) {
  nn::Tensor t(std::move(shape));
  for (Index i = 0; i < t.size(); ++i) {
    Scalar mag = 0.2 + 1.1 * rng.uniform();
    t[i] = rng.uniform() < 0.5 ? -mag : mag;
  }
  return t;
}

// Fixed-weight scalar reduction so every op under test feeds a scalar root
// with a nontrivial upstream gradient.
nn::NodeId weighted_sum(nn::Tape& tape, nn::NodeId x, const ArrayX& w) {
  const nn::Tensor& xv = tape.value(x);
  nn::Tensor out({1});
  out[0] = (xv.array() * w).sum();
  return tape.push(std::move(out), tape.needs_grad(x),
                   [x, w](nn::Tape& t, nn::NodeId self) {
                     t.accumulate(x, w * t.grad(self)[0]);
                   });
}

// Central-difference gradient check of a tape program. `forward` must be a
// pure function of the leaf values (stochastic ops must re-seed their own
// generator per call). Analytic and numeric derivatives must agree within
// max(1e-7, 1e-4 * scale) per coordinate.
struct GradHarness {
  long coords = 0;
  Check check;

  using Forward =
      std::function<nn::NodeId(nn::Tape&, const std::vector<nn::NodeId>&)>;

  void run(const std::string& label, std::vector<nn::Tensor> leaves,
           const Forward& forward, Index stride = 1) {
    nn::Tape tape;
    std::vector<nn::NodeId> ids;
    ids.reserve(leaves.size());
    for (const nn::Tensor& t : leaves) ids.push_back(tape.leaf(t, true));
    tape.backward(forward(tape, ids));

    std::vector<ArrayX> analytic;
    analytic.reserve(ids.size());
    for (nn::NodeId id : ids) analytic.push_back(tape.grad(id).array());

    auto value_at = [&](const std::vector<nn::Tensor>& point) {
      nn::Tape fresh;
      std::vector<nn::NodeId> pids;
      pids.reserve(point.size());
      for (const nn::Tensor& t : point) pids.push_back(fresh.leaf(t, false));
      return fresh.value(forward(fresh, pids))[0];
    };

    const Scalar h = 1e-5;
    for (std::size_t k = 0; k < leaves.size(); ++k) {
      for (Index i = 0; i < leaves[k].size(); i += stride) {
        std::vector<nn::Tensor> plus = leaves;
        std::vector<nn::Tensor> minus = leaves;
        plus[k][i] += h;
        minus[k][i] -= h;
        Scalar fd = (value_at(plus) - value_at(minus)) / (2 * h);
        Scalar an = analytic[k][i];
        Scalar tol =
            std::max<Scalar>(1e-7, 1e-4 * std::max(std::abs(fd), std::abs(an)));
        ++coords;
        check.expect(std::abs(an - fd) <= tol,
                     fmt("%s leaf %zu coord %lld: analytic %.3e vs fd %.3e",
                         label.c_str(), k, static_cast<long long>(i), an, fd));
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Naive dilated convolution, written independently of the library kernel.
// ---------------------------------------------------------------------------

nn::Tensor conv_reference(const nn::Tensor& input, const nn::Tensor& kernel,
                          const nn::Tensor& bias, int dilation) {
  const Index B = input.shape()[0], Cin = input.shape()[1], N = input.shape()[2];
  const Index Cout = kernel.shape()[0], K = kernel.shape()[2];
  nn::Tensor out({B, Cout, N});
  for (Index b = 0; b < B; ++b) {
    for (Index o = 0; o < Cout; ++o) {
      for (Index t = 0; t < N; ++t) {
        Scalar acc = bias[o];
        for (Index i = 0; i < Cin; ++i) {
          for (Index j = 0; j < K; ++j) {
            Index src = t + (j - K / 2) * dilation;
            if (src < 0 || src >= N) continue;
            acc += kernel[(o * Cin + i) * K + j] * input[(b * Cin + i) * N + src];
          }
        }
        out[(b * Cout + o) * N + t] = acc;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic-pitch plumbing shared by the kinematics criteria.
// ---------------------------------------------------------------------------

kin::WristTrajectory trajectory_of(const synth::SynthPitch& pitch) {
  const pose::PoseSequence& seq = pitch.sequence;
  pose::JointId wrist = pose::throwing_wrist(pitch.truth.handedness);
  pose::JointId elbow = pose::throwing_elbow(pitch.truth.handedness);
  kin::WristTrajectory traj;
  traj.fps = seq.fps;
  traj.handedness = pitch.truth.handedness;
  traj.wrist.resize(seq.n_frames(), 3);
  traj.elbow.resize(seq.n_frames(), 3);
  for (Index t = 0; t < seq.n_frames(); ++t) {
    traj.wrist.row(t) = seq.joint(t, wrist).transpose();
    traj.elbow.row(t) = seq.joint(t, elbow).transpose();
  }
  return traj;
}

synth::SynthPitchSpec drawn_spec(Rng& rng, Scalar noise) {
  synth::SynthPitchSpec spec = synth::random_pitch_spec(rng);
  spec.noise_sigma = noise;
  return spec;
}

// ---------------------------------------------------------------------------
// CLI plumbing.
// ---------------------------------------------------------------------------

std::string cli_path() { return PITCHSTATS_CLI_PATH; }

testsup::RunResult run_cli(const std::vector<std::string>& args) {
  return testsup::run_command(cli_path(), args);
}

// ---------------------------------------------------------------------------
// Criterion 1: analytic gradients match central finite differences for every
// primitive and for the composed five-block network.
// ---------------------------------------------------------------------------

Outcome criterion_gradients() {
  auto t0 = std::chrono::steady_clock::now();
  GradHarness g;
  Rng rng(20250819);

  auto reduce_weights = [&](Index n) {
    ArrayX w(n);
    for (Index i = 0; i < n; ++i) w[i] = rng.normal(0.0, 1.0);
    return w;
  };

  {  // dilated convolution: input, kernel, and bias all grad-bearing
    ArrayX w = reduce_weights(2 * 4 * 7);
    g.run("conv1d",
          {random_tensor({2, 3, 7}, rng), random_tensor({4, 3, 3}, rng, 0.5),
           random_tensor({4}, rng, 0.5)},
          [w](nn::Tape& t, const std::vector<nn::NodeId>& ids) {
            return weighted_sum(t, nn::conv1d(t, ids[0], ids[1], ids[2], 2), w);
          });
  }
  {  // batchnorm, training statistics
    ArrayX w = reduce_weights(2 * 3 * 5);
    g.run("batchnorm-train",
          {random_tensor({2, 3, 5}, rng), random_tensor({3}, rng, 0.5),
           random_tensor({3}, rng, 0.5)},
          [w](nn::Tape& t, const std::vector<nn::NodeId>& ids) {
            nn::Tensor rm({3});
            nn::Tensor rv({3});
            rm.array().setZero();
            rv.array().setOnes();
            nn::NodeId y = nn::batchnorm1d(t, ids[0], ids[1], ids[2], rm, rv,
                                           true, 0.1, 1e-5);
            return weighted_sum(t, y, w);
          });
  }
  {  // batchnorm, frozen running statistics
    ArrayX w = reduce_weights(2 * 3 * 5);
    nn::Tensor rm = random_tensor({3}, rng, 0.3);
    nn::Tensor rv({3});
    for (Index i = 0; i < 3; ++i) rv[i] = 0.5 + rng.uniform();
    g.run("batchnorm-eval",
          {random_tensor({2, 3, 5}, rng), random_tensor({3}, rng, 0.5),
           random_tensor({3}, rng, 0.5)},
          [w, rm, rv](nn::Tape& t, const std::vector<nn::NodeId>& ids) {
            nn::Tensor mean = rm;
            nn::Tensor var = rv;
            nn::NodeId y = nn::batchnorm1d(t, ids[0], ids[1], ids[2], mean, var,
                                           false, 0.1, 1e-5);
            return weighted_sum(t, y, w);
          });
  }
  {  // relu, probed away from the kink
    ArrayX w = reduce_weights(2 * 3 * 4);
    g.run("relu", {random_offzero({2, 3, 4}, rng)},
          [w](nn::Tape& t, const std::vector<nn::NodeId>& ids) {
            return weighted_sum(t, nn::relu(t, ids[0]), w);
          });
  }
  {  // fully connected layer
    ArrayX w = reduce_weights(3 * 5);
    g.run("linear",
          {random_tensor({3, 4}, rng), random_tensor({5, 4}, rng, 0.5),
           random_tensor({5}, rng, 0.5)},
          [w](nn::Tape& t, const std::vector<nn::NodeId>& ids) {
            return weighted_sum(t, nn::linear(t, ids[0], ids[1], ids[2]), w);
          });
  }
  {  // residual add
    ArrayX w = reduce_weights(2 * 3 * 4);
    g.run("add", {random_tensor({2, 3, 4}, rng), random_tensor({2, 3, 4}, rng)},
          [w](nn::Tape& t, const std::vector<nn::NodeId>& ids) {
            return weighted_sum(t, nn::add(t, ids[0], ids[1]), w);
          });
  }
  {  // global average pooling
    ArrayX w = reduce_weights(2 * 3);
    g.run("global-avg-pool", {random_tensor({2, 3, 6}, rng)},
          [w](nn::Tape& t, const std::vector<nn::NodeId>& ids) {
            return weighted_sum(t, nn::global_avg_pool(t, ids[0]), w);
          });
  }
  {  // dropout with a fixed mask (same generator seed on every evaluation)
    ArrayX w = reduce_weights(2 * 4 * 5);
    g.run("dropout", {random_offzero({2, 4, 5}, rng)},
          [w](nn::Tape& t, const std::vector<nn::NodeId>& ids) {
            Rng mask(77);
            return weighted_sum(t, nn::dropout(t, ids[0], 0.35, true, mask), w);
          });
  }
  {  // softmax head into the focal objective
    nn::FocalLossParams fl;
    fl.gamma = 2.0;
    fl.alpha = {0.5, 0.3, 0.2};
    std::vector<int> targets = {0, 2, 1, 0};
    g.run("softmax-focal", {random_tensor({4, 3}, rng)},
          [fl, targets](nn::Tape& t, const std::vector<nn::NodeId>& ids) {
            return nn::focal_loss(t, nn::softmax(t, ids[0]), targets, fl);
          });
  }
  {  // sigmoid head through the two-class expansion into the focal objective
    nn::FocalLossParams fl;
    fl.gamma = 1.5;
    fl.alpha = {0.4, 0.6};
    std::vector<int> targets = {0, 1, 1, 0, 1};
    g.run("sigmoid-focal", {random_tensor({5, 1}, rng)},
          [fl, targets](nn::Tape& t, const std::vector<nn::NodeId>& ids) {
            nn::NodeId pair = nn::binary_pair(t, nn::sigmoid(t, ids[0]));
            return nn::focal_loss(t, pair, targets, fl);
          });
  }

  // Composed network: a small but fully featured config (projection and
  // pass-through skips, all five dilations, dropout active) differentiated
  // with respect to every parameter tensor, a few coordinates per tensor.
  {
    tcn::TcnConfig cfg;
    cfg.in_channels = 4;
    cfg.block_channels = {2, 2, 3, 3, 4};
    cfg.kernel_size = 3;
    cfg.dilations = {1, 2, 4, 8, 16};
    cfg.dropout_rate = 0.25;
    cfg.head = tcn::Head::role4;
    cfg.seq_len = 36;
    tcn::TcnModel model(cfg, 31);

    nn::Tensor input = random_tensor({2, 36, 2, 2}, rng);
    std::vector<int> targets = {1, 3};
    nn::FocalLossParams fl;
    fl.gamma = 2.0;
    fl.alpha = {0.25, 0.5, 0.75, 1.0};

    auto loss_value = [&]() {
      nn::Tape tape;
      Rng drop(5);
      tcn::TcnForward f = tcn::tcn_forward(tape, model, input, true, drop);
      return tape.value(nn::focal_loss(tape, f.output, targets, fl))[0];
    };

    nn::Tape tape;
    Rng drop(5);
    tcn::TcnForward f = tcn::tcn_forward(tape, model, input, true, drop);
    tape.backward(nn::focal_loss(tape, f.output, targets, fl));
    std::vector<ArrayX> analytic;
    for (nn::NodeId id : f.param_nodes) analytic.push_back(tape.grad(id).array());

    std::vector<nn::Tensor*> params = model.parameters();
    const Scalar h = 1e-5;
    for (std::size_t k = 0; k < params.size(); ++k) {
      Index stride = std::max<Index>(1, params[k]->size() / 3);
      for (Index i = 0; i < params[k]->size(); i += stride) {
        Scalar saved = (*params[k])[i];
        (*params[k])[i] = saved + h;
        Scalar up = loss_value();
        (*params[k])[i] = saved - h;
        Scalar down = loss_value();
        (*params[k])[i] = saved;
        Scalar fd = (up - down) / (2 * h);
        Scalar an = analytic[k][i];
        Scalar tol =
            std::max<Scalar>(1e-7, 1e-4 * std::max(std::abs(fd), std::abs(an)));
        ++g.coords;
        g.check.expect(std::abs(an - fd) <= tol,
                       fmt("composed net param %zu coord %lld: %.3e vs %.3e", k,
                           static_cast<long long>(i), an, fd));
      }
    }
  }

  double secs = seconds_since(t0);
  bool in_budget = secs < 60.0;
  bool enough = g.coords >= 100;
  bool pass = g.check.ok() && in_budget && enough;
  std::string detail = g.check.ok()
                           ? fmt("%ld coordinates agree", g.coords)
                           : g.check.why;
  if (!in_budget) detail += fmt("; over budget (%.1fs >= 60s)", secs);
  if (!enough) detail += fmt("; only %ld coordinates", g.coords);
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// Criterion 2: the dilated convolution matches a naive reference over a grid
// of shapes and dilations.
// ---------------------------------------------------------------------------

Outcome criterion_convolution() {
  Rng rng(42);
  Check check;
  long shapes = 0;
  Scalar worst = 0;
  for (Index B : {1, 2}) {
    for (Index Cin : {1, 3}) {
      for (Index Cout : {1, 4}) {
        for (Index N : {1, 5, 17}) {
          for (int d : {1, 2, 4, 8, 16}) {
            for (Index K : {1, 3, 5}) {
              nn::Tensor input = random_tensor({B, Cin, N}, rng);
              nn::Tensor kernel = random_tensor({Cout, Cin, K}, rng);
              nn::Tensor bias = random_tensor({Cout}, rng);
              nn::Tensor fast = nn::conv1d_dilated(input, kernel, bias, d);
              nn::Tensor slow = conv_reference(input, kernel, bias, d);
              Scalar diff = (fast.array() - slow.array()).abs().maxCoeff();
              worst = std::max(worst, diff);
              ++shapes;
              check.expect(
                  diff <= 1e-12,
                  fmt("B%lld Cin%lld Cout%lld N%lld d%d K%lld: max |diff| %.3e",
                      static_cast<long long>(B), static_cast<long long>(Cin),
                      static_cast<long long>(Cout), static_cast<long long>(N),
                      d, static_cast<long long>(K), diff));
            }
          }
        }
      }
    }
  }
  bool pass = check.ok() && shapes >= 200;
  std::string detail =
      check.ok() ? fmt("%ld shapes, worst deviation %.2e", shapes, worst)
                 : check.why;
  if (shapes < 200) detail += fmt("; only %ld shapes", shapes);
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// Criterion 3: the focal objective degenerates to cross-entropy at gamma 0
// with unit weights, and matches its closed form at p = 1/2.
// ---------------------------------------------------------------------------

Outcome criterion_focal_loss() {
  Rng rng(7);
  Check check;

  const Index B = 64, C = 4;
  nn::Tensor probs({B, C});
  std::vector<int> targets(B);
  for (Index b = 0; b < B; ++b) {
    Scalar total = 0;
    for (Index c = 0; c < C; ++c) {
      probs[b * C + c] = 0.05 + rng.uniform();
      total += probs[b * C + c];
    }
    for (Index c = 0; c < C; ++c) probs[b * C + c] /= total;
    targets[b] = static_cast<int>(rng.uniform_int(C));
  }

  nn::FocalLossParams ce;
  ce.gamma = 0.0;
  ce.alpha = nn::uniform_alpha(C);
  Scalar got = nn::focal_loss_value(probs, targets, ce);
  Scalar want = 0;
  for (Index b = 0; b < B; ++b) want -= std::log(probs[b * C + targets[b]]);
  want /= B;
  check.expect(std::abs(got - want) <= 1e-12,
               fmt("cross-entropy reduction: %.17g vs %.17g", got, want));

  nn::Tensor half({1, 2});
  half[0] = 0.5;
  half[1] = 0.5;
  nn::FocalLossParams focal;
  focal.gamma = 2.0;
  focal.alpha = {0.25, 0.25};
  Scalar closed = 0.25 * 0.25 * std::log(2.0);
  Scalar value = nn::focal_loss_value(half, {0}, focal);
  check.expect(std::abs(value - closed) <= 1e-9,
               fmt("p=1/2 closed form: %.17g vs %.17g", value, closed));

  return {check.ok(),
          check.ok() ? "cross-entropy reduction and closed form agree"
                     : check.why};
}

// ---------------------------------------------------------------------------
// Criterion 4: release detection is exact on clean trajectories and nearly
// exact under per-joint Gaussian noise.
// ---------------------------------------------------------------------------

Outcome criterion_release_detection() {
  Check check;
  Rng rng(11001);

  const int kTrials = 500;
  for (int i = 0; i < kTrials; ++i) {
    synth::SynthPitch pitch = synth::generate_pitch(drawn_spec(rng, 0.0));
    kin::ReleaseEvent event = kin::detect_release_event(trajectory_of(pitch));
    check.expect(event.release_frame == pitch.truth.release_frame,
                 fmt("clean trial %d: release %lld vs truth %lld", i,
                     static_cast<long long>(event.release_frame),
                     static_cast<long long>(pitch.truth.release_frame)));
  }

  int within1 = 0, within5 = 0;
  double detect_secs = 0;
  for (int i = 0; i < kTrials; ++i) {
    synth::SynthPitch pitch = synth::generate_pitch(drawn_spec(rng, 0.01));
    kin::WristTrajectory traj = trajectory_of(pitch);
    auto t0 = std::chrono::steady_clock::now();
    long long err = 1 << 20;
    try {
      kin::ReleaseEvent event = kin::detect_release_event(traj);
      err = std::llabs(static_cast<long long>(event.release_frame) -
                       static_cast<long long>(pitch.truth.release_frame));
    } catch (const NumericError&) {
      // An undetectable trial counts as a miss at every margin.
    }
    detect_secs += seconds_since(t0);
    if (err <= 1) ++within1;
    if (err <= 5) ++within5;
  }
  Scalar a1 = Scalar(within1) / kTrials;
  Scalar a5 = Scalar(within5) / kTrials;
  check.expect(a1 >= 0.95, fmt("noisy +/-1 accuracy %.3f < 0.95", a1));
  check.expect(a5 >= 0.99, fmt("noisy +/-5 accuracy %.3f < 0.99", a5));
  check.expect(detect_secs < 30.0,
               fmt("detection time %.1fs >= 30s budget", detect_secs));

  return {check.ok(),
          check.ok() ? fmt("clean exact 500/500; noisy A1 %.3f A5 %.3f (%.2fs)",
                           a1, a5, detect_secs)
                     : check.why};
}

// ---------------------------------------------------------------------------
// Criterion 5: the lever-arm velocity is within 2% of analytic truth on clean
// synthesis and matches its closed form exactly.
// ---------------------------------------------------------------------------

Outcome criterion_velocity() {
  Check check;
  Rng rng(11002);

  const int kTrials = 500;
  Scalar worst_rel = 0;
  for (int i = 0; i < kTrials; ++i) {
    synth::SynthPitch pitch = synth::generate_pitch(drawn_spec(rng, 0.0));
    kin::WristTrajectory traj = trajectory_of(pitch);
    kin::ReleaseEvent event = kin::detect_release_event(traj);
    Scalar lever = kin::median_lever_arm(traj);
    Scalar speed =
        kin::pitch_velocity(kin::velocity_inputs(traj, event.release_frame, lever));
    Scalar rel = std::abs(speed - pitch.truth.release_speed_mps) /
                 pitch.truth.release_speed_mps;
    worst_rel = std::max(worst_rel, rel);
    check.expect(rel <= 0.02, fmt("trial %d: speed %.4f vs truth %.4f "
                                  "(rel err %.4f)",
                                  i, speed, pitch.truth.release_speed_mps, rel));
  }

  // 0.06 rad per frame at 30 fps on a 0.5 m lever: 0.06 * 30 * 0.5 = 0.9 m/s.
  kin::VelocityInputs v;
  v.wrist_prev = Vector2(std::cos(1.0), std::sin(1.0));
  v.wrist_at = Vector2(std::cos(1.06), std::sin(1.06));
  v.fps = 30.0;
  v.lever_arm = 0.5;
  Scalar speed = kin::pitch_velocity(v);
  check.expect(std::abs(speed - 0.9) <= 1e-9,
               fmt("closed form: %.12f vs 0.9", speed));

  return {check.ok(),
          check.ok() ? fmt("500/500 within 2%% (worst %.4f); closed form 0.9",
                           worst_rel)
                     : check.why};
}

// ---------------------------------------------------------------------------
// Criterion 6: release extension matches the 3-4-12 right triangle and obeys
// the metric axioms.
// ---------------------------------------------------------------------------

Outcome criterion_extension() {
  Check check;
  Scalar d = kin::release_extension(Vector3(3, 4, 12), Vector3(0, 0, 0));
  check.expect(std::abs(d - 13.0) <= 1e-12, fmt("3-4-12 gives %.15f", d));

  Rng rng(33);
  auto point = [&]() {
    return Vector3(rng.normal(0, 2), rng.normal(0, 2), rng.normal(0, 2));
  };
  for (int i = 0; i < 1000; ++i) {
    Vector3 a = point(), b = point(), c = point();
    Scalar ab = kin::release_extension(a, b);
    Scalar ba = kin::release_extension(b, a);
    Scalar bc = kin::release_extension(b, c);
    Scalar ac = kin::release_extension(a, c);
    check.expect(ab >= 0, fmt("triple %d: negative distance", i));
    check.expect(kin::release_extension(a, a) == 0.0,
                 fmt("triple %d: identity violated", i));
    check.expect(ab == ba, fmt("triple %d: asymmetric", i));
    check.expect(ac <= ab + bc + 1e-12, fmt("triple %d: triangle violated", i));
    Vector3 shift(0.7, -1.3, 2.9);
    Scalar shifted = kin::release_extension(a + shift, b + shift);
    check.expect(std::abs(shifted - ab) <= 1e-12,
                 fmt("triple %d: translation moved the distance", i));
  }
  return {check.ok(),
          check.ok() ? "3-4-12 exact; metric axioms hold on 1000 triples"
                     : check.why};
}

// ---------------------------------------------------------------------------
// Criterion 7: the four-role classifier reaches 95% held-out accuracy inside
// the training budget, and the class-balanced focal objective keeps minority
// recall under heavy imbalance.
// ---------------------------------------------------------------------------

Scalar binary_recall(const tcn::TcnModel& model,
                     const std::vector<pose::PoseSequence>& sequences,
                     const std::vector<int>& labels, int positive) {
  pose::PoseBatch batch = pose::make_batch(sequences, model.config().seq_len);
  nn::Tensor probs = model.predict(tcn::to_input_tensor(batch));
  long hits = 0, total = 0;
  for (Index b = 0; b < probs.shape()[0]; ++b) {
    if (labels[static_cast<std::size_t>(b)] != positive) continue;
    ++total;
    int predicted = probs[b] > 0.5 ? 1 : 0;
    if (predicted == positive) ++hits;
  }
  return total == 0 ? 0.0 : Scalar(hits) / Scalar(total);
}

Outcome criterion_role_training() {
  auto t0 = std::chrono::steady_clock::now();
  Check check;

  // Held-out split: every fifth sample. The generator interleaves the four
  // classes, so a stride-5 split stays exactly balanced (40 per class).
  tcn::LabeledDataset all = synth::generate_role_dataset(200, 20260819);
  tcn::LabeledDataset train;
  std::vector<pose::PoseSequence> test_seqs;
  std::vector<int> test_labels;
  for (Index i = 0; i < all.size(); ++i) {
    if (i % 5 == 0) {
      test_seqs.push_back(all.sequences[static_cast<std::size_t>(i)]);
      test_labels.push_back(all.labels[static_cast<std::size_t>(i)]);
    } else {
      train.sequences.push_back(all.sequences[static_cast<std::size_t>(i)]);
      train.labels.push_back(all.labels[static_cast<std::size_t>(i)]);
    }
  }

  tcn::TcnConfig cfg;
  cfg.block_channels = {16, 16, 24, 24, 32};
  cfg.dropout_rate = 0.2;
  cfg.head = tcn::Head::role4;
  cfg.seq_len = 100;
  tcn::TcnModel model(cfg, 7);

  tcn::TrainRun run;
  run.epochs = 200;
  run.batch_size = 48;
  run.optimizer.algo = nn::OptimAlgo::adamw;
  run.optimizer.lr = 1e-2;
  run.optimizer.weight_decay = 1e-4;
  run.loss.gamma = 2.0;
  run.seed = 11;
  run.early_stop_patience = 3;
  tcn::train(model, train, run);

  pose::PoseBatch batch = pose::make_batch(test_seqs, cfg.seq_len);
  nn::Tensor probs = model.predict(tcn::to_input_tensor(batch));
  long correct = 0;
  for (Index b = 0; b < probs.shape()[0]; ++b) {
    Index best = 0;
    for (Index c = 1; c < 4; ++c) {
      if (probs[b * 4 + c] > probs[b * 4 + best]) best = c;
    }
    if (static_cast<int>(best) == test_labels[static_cast<std::size_t>(b)]) {
      ++correct;
    }
  }
  Scalar accuracy = Scalar(correct) / Scalar(test_seqs.size());
  check.expect(accuracy >= 0.95,
               fmt("held-out role accuracy %.3f < 0.95 (%zu epochs run)",
                   accuracy, run.history.size()));

  // Imbalance study: 9:1 right/left training data, balanced test set, one
  // focal run against one plain cross-entropy run from the same init.
  Rng stream(90210);
  auto make_pitches = [&](int n, pose::Handedness hand,
                          std::vector<pose::PoseSequence>& seqs,
                          std::vector<int>& labels) {
    for (int i = 0; i < n; ++i) {
      Rng child = stream.derive(static_cast<std::uint64_t>(labels.size()) + 1);
      synth::SynthPitchSpec spec = synth::random_pitch_spec(child);
      spec.handedness = hand;
      spec.noise_sigma = 0.005;
      seqs.push_back(synth::generate_pitch(spec).sequence);
      labels.push_back(hand == pose::Handedness::left ? 1 : 0);
    }
  };

  tcn::LabeledDataset skewed;
  make_pitches(180, pose::Handedness::right, skewed.sequences, skewed.labels);
  make_pitches(20, pose::Handedness::left, skewed.sequences, skewed.labels);

  std::vector<pose::PoseSequence> eval_seqs;
  std::vector<int> eval_labels;
  make_pitches(50, pose::Handedness::right, eval_seqs, eval_labels);
  make_pitches(50, pose::Handedness::left, eval_seqs, eval_labels);

  tcn::TcnConfig bin_cfg;
  bin_cfg.block_channels = {16, 16, 24, 24, 32};
  bin_cfg.dropout_rate = 0.2;
  bin_cfg.head = tcn::Head::binary;
  bin_cfg.seq_len = 64;

  auto run_training = [&](Scalar gamma, std::vector<Scalar> alpha) {
    tcn::TcnModel m(bin_cfg, 21);
    tcn::TrainRun r;
    r.epochs = 30;
    r.batch_size = 48;
    r.optimizer.algo = nn::OptimAlgo::adamw;
    r.loss.gamma = gamma;
    r.loss.alpha = std::move(alpha);
    r.seed = 13;
    r.early_stop_patience = 3;
    tcn::train(m, skewed, r);
    return m;
  };

  tcn::TcnModel focal_model = run_training(2.0, {});  // balanced from labels
  tcn::TcnModel ce_model = run_training(0.0, nn::uniform_alpha(2));

  Scalar focal_recall = binary_recall(focal_model, eval_seqs, eval_labels, 1);
  Scalar ce_recall = binary_recall(ce_model, eval_seqs, eval_labels, 1);
  check.expect(focal_recall >= 0.95,
               fmt("focal minority recall %.3f < 0.95", focal_recall));
  check.expect(focal_recall >= ce_recall,
               fmt("focal minority recall %.3f below cross-entropy %.3f",
                   focal_recall, ce_recall));

  double secs = seconds_since(t0);
  int cores = std::max(1u, std::thread::hardware_concurrency());
  double budget = 600.0 * 4.0 / std::min(4, cores);
  check.expect(secs <= budget,
               fmt("wall time %.1fs over scaled budget %.0fs", secs, budget));

  return {check.ok(),
          check.ok()
              ? fmt("role accuracy %.3f; minority recall focal %.2f vs ce %.2f "
                    "(%.0fs of %.0fs budget)",
                    accuracy, focal_recall, ce_recall, secs, budget)
              : check.why};
}

// ---------------------------------------------------------------------------
// Criterion 8: a fixed seed reproduces training bit-for-bit through the CLI.
// ---------------------------------------------------------------------------

Outcome criterion_determinism() {
  Check check;
  testsup::TempDir tmp;
  std::string corpus = tmp.file("corpus");

  testsup::RunResult synth = run_cli(
      {"synth", "--pitches", "12", "--seed", "77", "--out", corpus});
  check.expect(synth.exit_code == 0, "synth failed: " + synth.err);

  auto train_once = [&](const std::string& tag) {
    std::string model = tmp.file(tag + ".ptcn");
    std::string history = tmp.file(tag + ".csv");
    testsup::RunResult r = run_cli(
        {"train", "--task", "handedness", "--tracklets",
         corpus + "/tracklets.jsonl", "--truths", corpus + "/truths.jsonl",
         "--epochs", "3", "--patience", "0", "--seq-len", "64", "--seed",
         "123", "--threads", "1", "--history", history, "--out", model});
    check.expect(r.exit_code == 0, "train failed: " + r.err);
    return std::make_pair(testsup::read_file(model),
                          testsup::read_file(history));
  };

  auto [model_a, history_a] = train_once("a");
  auto [model_b, history_b] = train_once("b");
  check.expect(model_a == model_b, "model files differ between identical runs");
  check.expect(history_a == history_b,
               "loss histories differ between identical runs");
  check.expect(!model_a.empty() && !history_a.empty(),
               "empty training outputs");

  return {check.ok(),
          check.ok() ? "two seeded runs produced byte-identical models and "
                       "histories"
                     : check.why};
}

// ---------------------------------------------------------------------------
// Criterion 9: tracklet JSONL and the model binary round-trip exactly.
// ---------------------------------------------------------------------------

Outcome criterion_serialization() {
  Check check;
  testsup::TempDir tmp;
  Rng rng(404);

  std::vector<pose::PoseSequence> originals;
  for (int s = 0; s < 30; ++s) {
    pose::PoseSequence seq;
    seq.tracklet_id = fmt("trk-%03d", s);
    seq.fps = 30.0 + rng.uniform();
    Index n = 3 + static_cast<Index>(rng.uniform_int(38));
    seq.frames.resize(static_cast<std::size_t>(n));
    for (auto& frame : seq.frames) {
      for (Index j = 0; j < pose::kNumJoints; ++j) {
        for (Index c = 0; c < 3; ++c) {
          frame.joints(j, c) = rng.normal(0.0, 1.5);
        }
        if (rng.uniform() < 0.15) {
          frame.valid_mask[static_cast<std::size_t>(j)] = false;
        }
      }
    }
    originals.push_back(std::move(seq));
  }

  std::string path = tmp.file("tracklets.jsonl");
  pose::save_tracklets(originals, path);
  std::vector<pose::PoseSequence> loaded = pose::load_tracklets(path);
  check.expect(loaded.size() == originals.size(), "tracklet count changed");
  for (std::size_t i = 0; i < originals.size() && i < loaded.size(); ++i) {
    check.expect(loaded[i] == originals[i],
                 fmt("tracklet %zu changed across the round trip", i));
  }
  std::string resaved = tmp.file("tracklets2.jsonl");
  pose::save_tracklets(loaded, resaved);
  check.expect(testsup::read_file(path) == testsup::read_file(resaved),
               "tracklet re-save is not byte-identical");

  auto roundtrip_model = [&](tcn::TcnConfig cfg, std::uint64_t seed,
                             const std::string& name) {
    tcn::TcnModel model(cfg, seed);
    std::string mpath = tmp.file(name);
    tcn::save_model(model, mpath);
    tcn::TcnModel back = tcn::load_model(mpath);
    check.expect(back.config() == model.config(), name + ": config changed");
    check.expect(back.init_seed() == model.init_seed(),
                 name + ": init seed changed");
    auto want = model.state_tensors();
    auto got = back.state_tensors();
    check.expect(want.size() == got.size(), name + ": tensor count changed");
    for (std::size_t i = 0; i < want.size() && i < got.size(); ++i) {
      bool same = want[i]->shape() == got[i]->shape() &&
                  (want[i]->array() == got[i]->array()).all();
      check.expect(same, fmt("%s: state tensor %zu changed", name.c_str(), i));
    }
    std::string mpath2 = tmp.file(name + ".again");
    tcn::save_model(back, mpath2);
    check.expect(testsup::read_file(mpath) == testsup::read_file(mpath2),
                 name + ": re-save is not byte-identical");
  };

  tcn::TcnConfig role_cfg;
  role_cfg.block_channels = {8, 8, 12, 12, 16};
  role_cfg.seq_len = 40;
  roundtrip_model(role_cfg, 5, "role.ptcn");

  tcn::TcnConfig bin_cfg = role_cfg;
  bin_cfg.head = tcn::Head::binary;
  roundtrip_model(bin_cfg, 9, "binary.ptcn");

  return {check.ok(),
          check.ok() ? "30 tracklets and 2 models round-trip bit-exactly"
                     : check.why};
}

// ---------------------------------------------------------------------------
// Criterion 10: the full CLI pipeline runs on defaults and scores well.
// ---------------------------------------------------------------------------

Outcome criterion_pipeline() {
  Check check;
  testsup::TempDir tmp;
  std::string data = tmp.file("data");
  std::string hand_model = tmp.file("hand.ptcn");
  std::string pos_model = tmp.file("pos.ptcn");
  std::string reports = tmp.file("reports.jsonl");
  std::string eval_path = tmp.file("eval.json");

  auto step = [&](const std::string& name,
                  const std::vector<std::string>& args) {
    testsup::RunResult r = run_cli(args);
    check.expect(r.exit_code == 0,
                 name + fmt(" exited %d: ", r.exit_code) + r.err);
    return r.exit_code == 0;
  };

  bool ok = step("synth", {"synth", "--seed", "1", "--out", data});
  ok = ok && step("train handedness",
                  {"train", "--task", "handedness", "--tracklets",
                   data + "/tracklets.jsonl", "--truths",
                   data + "/truths.jsonl", "--seed", "2", "--out", hand_model});
  ok = ok && step("train position",
                  {"train", "--task", "position", "--tracklets",
                   data + "/tracklets.jsonl", "--truths",
                   data + "/truths.jsonl", "--seed", "3", "--out", pos_model});
  ok = ok && step("analyze",
                  {"analyze", "--tracklets", data + "/tracklets.jsonl",
                   "--handedness-model", hand_model, "--position-model",
                   pos_model, "--out", reports});
  ok = ok && step("eval", {"eval", "--reports", reports, "--truths",
                           data + "/truths.jsonl", "--out", eval_path});
  if (!ok) return {false, check.why};

  json doc = json::parse(testsup::read_file(eval_path));
  check.expect(doc.at("monotone").get<bool>(),
               "accuracy is not monotone in the margin");
  check.expect(doc.at("n_matched").get<long>() == 100,
               fmt("matched %ld of 100 tracklets",
                   doc.at("n_matched").get<long>()));

  bool found = false;
  Scalar a2 = 0;
  for (const json& metric : doc.at("metrics")) {
    if (metric.at("field").get<std::string>() != "pitch_velocity_mps") continue;
    found = true;
    std::vector<Scalar> margins =
        metric.at("thresholds").get<std::vector<Scalar>>();
    std::vector<Scalar> acc = metric.at("accuracies").get<std::vector<Scalar>>();
    check.expect(margins.size() == 3 && std::abs(margins[1] - 2.0) < 1e-12,
                 "velocity margins are not the 1/2/5 defaults");
    if (acc.size() >= 2) a2 = acc[1];
    check.expect(a2 >= 0.90,
                 fmt("velocity accuracy at 2%% margin is %.3f < 0.90", a2));
  }
  check.expect(found, "no velocity metric in the eval document");

  return {check.ok(),
          check.ok()
              ? fmt("synth/train/analyze/eval all exit 0; velocity A(2%%) %.3f",
                    a2)
              : check.why};
}

}  // namespace

int main() {
  nn::set_num_threads(1);

  struct Entry {
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {"gradients match finite differences", criterion_gradients},
      {"dilated convolution matches naive reference", criterion_convolution},
      {"focal loss reductions and closed form", criterion_focal_loss},
      {"release detection accuracy", criterion_release_detection},
      {"release velocity accuracy", criterion_velocity},
      {"release extension geometry", criterion_extension},
      {"role training and imbalanced recall", criterion_role_training},
      {"seeded training determinism", criterion_determinism},
      {"serialization round trips", criterion_serialization},
      {"end-to-end pipeline on defaults", criterion_pipeline},
  };

  int failures = 0;
  int id = 0;
  for (const Entry& entry : entries) {
    ++id;
    auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("unhandled exception: ") + e.what()};
    }
    double secs = seconds_since(t0);
    std::printf("%s  criterion %2d: %s — %s [%.1fs]\n",
                outcome.pass ? "PASS" : "FAIL", id, entry.name,
                outcome.detail.c_str(), secs);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }

  std::printf("%d of %d criteria passed\n",
              static_cast<int>(std::size(entries)) - failures,
              static_cast<int>(std::size(entries)));
  return failures == 0 ? 0 : 1;
}
