/*
Copyright 2026 The Howl Lab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "howl/common.hpp"
#include "howl/loop/detector.hpp"
#include "howl/loop/session.hpp"
#include "howl/scene/scene.hpp"
#include "howl/suppressor/trainer.hpp"
#include "oracles.hpp"

using namespace howl;
using howl::testing::BruteForceLoop;
using howl::testing::BruteSuppressor;
using howl::testing::DirectConvolve;
using howl::testing::DirectDft;
using howl::testing::MaxAbsDiff;

namespace {

Scene ShortScene(std::size_t index, double duration = 1.0) {
  SceneSpec spec;
  spec.duration = duration;
  spec.rir_length = 2000;
  return BuildScene(spec, 77, index);
}

SessionResult Run(const Scene& s, LoopMode mode, double gain, const Suppressor& sup,
                  bool hd = true, bool record = false) {
  LoopConfig base;
  base.mode = mode;
  base.detector.enabled = hd;
  base.record_frames = record;
  LoopConfig cfg = SceneLoopConfig(base, s);
  cfg.gain = gain;
  return RunClosedLoop(s.target, s.rirs.loudspeaker, cfg, sup);
}

}  // namespace

TEST_CASE("detector fires on the 100th sample of a run", "[detector]") {
  HowlingDetector det;
  const std::vector<double> run(100, 1.0);
  const auto r = det.Scan(run);
  CHECK(r.triggered);
  CHECK(r.trigger_index == 99u);
}

TEST_CASE("detector needs the run to be consecutive", "[detector]") {
  HowlingDetector det;
  std::vector<double> x;
  for (int rep = 0; rep < 20; ++rep) {
    x.insert(x.end(), 99, -1.0);
    x.push_back(0.5);
  }
  CHECK_FALSE(det.Scan(x).triggered);
  CHECK_FALSE(det.Scan(std::vector<double>(1000, 0.0)).triggered);
  // Exactly at the threshold does not count.
  CHECK_FALSE(HowlingDetector().Scan(std::vector<double>(500, 0.99)).triggered);
}

TEST_CASE("detector runs persist across hops", "[detector]") {
  HowlingDetector det;
  const std::vector<double> hop(64, 2.0);
  CHECK_FALSE(det.Scan(hop).triggered);
  CHECK(det.run_length() == 64);
  const auto r = det.Scan(hop);
  CHECK(r.triggered);
  CHECK(r.trigger_index == 35u);  // 64 + 36 = 100

  HowlingDetector broken;
  broken.Scan(hop);
  broken.Scan(std::vector<double>{0.0});
  CHECK_FALSE(broken.Scan(hop).triggered);

  HowlingDetectorConfig bad;
  bad.consecutive_samples = 0;
  CHECK_THROWS_AS(HowlingDetector(bad), Error);
}

TEST_CASE("loop configuration limits", "[session]") {
  LoopConfig cfg;
  cfg.gain = 11.0;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg = LoopConfig{};
  cfg.delay_seconds = 0.001;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg = LoopConfig{};
  CHECK(cfg.DelaySamples() == 3200);
  CHECK(ParseLoopMode("teacher-forced") == LoopMode::kTeacherForced);
  CHECK_FALSE(ParseLoopMode("open").has_value());
}

TEST_CASE("a broken loop leaves the microphone clean", "[session]") {
  const Scene s = ShortScene(0);
  for (const auto& sup : {Suppressor::Passthrough(), Suppressor::Oracle(),
                          Suppressor::Trained(MaskModel::Zeros(65))}) {
    const auto mode = sup.kind() == SuppressorKind::kPassthrough ? LoopMode::kNoAhs
                                                                 : LoopMode::kNnOnly;
    const auto r = Run(s, mode, 0.0, sup);
    CHECK(r.mic.samples == s.target.samples);
  }
  Rir silent = s.rirs.loudspeaker;
  std::fill(silent.taps.begin(), silent.taps.end(), 0.0);
  LoopConfig cfg = SceneLoopConfig(LoopConfig{}, s);
  cfg.gain = 3.0;
  cfg.mode = LoopMode::kNoAhs;
  CHECK(RunClosedLoop(s.target, silent, cfg, Suppressor::Passthrough()).mic.samples ==
        s.target.samples);
}

TEST_CASE("no suppression howls and halts", "[session]") {
  const Scene s = ShortScene(1, 10.0);
  const auto r = Run(s, LoopMode::kNoAhs, 2.0, Suppressor::Passthrough());
  CHECK(r.halt == HaltReason::kHowling);
  REQUIRE(r.halt_sample.has_value());
  CHECK(*r.halt_sample < 10 * 16000);
  // Frames stop at the halt.
  CHECK(r.mic.size() <= *r.halt_sample + 64);
  CHECK(r.estimate.size() <= *r.halt_sample);
}

TEST_CASE("oracle suppression breaks the loop", "[session]") {
  for (std::size_t i = 0; i < 3; ++i) {
    const Scene s = ShortScene(i);
    for (double g : {1.0, 2.0, 3.0}) {
      const auto r = Run(s, LoopMode::kNnOnly, g, Suppressor::Oracle());
      CHECK_FALSE(r.halted());
      REQUIRE(r.estimate.size() == s.target.size());
      CHECK(MaxAbsDiff(r.estimate.samples, s.target.samples) < 1e-5);
    }
  }
}

TEST_CASE("microphone obeys the loop physics sample by sample", "[session]") {
  for (LoopMode mode : {LoopMode::kNoAhs, LoopMode::kHybrid, LoopMode::kNnOnly,
                        LoopMode::kTeacherForced}) {
    const Scene s = ShortScene(2);
    const Suppressor sup = mode == LoopMode::kNoAhs ? Suppressor::Passthrough()
                           : mode == LoopMode::kHybrid ? Suppressor::KalmanOnly()
                                                       : Suppressor::Trained(MaskModel(65));
    const auto r = Run(s, mode, 2.5, sup);
    REQUIRE(r.mic.size() == r.loudspeaker.size());
    const auto d = DirectConvolve(r.loudspeaker.samples, s.rirs.loudspeaker.taps);
    double worst = 0.0;
    for (std::size_t n = 0; n < r.mic.size(); ++n) {
      worst = std::max(worst, std::abs(r.mic.samples[n] - s.target.samples[n] - d[n]));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("loudspeaker is the delayed, amplified output", "[session]") {
  const Scene s = ShortScene(3);
  const auto r = Run(s, LoopMode::kHybrid, 1.7, Suppressor::KalmanOnly());
  const std::size_t D = r.delay_samples;
  double worst = 0.0;
  for (std::size_t n = 0; n < r.loudspeaker.size(); ++n) {
    const double expect = n >= D && n - D < r.estimate.size() ? 1.7 * r.estimate.samples[n - D]
                                                               : 0.0;
    worst = std::max(worst, std::abs(r.loudspeaker.samples[n] - expect));
  }
  CHECK(worst < 1e-10);

  // Cross-correlation of x against s_hat peaks at the loop delay.
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t lag = D - 200; lag <= D + 200; ++lag) {
    double c = 0.0;
    for (std::size_t n = lag; n < r.loudspeaker.size(); ++n) {
      c += r.loudspeaker.samples[n] * r.estimate.samples[n - lag];
    }
    if (c > best) {
      best = c;
      arg = lag;
    }
  }
  CHECK(arg == D);
}

TEST_CASE("frame engine matches the per-sample simulator", "[session]") {
  const Scene s = ShortScene(4, 2.0);
  for (BruteSuppressor kind : {BruteSuppressor::kPassthrough, BruteSuppressor::kOracle}) {
    const Suppressor sup = kind == BruteSuppressor::kPassthrough ? Suppressor::Passthrough()
                                                                 : Suppressor::Oracle();
    const auto r = Run(s, LoopMode::kNnOnly, 2.5, sup);
    const auto ref = BruteForceLoop(s.target.samples, s.rirs.loudspeaker.taps, 2.5,
                                    r.delay_samples, kind, true);
    CHECK(r.halt_sample == ref.halt_sample);
    const std::size_t n = std::min(r.mic.size(), ref.y.size());
    CHECK(n > 1000);
    CHECK(MaxAbsDiff(std::span(r.mic.samples).first(n), std::span(ref.y).first(n)) < 1e-8);
  }
}

TEST_CASE("reference wiring per mode", "[session]") {
  const Scene s = ShortScene(5, 0.5);
  const FrameConfig fc;
  const auto nn = Run(s, LoopMode::kNnOnly, 1.5, Suppressor::Trained(MaskModel(65)), true, true);
  REQUIRE(nn.frames.size() > 10);
  for (std::size_t m = 1; m < nn.frames.size(); m += 7) {
    // Frame m spans [(m-1)*hop, (m+1)*hop).
    std::vector<double> xw(fc.frame_len), yw(fc.frame_len);
    for (std::size_t n = 0; n < fc.frame_len; ++n) {
      xw[n] = nn.loudspeaker.samples[(m - 1) * fc.hop + n] * fc.window[n];
      yw[n] = nn.mic.samples[(m - 1) * fc.hop + n] * fc.window[n];
    }
    const auto X = DirectDft(xw), Y = DirectDft(yw);
    for (std::size_t k = 0; k < fc.bins(); ++k) {
      CHECK(std::abs(nn.frames[m].reference.bins[k] - X[k]) < 1e-9);
      CHECK(std::abs(nn.frames[m].mic.bins[k] - Y[k]) < 1e-9);
    }
    CHECK(nn.frames[m].reference.bins == nn.frames[m].loudspeaker.bins);
  }

  const auto hy = Run(s, LoopMode::kHybrid, 1.5, Suppressor::KalmanOnly(), true, true);
  REQUIRE(hy.frames.size() > 10);
  for (const auto& f : hy.frames) {
    for (std::size_t k = 0; k < fc.bins(); ++k) {
      CHECK(f.reference.bins[k] == f.mic.bins[k] - f.playback_estimate.bins[k]);
      CHECK(std::abs(f.reference.bins[k] + f.playback_estimate.bins[k] - f.mic.bins[k]) <=
            1e-12 * (1.0 + std::abs(f.mic.bins[k])));
    }
    CHECK(f.estimate.bins == f.reference.bins);
  }
}

TEST_CASE("teacher forcing and recursion see different microphones", "[session]") {
  const Scene s = ShortScene(6, 2.0);
  MaskModel model(65);
  for (auto& g : model.mic_gain()) g = {0.3, 0.0};
  const Suppressor sup = Suppressor::Trained(model);
  const auto tf = Run(s, LoopMode::kTeacherForced, 2.0, sup);
  const auto nn = Run(s, LoopMode::kNnOnly, 2.0, sup);
  REQUIRE_FALSE(tf.halted());
  REQUIRE_FALSE(nn.halted());
  double diff = 0.0, ref = 0.0;
  for (std::size_t n = 16000; n < tf.mic.size(); ++n) {
    diff += std::pow(tf.mic.samples[n] - nn.mic.samples[n], 2);
    ref += std::pow(tf.mic.samples[n], 2);
  }
  CHECK(std::sqrt(diff / ref) > 0.01);
  // Teacher forcing plays the true target.
  const std::size_t D = tf.delay_samples;
  CHECK(std::abs(tf.loudspeaker.samples[D + 100] - 2.0 * s.target.samples[100]) < 1e-12);
}

TEST_CASE("runaway loops halt on overflow with finite buffers", "[session]") {
  SceneSpec spec;
  spec.duration = 12.0;
  spec.rir_length = 2000;
  spec.gain = Range::Fixed(3.0);
  bool saw_overflow = false;
  for (std::size_t i = 0; i < 3 && !saw_overflow; ++i) {
    const Scene s = BuildScene(spec, 8, i);
    const auto r = Run(s, LoopMode::kNoAhs, 3.0, Suppressor::Passthrough(), false);
    for (const auto* b : {&r.mic, &r.loudspeaker, &r.estimate}) CHECK(b->AllFinite());
    saw_overflow = r.halt == HaltReason::kOverflow;
  }
  CHECK(saw_overflow);
}

TEST_CASE("session stepping contract", "[session]") {
  const Scene s = ShortScene(7, 0.5);
  LoopConfig cfg = SceneLoopConfig(LoopConfig{}, s);
  cfg.mode = LoopMode::kNoAhs;
  cfg.gain = 3.0;
  cfg.clip_loudspeaker = true;
  LoopSession session(s.rirs.loudspeaker, cfg, Suppressor::Passthrough());
  CHECK_THROWS_AS(session.Step(std::vector<double>(10)), Error);
  const std::vector<double> hop(64, 0.01);
  CHECK(session.Step(hop).empty());
  CHECK(session.Step(hop).size() == 64);
  CHECK(session.frame_index() == 2);

  cfg.max_frames = 5;
  const auto r = RunClosedLoop(s.target, s.rirs.loudspeaker, cfg, Suppressor::Passthrough());
  CHECK(r.frames_emitted == 5);
  CHECK(r.mic.size() == 5 * 64);

  cfg.max_frames = 0;
  cfg.detector.enabled = false;
  const auto clipped = RunClosedLoop(s.target, s.rirs.loudspeaker, cfg,
                                     Suppressor::Passthrough());
  for (double v : clipped.loudspeaker.samples) CHECK(std::abs(v) <= 1.0);

  CHECK_THROWS_AS(RunClosedLoop(AudioBuffer(50, 16000.0), s.rirs.loudspeaker, cfg,
                                Suppressor::Passthrough()),
                  Error);
}
