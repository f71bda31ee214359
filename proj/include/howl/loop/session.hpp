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

#ifndef HOWL_LOOP_SESSION_HPP_
#define HOWL_LOOP_SESSION_HPP_

#include <cstddef>
#include <functional>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "howl/audio.hpp"
#include "howl/dsp/convolution.hpp"
#include "howl/dsp/delay_line.hpp"
#include "howl/dsp/stft.hpp"
#include "howl/kalman/fdkf.hpp"
#include "howl/loop/detector.hpp"
#include "howl/suppressor/suppressor.hpp"

namespace howl {

enum class LoopMode {
  kNoAhs,          // suppression bypassed, loudspeaker plays the raw mic
  kNnOnly,         // reference = loudspeaker frame
  kHybrid,         // reference = Kalman error frame
  kTeacherForced,  // loudspeaker driven by the true target (offline generation)
};

std::string_view LoopModeName(LoopMode mode);
std::optional<LoopMode> ParseLoopMode(std::string_view name);

struct LoopConfig {
  double gain = 2.0;
  double delay_seconds = 0.2;
  LoopMode mode = LoopMode::kNnOnly;
  double sample_rate = kDefaultSampleRate;
  FrameConfig framing = FrameConfig::ForSampleRate(kDefaultSampleRate);
  HowlingDetectorConfig detector;
  KalmanConfig kalman;
  // 0 runs the whole target.
  std::size_t max_frames = 0;
  // Models amplifier saturation at +-1; off for a linear loop.
  bool clip_loudspeaker = false;
  // Magnitudes past this are treated like NaN/Inf: single-precision range.
  double overflow_limit = static_cast<double>(std::numeric_limits<float>::max());
  bool record_frames = false;

  std::size_t DelaySamples() const;
  void Validate() const;
};

enum class HaltReason { kNone, kHowling, kOverflow };
std::string_view HaltReasonName(HaltReason reason);

struct FrameTrace {
  SpectralFrame mic;          // Y_m
  SpectralFrame reference;    // R_m as handed to the suppressor
  SpectralFrame loudspeaker;  // loudspeaker frame over the same span as Y_m
  SpectralFrame target;       // S_m
  SpectralFrame estimate;     // S_hat_m
  SpectralFrame playback_estimate;  // D_hat_m, hybrid only
};

struct SessionResult {
  AudioBuffer estimate;     // s_hat, finalized samples only
  AudioBuffer mic;          // y
  AudioBuffer loudspeaker;  // x
  std::vector<FrameTrace> frames;
  HaltReason halt = HaltReason::kNone;
  std::optional<std::size_t> halt_sample;
  std::size_t frames_emitted = 0;
  std::size_t target_length = 0;
  double gain = 0.0;
  std::size_t delay_samples = 0;
  LoopMode mode = LoopMode::kNnOnly;

  bool halted() const { return halt != HaltReason::kNone; }
};

// One closed-loop streaming session. Each Step consumes one hop of near-end
// target samples, forms the microphone hop through the loudspeaker path,
// analyzes the frame ending at that hop, suppresses it, and synthesizes one
// hop of output. Output trails the microphone by one hop; the loudspeaker
// plays the output delayed by the loop delay and scaled by the gain.
class LoopSession {
 public:
  LoopSession(const Rir& playback_path, const LoopConfig& cfg, const Suppressor& suppressor);

  // Returns the output samples finalized by this frame. The first frame's
  // output lies before t = 0 and is dropped, so it returns an empty span, as
  // does a step that halts.
  std::span<const double> Step(std::span<const double> target_hop);

  bool halted() const { return result_.halted(); }
  std::int64_t frame_index() const { return frame_; }
  const SessionResult& result() const { return result_; }
  const FrequencyDomainKalman* kalman() const { return kalman_ ? &*kalman_ : nullptr; }
  // Moves the result out, trimming the time-domain buffers to |length|.
  SessionResult Finish(std::size_t length);

 private:
  bool CheckOverflow(std::span<const double> samples, std::size_t first_sample);

  LoopConfig cfg_;
  Suppressor suppressor_;
  std::size_t hop_;
  PartitionedConvolver playback_;
  DelayLine delay_;
  FrameAnalyzer analyzer_;
  StreamingSynthesizer synth_;
  HowlingDetector detector_;
  std::optional<FrequencyDomainKalman> kalman_;

  std::int64_t frame_ = 0;
  std::vector<double> pending_x_, x_hop_, d_hop_, y_hop_;
  std::vector<double> x_prev_, y_prev_, s_prev_, dhat_prev_;
  SpectralFrame mic_, target_, loudspeaker_, dhat_, reference_;
  SessionResult result_;
};

// Drives a session over the whole target (zero-padded by one hop so the
// last samples are fully synthesized) or until a halt.
// |inspect|, when set, sees the session once more before its result is
// moved out (e.g. to export the final Kalman state).
SessionResult RunClosedLoop(const AudioBuffer& target, const Rir& playback_path,
                            const LoopConfig& cfg, const Suppressor& suppressor,
                            const std::function<void(const LoopSession&)>& inspect = {});

}  // namespace howl

#endif  // HOWL_LOOP_SESSION_HPP_
