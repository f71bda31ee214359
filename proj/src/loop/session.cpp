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

#include "howl/loop/session.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "howl/common.hpp"

namespace howl {

std::string_view LoopModeName(LoopMode mode) {
  switch (mode) {
    case LoopMode::kNoAhs: return "no-ahs";
    case LoopMode::kNnOnly: return "nn-only";
    case LoopMode::kHybrid: return "hybrid";
    case LoopMode::kTeacherForced: return "teacher-forced";
  }
  return "unknown";
}

std::optional<LoopMode> ParseLoopMode(std::string_view name) {
  for (auto m : {LoopMode::kNoAhs, LoopMode::kNnOnly, LoopMode::kHybrid,
                 LoopMode::kTeacherForced}) {
    if (LoopModeName(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view HaltReasonName(HaltReason reason) {
  switch (reason) {
    case HaltReason::kNone: return "none";
    case HaltReason::kHowling: return "howling";
    case HaltReason::kOverflow: return "overflow";
  }
  return "unknown";
}

std::size_t LoopConfig::DelaySamples() const {
  return static_cast<std::size_t>(std::llround(delay_seconds * sample_rate));
}

void LoopConfig::Validate() const {
  if (!(gain >= 0.0 && gain <= 10.0)) {
    throw Error(ErrorKind::kConfig, "gain must lie in [0, 10]");
  }
  if (!(sample_rate > 0.0)) throw Error(ErrorKind::kConfig, "sample rate must be positive");
  if (!(delay_seconds >= 0.0) || !std::isfinite(delay_seconds)) {
    throw Error(ErrorKind::kConfig, "delay must be finite and >= 0");
  }
  framing.Validate();
  detector.Validate();
  // The output of frame m is only final once frame m+1 is synthesized, so
  // the loudspeaker can look back no less than one full frame.
  if (DelaySamples() < framing.frame_len) {
    throw Error(ErrorKind::kConfig, "loop delay of " + std::to_string(DelaySamples()) +
                                        " samples is shorter than one frame (" +
                                        std::to_string(framing.frame_len) + ")");
  }
  if (!(overflow_limit > 0.0)) {
    throw Error(ErrorKind::kConfig, "overflow limit must be positive");
  }
}

namespace {

LoopConfig Prepared(LoopConfig cfg) {
  cfg.Validate();
  cfg.kalman.block = cfg.framing.hop;
  return cfg;
}

}  // namespace

LoopSession::LoopSession(const Rir& playback_path, const LoopConfig& cfg,
                         const Suppressor& suppressor)
    : cfg_(Prepared(cfg)),
      suppressor_(suppressor),
      hop_(cfg_.framing.hop),
      playback_(playback_path.taps, cfg_.framing.hop),
      delay_(cfg_.DelaySamples() - cfg_.framing.frame_len),
      analyzer_(cfg_.framing),
      synth_(cfg_.framing),
      detector_(cfg_.detector) {
  if (playback_path.sample_rate != cfg_.sample_rate) {
    throw Error(ErrorKind::kConfig, "sample-rate mismatch between loop and playback path");
  }
  if (cfg_.mode == LoopMode::kHybrid) kalman_.emplace(cfg_.kalman);
  for (auto* v : {&pending_x_, &x_hop_, &d_hop_, &y_hop_, &x_prev_, &y_prev_, &s_prev_,
                  &dhat_prev_}) {
    v->assign(hop_, 0.0);
  }
  result_.gain = cfg_.gain;
  result_.delay_samples = cfg_.DelaySamples();
  result_.mode = cfg_.mode;
  for (auto* b : {&result_.estimate, &result_.mic, &result_.loudspeaker}) {
    b->sample_rate = cfg_.sample_rate;
  }
}

bool LoopSession::CheckOverflow(std::span<const double> samples, std::size_t first_sample) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = samples[i];
    if (!std::isfinite(v) || std::abs(v) > cfg_.overflow_limit) {
      result_.halt = HaltReason::kOverflow;
      result_.halt_sample = first_sample + i;
      return true;
    }
  }
  return false;
}

std::span<const double> LoopSession::Step(std::span<const double> target_hop) {
  if (halted()) throw Error(ErrorKind::kConfig, "step on a halted session");
  if (target_hop.size() != hop_) {
    throw Error(ErrorKind::kShape, "target hop must hold exactly hop samples");
  }
  const std::size_t base = static_cast<std::size_t>(frame_) * hop_;

  // Microphone: y = s + x * h, with x produced by the previous step.
  std::copy(pending_x_.begin(), pending_x_.end(), x_hop_.begin());
  playback_.Process(x_hop_, d_hop_);
  for (std::size_t i = 0; i < hop_; ++i) y_hop_[i] = target_hop[i] + d_hop_[i];
  if (CheckOverflow(y_hop_, base)) return {};
  auto& y_out = result_.mic.samples;
  auto& x_out = result_.loudspeaker.samples;
  y_out.insert(y_out.end(), y_hop_.begin(), y_hop_.end());
  x_out.insert(x_out.end(), x_hop_.begin(), x_hop_.end());

  if (cfg_.detector.enabled) {
    const auto det = detector_.Scan(y_hop_);
    if (det.triggered) {
      result_.halt = HaltReason::kHowling;
      result_.halt_sample = base + *det.trigger_index;
      return {};
    }
  }

  analyzer_.AnalyzeSplit(y_prev_, y_hop_, mic_.bins);
  analyzer_.AnalyzeSplit(s_prev_, target_hop, target_.bins);
  analyzer_.AnalyzeSplit(x_prev_, x_hop_, loudspeaker_.bins);
  mic_.index = target_.index = loudspeaker_.index = frame_;

  if (cfg_.mode == LoopMode::kHybrid) {
    const KalmanOutput& k = kalman_->Step(y_hop_, x_hop_);
    if (!k.accepted) {
      result_.halt = HaltReason::kOverflow;
      result_.halt_sample = base;
      return {};
    }
    analyzer_.AnalyzeSplit(dhat_prev_, k.playback_time, dhat_.bins);
    dhat_.index = frame_;
    reference_.bins.resize(mic_.size());
    for (std::size_t b = 0; b < mic_.size(); ++b) {
      reference_.bins[b] = mic_.bins[b] - dhat_.bins[b];
    }
    std::copy(k.playback_time.begin(), k.playback_time.end(), dhat_prev_.begin());
  } else {
    reference_.bins = loudspeaker_.bins;
  }
  reference_.index = frame_;

  SpectralFrame estimate;
  if (cfg_.mode == LoopMode::kNoAhs) {
    estimate = mic_;
  } else {
    estimate = suppressor_.Suppress(mic_, reference_,
                                    suppressor_.NeedsTarget() ? &target_ : nullptr);
  }
  const auto out = synth_.Push(estimate);
  // Output of frame m covers [(m-1)*hop, m*hop).
  if (frame_ > 0 && CheckOverflow(out, base - hop_)) return {};

  if (cfg_.record_frames) {
    FrameTrace t;
    t.mic = mic_;
    t.reference = reference_;
    t.loudspeaker = loudspeaker_;
    t.target = target_;
    t.estimate = estimate;
    if (cfg_.mode == LoopMode::kHybrid) t.playback_estimate = dhat_;
    result_.frames.push_back(std::move(t));
  }

  std::span<const double> emitted;
  if (frame_ > 0) {
    auto& s_out = result_.estimate.samples;
    s_out.insert(s_out.end(), out.begin(), out.end());
    emitted = std::span<const double>(s_out).last(hop_);
    // Delay of D - frame_len on a stream that already trails the mic by one
    // hop yields x for the next step: x[n] = G * s_hat[n - D].
    const std::span<const double> feed =
        cfg_.mode == LoopMode::kTeacherForced ? std::span<const double>(s_prev_) : out;
    delay_.Process(feed, pending_x_);
    for (double& v : pending_x_) {
      v *= cfg_.gain;
      if (cfg_.clip_loudspeaker) v = std::clamp(v, -1.0, 1.0);
    }
  }

  std::copy(y_hop_.begin(), y_hop_.end(), y_prev_.begin());
  std::copy(target_hop.begin(), target_hop.end(), s_prev_.begin());
  std::copy(x_hop_.begin(), x_hop_.end(), x_prev_.begin());
  ++frame_;
  result_.frames_emitted = static_cast<std::size_t>(frame_);
  return emitted;
}

SessionResult LoopSession::Finish(std::size_t length) {
  for (auto* b : {&result_.estimate, &result_.mic, &result_.loudspeaker}) {
    if (b->samples.size() > length) b->samples.resize(length);
  }
  result_.target_length = length;
  return std::move(result_);
}

SessionResult RunClosedLoop(const AudioBuffer& target, const Rir& playback_path,
                            const LoopConfig& cfg, const Suppressor& suppressor,
                            const std::function<void(const LoopSession&)>& inspect) {
  target.Validate();
  if (target.sample_rate != cfg.sample_rate) {
    throw Error(ErrorKind::kConfig, "sample-rate mismatch between target and loop");
  }
  if (target.size() < cfg.framing.frame_len) {
    throw Error(ErrorKind::kEmptyInput, "target shorter than one frame");
  }
  LoopSession session(playback_path, cfg, suppressor);
  const std::size_t hop = cfg.framing.hop;
  std::size_t steps = (target.size() + hop - 1) / hop + 1;
  if (cfg.max_frames > 0) steps = std::min(steps, cfg.max_frames);
  std::vector<double> buf(hop);
  for (std::size_t m = 0; m < steps && !session.halted(); ++m) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const std::size_t begin = m * hop;
    if (begin < target.size()) {
      const std::size_t n = std::min(hop, target.size() - begin);
      std::copy_n(target.samples.begin() + static_cast<std::ptrdiff_t>(begin), n, buf.begin());
    }
    session.Step(buf);
  }
  if (inspect) inspect(session);
  return session.Finish(target.size());
}

}  // namespace howl
