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

#ifndef HOWL_METRICS_EVALUATE_HPP_
#define HOWL_METRICS_EVALUATE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "howl/audio.hpp"
#include "howl/loop/session.hpp"

namespace howl {

struct SceneScore {
  std::size_t index = 0;
  double gain = 0.0;
  std::size_t delay_samples = 0;
  // NaN when nothing scoreable was emitted (halt at the first frames or a
  // silent reference prefix).
  double si_sdr = 0.0;
  HaltReason halt = HaltReason::kNone;
  std::optional<std::size_t> halt_sample;
  std::size_t scored_samples = 0;

  bool halted() const { return halt != HaltReason::kNone; }
};

struct GroupSummary {
  double gain = 0.0;  // group key; NaN for the all-scenes row
  std::size_t scenes = 0;
  std::size_t excluded = 0;  // non-finite scores left out of mean/std
  double mean_sdr = 0.0;
  double std_sdr = 0.0;  // population standard deviation
  double howling_rate = 0.0;
  std::size_t overflow_halts = 0;
};

struct EvalReport {
  std::vector<SceneScore> scenes;     // ascending scene index
  std::vector<GroupSummary> groups;   // ascending gain
  GroupSummary overall;
};

// Halted scenes are scored on their emitted prefix against the reference
// prefix of the same length. Throws kShape if a completed session's output
// length differs from the reference.
SceneScore ScoreScene(const SessionResult& result, const AudioBuffer& reference,
                      std::size_t index);

// Groups by gain rounded to 1e-6. Independent of the order of |scores|.
EvalReport Summarize(std::vector<SceneScore> scores);

// Scene i is results[i] against references[i].
EvalReport Evaluate(std::span<const SessionResult> results,
                    std::span<const AudioBuffer> references);

}  // namespace howl

#endif  // HOWL_METRICS_EVALUATE_HPP_
