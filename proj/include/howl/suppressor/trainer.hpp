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

#ifndef HOWL_SUPPRESSOR_TRAINER_HPP_
#define HOWL_SUPPRESSOR_TRAINER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "howl/loop/session.hpp"
#include "howl/scene/scene.hpp"
#include "howl/suppressor/mask.hpp"

namespace howl {

enum class InitKind {
  kIdentity,    // M = 1, N = 0: passthrough
  kZeros,       // M = N = 0: silence
  kReference,   // M = 0, N = 1: the reference itself (the Kalman error in hybrid wiring)
};

std::string_view InitKindName(InitKind kind);
std::optional<InitKind> ParseInitKind(std::string_view name);
MaskModel InitialModel(InitKind kind, std::size_t bins);

enum class OptimizerKind {
  kSgd,   // params -= step * g
  kAdam,  // per-coordinate normalized steps with bias-corrected moments
};

std::string_view OptimizerKindName(OptimizerKind kind);
std::optional<OptimizerKind> ParseOptimizerKind(std::string_view name);

struct TrainConfig {
  std::size_t epochs = 10;
  double step_size = 1e-2;
  double grad_clip = 10.0;  // L2 norm; 0 disables
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-12;
  // Mode, detector and framing for every scene; gain and delay come from
  // each scene.
  LoopConfig loop;
  std::size_t jobs = 1;

  void Validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  // Mean over scenes of each scene's per-frame loss, for the model used in
  // this epoch. NaN when any scene overflowed, as one NaN poisons a batch.
  double loss = 0.0;
  // Same mean restricted to scenes that did not overflow.
  double finite_loss = 0.0;
  std::size_t scenes_used = 0;  // scenes with at least one processed frame
  std::size_t frames = 0;
  std::size_t howling_halts = 0;
  std::size_t overflow_halts = 0;
  double grad_norm = 0.0;  // before clipping
  bool updated = false;
};

struct TrainResult {
  MaskModel initial;
  MaskModel model;
  std::vector<EpochRecord> history;
  bool converged = false;  // last epoch loss <= first epoch loss
  std::string report;
  std::size_t total_overflow_halts = 0;
  std::size_t total_howling_halts = 0;
};

// Recursive training: every epoch re-runs each scene through the closed loop
// with the current model, keeps the frames processed before any halt, and
// takes one clipped gradient step on the frozen-input MAE. Throws kTraining
// when no scene yields a single frame in an epoch.
TrainResult TrainRecursive(const MaskModel& initial, std::span<const Scene> scenes,
                           const TrainConfig& cfg);

// Per-scene loop configuration used by the trainer and the evaluators.
LoopConfig SceneLoopConfig(const LoopConfig& base, const Scene& scene);

}  // namespace howl

#endif  // HOWL_SUPPRESSOR_TRAINER_HPP_
