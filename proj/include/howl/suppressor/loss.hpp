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

#ifndef HOWL_SUPPRESSOR_LOSS_HPP_
#define HOWL_SUPPRESSOR_LOSS_HPP_

#include <span>
#include <vector>

#include "howl/dsp/stft.hpp"
#include "howl/suppressor/mask.hpp"

namespace howl {

// mean |est_r - ref_r| + mean |est_i - ref_i| over all frames and bins.
// Throws kUndefined for empty input, kShape for mismatched counts.
double MaeLoss(std::span<const SpectralFrame> estimate, std::span<const SpectralFrame> target);

// One recorded loop frame, treated as constant when differentiating.
struct FrozenFrame {
  Spectrum mic;
  Spectrum reference;
  Spectrum target;
};

struct MaskGradient {
  double loss = 0.0;
  std::vector<double> values;  // MaskModel::Parameters() layout
};

double MaeLoss(const MaskModel& model, std::span<const FrozenFrame> frames);

// Analytic subgradient of MaeLoss(model, frames) with respect to the model
// parameters (sign(0) = 0). No gradient flows through how the frames were
// generated.
MaskGradient GradMaeFrozen(const MaskModel& model, std::span<const FrozenFrame> frames);

}  // namespace howl

#endif  // HOWL_SUPPRESSOR_LOSS_HPP_
