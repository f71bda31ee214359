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

#include "howl/metrics/sdr.hpp"

#include <algorithm>
#include <cmath>

#include "howl/common.hpp"

namespace howl {

double SiSdr(std::span<const double> estimate, std::span<const double> reference) {
  if (estimate.size() != reference.size()) {
    throw Error(ErrorKind::kShape, "SI-SDR needs equal-length signals");
  }
  double ref_energy = 0.0;
  double dot = 0.0;
  double est_energy = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ref_energy += reference[i] * reference[i];
    dot += estimate[i] * reference[i];
    est_energy += estimate[i] * estimate[i];
  }
  if (!(ref_energy > 0.0)) throw Error(ErrorKind::kUndefined, "SI-SDR of a silent reference");
  if (!std::isfinite(est_energy)) {
    throw Error(ErrorKind::kNumeric, "SI-SDR of a non-finite estimate");
  }
  if (est_energy == 0.0) return kSdrFloor;
  const double alpha = dot / ref_energy;
  double signal = 0.0;
  double noise = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double s = alpha * reference[i];
    const double e = s - estimate[i];
    signal += s * s;
    noise += e * e;
  }
  if (noise == 0.0) return kSdrCeiling;
  if (signal == 0.0) return kSdrFloor;
  return std::clamp(10.0 * std::log10(signal / noise), kSdrFloor, kSdrCeiling);
}

double SiSdr(const AudioBuffer& estimate, const AudioBuffer& reference) {
  if (estimate.sample_rate != reference.sample_rate) {
    throw Error(ErrorKind::kConfig, "SI-SDR of signals at different sample rates");
  }
  return SiSdr(estimate.view(), reference.view());
}

}  // namespace howl
