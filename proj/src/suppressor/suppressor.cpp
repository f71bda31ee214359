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

#include "howl/suppressor/suppressor.hpp"

#include "howl/common.hpp"

namespace howl {

std::string_view SuppressorKindName(SuppressorKind kind) {
  switch (kind) {
    case SuppressorKind::kPassthrough: return "passthrough";
    case SuppressorKind::kKalmanOnly: return "kalman-only";
    case SuppressorKind::kOracleMask: return "oracle";
    case SuppressorKind::kTrainedMask: return "trained";
  }
  return "unknown";
}

std::optional<SuppressorKind> ParseSuppressorKind(std::string_view name) {
  for (auto k : {SuppressorKind::kPassthrough, SuppressorKind::kKalmanOnly,
                 SuppressorKind::kOracleMask, SuppressorKind::kTrainedMask}) {
    if (SuppressorKindName(k) == name) return k;
  }
  return std::nullopt;
}

Suppressor Suppressor::Oracle(double mask_cap) {
  if (!(mask_cap > 0.0)) throw Error(ErrorKind::kConfig, "mask cap must be positive");
  Suppressor s(SuppressorKind::kOracleMask);
  s.mask_cap_ = mask_cap;
  return s;
}

Suppressor Suppressor::Trained(MaskModel model) {
  if (!model.AllFinite()) {
    throw Error(ErrorKind::kConfig, "mask model has non-finite parameters");
  }
  Suppressor s(SuppressorKind::kTrainedMask);
  s.model_ = std::move(model);
  return s;
}

Spectrum Suppressor::Suppress(std::span<const Complex> mic, std::span<const Complex> reference,
                              const Spectrum* target) const {
  if (mic.size() != reference.size()) {
    throw Error(ErrorKind::kShape, "suppressor input bin-count mismatch");
  }
  if (NeedsTarget() != (target != nullptr)) {
    throw Error(ErrorKind::kConfig, NeedsTarget()
                                        ? "oracle suppressor requires the target frame"
                                        : "target frame given to a non-oracle suppressor");
  }
  switch (kind_) {
    case SuppressorKind::kPassthrough:
      return Spectrum(mic.begin(), mic.end());
    case SuppressorKind::kKalmanOnly:
      return Spectrum(reference.begin(), reference.end());
    case SuppressorKind::kOracleMask:
      if (target->size() != mic.size()) {
        throw Error(ErrorKind::kShape, "oracle target bin-count mismatch");
      }
      return ApplyMask(OracleMask(*target, mic, mask_cap_), mic);
    case SuppressorKind::kTrainedMask:
      return model_.Apply(mic, reference);
  }
  throw Error(ErrorKind::kConfig, "unknown suppressor kind");
}

SpectralFrame Suppressor::Suppress(const SpectralFrame& mic, const SpectralFrame& reference,
                                   const SpectralFrame* target) const {
  SpectralFrame out;
  out.index = mic.index;
  out.bins = Suppress(mic.bins, reference.bins, target ? &target->bins : nullptr);
  return out;
}

}  // namespace howl
