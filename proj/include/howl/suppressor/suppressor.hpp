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

#ifndef HOWL_SUPPRESSOR_SUPPRESSOR_HPP_
#define HOWL_SUPPRESSOR_SUPPRESSOR_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "howl/dsp/stft.hpp"
#include "howl/suppressor/mask.hpp"

namespace howl {

enum class SuppressorKind {
  kPassthrough,  // S_hat = Y, the "no suppression" case
  kKalmanOnly,   // S_hat = R, which is the Kalman error in hybrid wiring
  kOracleMask,   // needs the ground-truth target frame
  kTrainedMask,  // MaskModel
};

std::string_view SuppressorKindName(SuppressorKind kind);
// Accepts passthrough, kalman-only, oracle, trained.
std::optional<SuppressorKind> ParseSuppressorKind(std::string_view name);

// Frame-local and stateless: the same inputs always give the same output.
class Suppressor {
 public:
  static Suppressor Passthrough() { return Suppressor(SuppressorKind::kPassthrough); }
  static Suppressor KalmanOnly() { return Suppressor(SuppressorKind::kKalmanOnly); }
  // Unbounded by default: inside the loop any clamped bin leaks playback into
  // the output, and that leak recirculates.
  static Suppressor Oracle(double mask_cap = kUnboundedMaskCap);
  static Suppressor Trained(MaskModel model);

  SuppressorKind kind() const { return kind_; }
  bool NeedsTarget() const { return kind_ == SuppressorKind::kOracleMask; }
  const MaskModel& model() const { return model_; }
  double mask_cap() const { return mask_cap_; }

  // |target| must be provided iff kind is kOracleMask (kConfig otherwise).
  Spectrum Suppress(std::span<const Complex> mic, std::span<const Complex> reference,
                    const Spectrum* target = nullptr) const;
  SpectralFrame Suppress(const SpectralFrame& mic, const SpectralFrame& reference,
                         const SpectralFrame* target = nullptr) const;

 private:
  explicit Suppressor(SuppressorKind kind) : kind_(kind) {}

  SuppressorKind kind_;
  MaskModel model_;
  double mask_cap_ = kUnboundedMaskCap;
};

}  // namespace howl

#endif  // HOWL_SUPPRESSOR_SUPPRESSOR_HPP_
