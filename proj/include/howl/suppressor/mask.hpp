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

#ifndef HOWL_SUPPRESSOR_MASK_HPP_
#define HOWL_SUPPRESSOR_MASK_HPP_

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "howl/dsp/fft.hpp"
#include "howl/dsp/stft.hpp"

namespace howl {

inline constexpr double kDefaultMaskCap = 5.0;
inline constexpr double kUnboundedMaskCap = std::numeric_limits<double>::infinity();
inline constexpr double kMaskFloor = 1e-8;

struct ComplexMask {
  Spectrum gains;
};

// Complex ratio mask target / mic per bin. Bins with |mic| < 1e-8 get 0;
// magnitudes above |cap| are clamped with phase kept.
ComplexMask OracleMask(std::span<const Complex> target, std::span<const Complex> mic,
                       double cap = kDefaultMaskCap);

// Bin-wise product; DC and Nyquist imaginary parts re-zeroed.
Spectrum ApplyMask(const ComplexMask& mask, std::span<const Complex> mic);

// Per-bin affine complex mask over the microphone and reference spectra:
//   out[k] = mic_gain[k] * Y[k] + ref_gain[k] * R[k]
// Four real parameters per bin. Input features are the [|Y|, |R|, Y_r, Y_i]
// layout; the affine form spans everything linear in them plus the phase of R.
class MaskModel {
 public:
  MaskModel() = default;
  explicit MaskModel(std::size_t bins);  // identity: mic_gain 1, ref_gain 0

  static MaskModel Identity(std::size_t bins) { return MaskModel(bins); }
  static MaskModel Zeros(std::size_t bins);

  std::size_t bins() const { return mic_gain_.size(); }
  std::size_t ParameterCount() const { return 4 * bins(); }

  Spectrum Apply(std::span<const Complex> mic, std::span<const Complex> reference) const;

  // Flat layout: [Re M..., Im M..., Re N..., Im N...].
  std::vector<double> Parameters() const;
  void SetParameters(std::span<const double> params);
  bool AllFinite() const;

  Spectrum& mic_gain() { return mic_gain_; }
  Spectrum& ref_gain() { return ref_gain_; }
  const Spectrum& mic_gain() const { return mic_gain_; }
  const Spectrum& ref_gain() const { return ref_gain_; }

  bool operator==(const MaskModel& other) const = default;

 private:
  Spectrum mic_gain_;
  Spectrum ref_gain_;
};

}  // namespace howl

#endif  // HOWL_SUPPRESSOR_MASK_HPP_
