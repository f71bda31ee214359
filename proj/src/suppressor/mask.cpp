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

#include "howl/suppressor/mask.hpp"

#include <algorithm>
#include <cmath>

#include "howl/common.hpp"

namespace howl {

ComplexMask OracleMask(std::span<const Complex> target, std::span<const Complex> mic,
                       double cap) {
  if (target.size() != mic.size()) {
    throw Error(ErrorKind::kShape, "oracle mask bin-count mismatch");
  }
  ComplexMask mask;
  mask.gains.resize(mic.size());
  for (std::size_t k = 0; k < mic.size(); ++k) {
    if (std::abs(mic[k]) < kMaskFloor) {
      mask.gains[k] = Complex();
      continue;
    }
    Complex g = target[k] / mic[k];
    const double mag = std::abs(g);
    if (mag > cap) g *= cap / mag;
    mask.gains[k] = g;
  }
  return mask;
}

Spectrum ApplyMask(const ComplexMask& mask, std::span<const Complex> mic) {
  if (mask.gains.size() != mic.size()) {
    throw Error(ErrorKind::kShape, "mask bin-count mismatch");
  }
  Spectrum out(mic.size());
  for (std::size_t k = 0; k < mic.size(); ++k) out[k] = mask.gains[k] * mic[k];
  EnforceRealEdges(out);
  return out;
}

MaskModel::MaskModel(std::size_t bins)
    : mic_gain_(bins, Complex(1.0, 0.0)), ref_gain_(bins, Complex()) {}

MaskModel MaskModel::Zeros(std::size_t bins) {
  MaskModel m(bins);
  std::fill(m.mic_gain_.begin(), m.mic_gain_.end(), Complex());
  return m;
}

Spectrum MaskModel::Apply(std::span<const Complex> mic,
                          std::span<const Complex> reference) const {
  if (mic.size() != bins() || reference.size() != bins()) {
    throw Error(ErrorKind::kShape, "mask model bin-count mismatch");
  }
  Spectrum out(bins());
  for (std::size_t k = 0; k < bins(); ++k) {
    out[k] = mic_gain_[k] * mic[k] + ref_gain_[k] * reference[k];
  }
  EnforceRealEdges(out);
  return out;
}

std::vector<double> MaskModel::Parameters() const {
  const std::size_t n = bins();
  std::vector<double> p(4 * n);
  for (std::size_t k = 0; k < n; ++k) {
    p[k] = mic_gain_[k].real();
    p[n + k] = mic_gain_[k].imag();
    p[2 * n + k] = ref_gain_[k].real();
    p[3 * n + k] = ref_gain_[k].imag();
  }
  return p;
}

void MaskModel::SetParameters(std::span<const double> p) {
  const std::size_t n = bins();
  if (p.size() != 4 * n) {
    throw Error(ErrorKind::kShape, "mask model parameter count mismatch");
  }
  for (std::size_t k = 0; k < n; ++k) {
    mic_gain_[k] = Complex(p[k], p[n + k]);
    ref_gain_[k] = Complex(p[2 * n + k], p[3 * n + k]);
  }
}

bool MaskModel::AllFinite() const {
  for (double v : Parameters()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace howl
