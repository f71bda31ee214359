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

#include "howl/suppressor/loss.hpp"

#include <cmath>

#include "howl/common.hpp"

namespace howl {

namespace {

double Sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void CheckFrames(const MaskModel& model, std::span<const FrozenFrame> frames) {
  if (frames.empty()) throw Error(ErrorKind::kUndefined, "loss over an empty frame sequence");
  for (const auto& f : frames) {
    if (f.mic.size() != model.bins() || f.reference.size() != model.bins() ||
        f.target.size() != model.bins()) {
      throw Error(ErrorKind::kShape, "frozen frame bin-count mismatch");
    }
  }
}

}  // namespace

double MaeLoss(std::span<const SpectralFrame> estimate, std::span<const SpectralFrame> target) {
  if (estimate.empty() || target.empty()) {
    throw Error(ErrorKind::kUndefined, "loss over an empty frame sequence");
  }
  if (estimate.size() != target.size()) {
    throw Error(ErrorKind::kShape, "loss frame-count mismatch");
  }
  double re = 0.0, im = 0.0;
  std::size_t count = 0;
  for (std::size_t m = 0; m < estimate.size(); ++m) {
    const auto& a = estimate[m].bins;
    const auto& b = target[m].bins;
    if (a.size() != b.size() || a.size() != estimate.front().size()) {
      throw Error(ErrorKind::kShape, "loss bin-count mismatch");
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
      re += std::abs(a[k].real() - b[k].real());
      im += std::abs(a[k].imag() - b[k].imag());
    }
    count += a.size();
  }
  if (count == 0) throw Error(ErrorKind::kUndefined, "loss over frames without bins");
  return re / static_cast<double>(count) + im / static_cast<double>(count);
}

double MaeLoss(const MaskModel& model, std::span<const FrozenFrame> frames) {
  CheckFrames(model, frames);
  double total = 0.0;
  for (const auto& f : frames) {
    const Spectrum est = model.Apply(f.mic, f.reference);
    for (std::size_t k = 0; k < est.size(); ++k) {
      total += std::abs(est[k].real() - f.target[k].real()) +
               std::abs(est[k].imag() - f.target[k].imag());
    }
  }
  return total / static_cast<double>(frames.size() * model.bins());
}

MaskGradient GradMaeFrozen(const MaskModel& model, std::span<const FrozenFrame> frames) {
  CheckFrames(model, frames);
  const std::size_t n = model.bins();
  MaskGradient g;
  g.values.assign(4 * n, 0.0);
  double total = 0.0;
  for (const auto& f : frames) {
    const Spectrum est = model.Apply(f.mic, f.reference);
    for (std::size_t k = 0; k < n; ++k) {
      const double res_r = est[k].real() - f.target[k].real();
      const double res_i = est[k].imag() - f.target[k].imag();
      total += std::abs(res_r) + std::abs(res_i);
      const double sr = Sign(res_r);
      // The imaginary output is pinned to zero at DC and Nyquist, so it
      // carries no parameter dependence there.
      const bool edge = k == 0 || k + 1 == n;
      const double si = edge ? 0.0 : Sign(res_i);
      const Complex y = f.mic[k];
      const Complex r = f.reference[k];
      // est_r = a*Yr - b*Yi + c*Rr - d*Ri ; est_i = a*Yi + b*Yr + c*Ri + d*Rr
      g.values[k] += sr * y.real() + si * y.imag();
      g.values[n + k] += -sr * y.imag() + si * y.real();
      g.values[2 * n + k] += sr * r.real() + si * r.imag();
      g.values[3 * n + k] += -sr * r.imag() + si * r.real();
    }
  }
  const double scale = 1.0 / static_cast<double>(frames.size() * n);
  for (double& v : g.values) v *= scale;
  g.loss = total * scale;
  return g;
}

}  // namespace howl
