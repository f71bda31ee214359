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

#include "howl/dsp/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <utility>

#include "howl/common.hpp"

namespace howl {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorKind::kConfig, "FFT size must be even and >= 2");
  }
  std::lock_guard<std::mutex> lock(PlannerMutex());
  time_ = fftw_alloc_real(n_);
  auto* freq = fftw_alloc_complex(bins());
  freq_ = freq;
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), time_, freq, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), freq, time_,
                                       FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
}

RealFft::~RealFft() { Release(); }

RealFft::RealFft(RealFft&& other) noexcept { *this = std::move(other); }

RealFft& RealFft::operator=(RealFft&& other) noexcept {
  if (this != &other) {
    Release();
    n_ = std::exchange(other.n_, 0);
    time_ = std::exchange(other.time_, nullptr);
    freq_ = std::exchange(other.freq_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void RealFft::Release() {
  if (time_ == nullptr && forward_plan_ == nullptr) return;
  std::lock_guard<std::mutex> lock(PlannerMutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(time_);
  fftw_free(freq_);
  forward_plan_ = inverse_plan_ = nullptr;
  time_ = nullptr;
  freq_ = nullptr;
}

void RealFft::Forward(std::span<const double> in, std::span<Complex> out) {
  if (in.size() != n_ || out.size() != bins()) {
    throw Error(ErrorKind::kShape, "RealFft::Forward size mismatch");
  }
  std::copy(in.begin(), in.end(), time_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  const auto* freq = static_cast<const Complex*>(freq_);
  std::copy(freq, freq + bins(), out.begin());
}

void RealFft::Inverse(std::span<const Complex> in, std::span<double> out) {
  if (in.size() != bins() || out.size() != n_) {
    throw Error(ErrorKind::kShape, "RealFft::Inverse size mismatch");
  }
  auto* freq = static_cast<Complex*>(freq_);
  std::copy(in.begin(), in.end(), freq);
  // c2r assumes Hermitian symmetry; DC and Nyquist imaginary parts are ignored.
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = time_[i] * scale;
}

}  // namespace howl
