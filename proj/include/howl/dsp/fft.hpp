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

#ifndef HOWL_DSP_FFT_HPP_
#define HOWL_DSP_FFT_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace howl {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

// Plain complex product. operator* on std::complex goes through the
// Annex G NaN-recovery path, which is several times slower in hot loops.
inline Complex Mul(const Complex& a, const Complex& b) {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

// acc[k] += a[k] * b[k]
inline void MultiplyAccumulate(std::span<const Complex> a, std::span<const Complex> b,
                               std::span<Complex> acc) {
  const double* pa = reinterpret_cast<const double*>(a.data());
  const double* pb = reinterpret_cast<const double*>(b.data());
  double* pc = reinterpret_cast<double*>(acc.data());
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const double ar = pa[2 * k], ai = pa[2 * k + 1];
    const double br = pb[2 * k], bi = pb[2 * k + 1];
    pc[2 * k] += ar * br - ai * bi;
    pc[2 * k + 1] += ar * bi + ai * br;
  }
}

// Real-input FFT of fixed even size |n| backed by FFTW. Produces the
// one-sided spectrum (n/2 + 1 bins). Forward is unnormalized; Inverse
// scales by 1/n so Inverse(Forward(x)) == x.
//
// Owns its plans and aligned scratch; movable, not copyable. Distinct
// instances may be used concurrently from different threads.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&& other) noexcept;
  RealFft& operator=(RealFft&& other) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  void Forward(std::span<const double> in, std::span<Complex> out);
  void Inverse(std::span<const Complex> in, std::span<double> out);

 private:
  void Release();

  std::size_t n_ = 0;
  double* time_ = nullptr;
  void* freq_ = nullptr;  // fftw_complex*
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace howl

#endif  // HOWL_DSP_FFT_HPP_
