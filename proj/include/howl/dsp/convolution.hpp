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

#ifndef HOWL_DSP_CONVOLUTION_HPP_
#define HOWL_DSP_CONVOLUTION_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "howl/audio.hpp"
#include "howl/dsp/fft.hpp"

namespace howl {

// out[n] = sum_k h[k] * x[n - k] for n < x.size(). Each output is summed in
// ascending k, so results are bit-identical to the textbook double loop.
void ConvolveDirect(std::span<const double> x, std::span<const double> h,
                    std::span<double> out);

// Causal playback path: full linear convolution truncated to the signal
// length. Throws kConfig on sample-rate mismatch or an empty rir.
AudioBuffer Convolve(const AudioBuffer& signal, const Rir& rir);

// Streaming uniformly-partitioned overlap-save FIR filter. Each Process call
// consumes and produces exactly |block| samples; the FIR is exact up to FFT
// rounding.
class PartitionedConvolver {
 public:
  PartitionedConvolver(std::span<const double> taps, std::size_t block);

  void Process(std::span<const double> in, std::span<double> out);
  void Reset();

  std::size_t block() const { return block_; }
  std::size_t partitions() const { return kernel_.size(); }

 private:
  std::size_t block_;
  RealFft fft_;
  std::vector<Spectrum> kernel_;
  std::vector<Spectrum> history_;  // ring of input spectra, newest at head_
  std::size_t head_ = 0;
  std::vector<double> frame_;
  Spectrum accum_;
  std::vector<double> time_;
};

// Offline FFT convolution truncated to x.size(); used for building scenes.
std::vector<double> ConvolveFft(std::span<const double> x, std::span<const double> h,
                                std::size_t block = 256);

}  // namespace howl

#endif  // HOWL_DSP_CONVOLUTION_HPP_
