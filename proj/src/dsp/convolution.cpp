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

#include "howl/dsp/convolution.hpp"

#include <algorithm>
#include <array>

#include "howl/common.hpp"

namespace howl {

void ConvolveDirect(std::span<const double> x, std::span<const double> h,
                    std::span<double> out) {
  if (out.size() != x.size()) {
    throw Error(ErrorKind::kShape, "ConvolveDirect output size mismatch");
  }
  constexpr std::size_t kBlock = 64;
  std::array<double, kBlock> acc;
  const std::size_t n_total = x.size();
  for (std::size_t base = 0; base < n_total; base += kBlock) {
    const std::size_t len = std::min(kBlock, n_total - base);
    acc.fill(0.0);
    const std::size_t k_end = std::min(h.size(), base + len);
    for (std::size_t k = 0; k < k_end; ++k) {
      const double hk = h[k];
      const std::size_t i0 = k > base ? k - base : 0;
      const double* xp = x.data() + base - k;
      for (std::size_t i = i0; i < len; ++i) acc[i] += hk * xp[i];
    }
    std::copy_n(acc.begin(), len, out.begin() + static_cast<std::ptrdiff_t>(base));
  }
}

AudioBuffer Convolve(const AudioBuffer& signal, const Rir& rir) {
  if (rir.taps.empty()) {
    throw Error(ErrorKind::kConfig, "rir must be non-empty");
  }
  if (signal.sample_rate != rir.sample_rate) {
    throw Error(ErrorKind::kConfig, "sample-rate mismatch between signal and rir");
  }
  AudioBuffer out(signal.size(), signal.sample_rate);
  ConvolveDirect(signal.samples, rir.taps, out.samples);
  return out;
}

PartitionedConvolver::PartitionedConvolver(std::span<const double> taps, std::size_t block)
    : block_(block),
      fft_(2 * block),
      frame_(2 * block, 0.0),
      accum_(block + 1),
      time_(2 * block, 0.0) {
  if (block == 0) throw Error(ErrorKind::kConfig, "block must be positive");
  std::size_t support = taps.size();
  while (support > 0 && taps[support - 1] == 0.0) --support;
  const std::size_t parts = (support + block - 1) / block;
  kernel_.assign(parts, Spectrum(block + 1));
  history_.assign(parts, Spectrum(block + 1));
  for (std::size_t p = 0; p < parts; ++p) {
    std::fill(time_.begin(), time_.end(), 0.0);
    const std::size_t begin = p * block;
    const std::size_t end = std::min(support, begin + block);
    std::copy(taps.begin() + static_cast<std::ptrdiff_t>(begin),
              taps.begin() + static_cast<std::ptrdiff_t>(end), time_.begin());
    fft_.Forward(time_, kernel_[p]);
  }
}

void PartitionedConvolver::Process(std::span<const double> in, std::span<double> out) {
  if (in.size() != block_ || out.size() != block_) {
    throw Error(ErrorKind::kShape, "PartitionedConvolver block size mismatch");
  }
  if (kernel_.empty()) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  // frame_ = [previous block, current block]
  std::copy(frame_.begin() + static_cast<std::ptrdiff_t>(block_), frame_.end(),
            frame_.begin());
  std::copy(in.begin(), in.end(), frame_.begin() + static_cast<std::ptrdiff_t>(block_));

  const std::size_t parts = kernel_.size();
  head_ = (head_ + parts - 1) % parts;
  fft_.Forward(frame_, history_[head_]);

  std::fill(accum_.begin(), accum_.end(), Complex(0.0, 0.0));
  for (std::size_t p = 0; p < parts; ++p) {
    MultiplyAccumulate(kernel_[p], history_[(head_ + p) % parts], accum_);
  }
  fft_.Inverse(accum_, time_);
  std::copy(time_.begin() + static_cast<std::ptrdiff_t>(block_), time_.end(), out.begin());
}

void PartitionedConvolver::Reset() {
  for (auto& s : history_) std::fill(s.begin(), s.end(), Complex(0.0, 0.0));
  std::fill(frame_.begin(), frame_.end(), 0.0);
  head_ = 0;
}

std::vector<double> ConvolveFft(std::span<const double> x, std::span<const double> h,
                                std::size_t block) {
  std::vector<double> out(x.size(), 0.0);
  PartitionedConvolver conv(h, block);
  std::vector<double> in(block), y(block);
  for (std::size_t base = 0; base < x.size(); base += block) {
    const std::size_t len = std::min(block, x.size() - base);
    std::fill(in.begin(), in.end(), 0.0);
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(base), len, in.begin());
    conv.Process(in, y);
    std::copy_n(y.begin(), len, out.begin() + static_cast<std::ptrdiff_t>(base));
  }
  return out;
}

}  // namespace howl
