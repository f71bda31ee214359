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

#ifndef HOWL_DSP_STFT_HPP_
#define HOWL_DSP_STFT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "howl/audio.hpp"
#include "howl/dsp/fft.hpp"

namespace howl {

std::vector<double> SqrtHannWindow(std::size_t length);

// Framing for short-time analysis. The analysis and synthesis windows are
// both |window| (square-root periodic Hann), so their product is a Hann
// window which overlap-adds to exactly one at 50% overlap.
struct FrameConfig {
  std::size_t frame_len = 128;
  std::size_t hop = 64;
  std::size_t fft_size = 128;
  std::vector<double> window = SqrtHannWindow(128);

  // 8 ms frames with a 4 ms hop at |sample_rate|.
  static FrameConfig ForSampleRate(double sample_rate);
  static FrameConfig WithFrameLength(std::size_t frame_len);

  std::size_t bins() const { return fft_size / 2 + 1; }
  void Validate() const;
  // max_n |sum_j w[n + j*hop]^2 - 1| over one hop period.
  double ColaDeviation() const;
};


struct SpectralFrame {
  Spectrum bins;
  std::int64_t index = 0;

  std::size_t size() const { return bins.size(); }
};

// Windowed one-sided FFT of single frames; reusable across calls.
class FrameAnalyzer {
 public:
  explicit FrameAnalyzer(const FrameConfig& cfg);

  // |frame| must hold exactly frame_len samples.
  void Analyze(std::span<const double> frame, Spectrum& out);
  SpectralFrame Analyze(std::span<const double> frame, std::int64_t index);

  // Analyze the concatenation [first, second] without building it.
  void AnalyzeSplit(std::span<const double> first, std::span<const double> second,
                    Spectrum& out);

  const FrameConfig& config() const { return cfg_; }

 private:
  FrameConfig cfg_;
  RealFft fft_;
  std::vector<double> scratch_;
};

// Overlap-add synthesis that emits exactly |hop| finished samples per pushed
// frame. The remaining frame_len - hop samples of each frame are carried as
// the overlap tail.
class StreamingSynthesizer {
 public:
  explicit StreamingSynthesizer(const FrameConfig& cfg);

  // Returns a view of the hop samples finalized by this frame; valid until
  // the next call.
  std::span<const double> Push(const Spectrum& bins);
  std::span<const double> Push(const SpectralFrame& frame) { return Push(frame.bins); }
  // Pending tail after the last pushed frame (frame_len - hop samples).
  std::span<const double> Tail() const { return tail_; }
  void Reset();

 private:
  FrameConfig cfg_;
  RealFft fft_;
  std::vector<double> frame_;
  std::vector<double> tail_;
  std::vector<double> out_;
};

// Frame m covers samples [m*hop, m*hop + frame_len). Throws kEmptyInput if
// the signal is shorter than one frame.
std::vector<SpectralFrame> Stft(const AudioBuffer& signal, const FrameConfig& cfg);

// Overlap-add of all frames; output length (F-1)*hop + frame_len, or empty
// for no frames. Throws kShape on inconsistent bin counts.
AudioBuffer Istft(std::span<const SpectralFrame> frames, const FrameConfig& cfg,
                  double sample_rate = kDefaultSampleRate);

// Sum of squared samples implied by a one-sided spectrum of an n-point real
// frame (Parseval).
double SpectrumEnergy(std::span<const Complex> bins, std::size_t fft_size);

// Re-zero the imaginary parts of DC and Nyquist.
void EnforceRealEdges(Spectrum& bins);

}  // namespace howl

#endif  // HOWL_DSP_STFT_HPP_
