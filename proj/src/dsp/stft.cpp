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

#include "howl/dsp/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "howl/common.hpp"

namespace howl {

std::vector<double> SqrtHannWindow(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n) {
    const double hann =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                             static_cast<double>(length));
    w[n] = std::sqrt(hann);
  }
  return w;
}

FrameConfig FrameConfig::WithFrameLength(std::size_t frame_len) {
  FrameConfig cfg;
  cfg.frame_len = frame_len;
  cfg.hop = frame_len / 2;
  cfg.fft_size = frame_len;
  cfg.window = SqrtHannWindow(frame_len);
  cfg.Validate();
  return cfg;
}

FrameConfig FrameConfig::ForSampleRate(double sample_rate) {
  if (!(sample_rate > 0.0)) {
    throw Error(ErrorKind::kConfig, "sample rate must be positive");
  }
  auto frame_len = static_cast<std::size_t>(std::lround(0.008 * sample_rate));
  frame_len += frame_len % 2;
  return WithFrameLength(frame_len);
}

void FrameConfig::Validate() const {
  if (frame_len < 2 || frame_len % 2 != 0) {
    throw Error(ErrorKind::kConfig, "frame_len must be even and >= 2");
  }
  if (hop * 2 != frame_len) {
    throw Error(ErrorKind::kConfig, "hop must be frame_len / 2");
  }
  if (fft_size != frame_len) {
    throw Error(ErrorKind::kConfig, "fft_size must equal frame_len");
  }
  if (window.size() != frame_len) {
    throw Error(ErrorKind::kConfig, "window length must equal frame_len");
  }
}

double FrameConfig::ColaDeviation() const {
  double worst = 0.0;
  for (std::size_t n = 0; n < hop; ++n) {
    double sum = 0.0;
    for (std::size_t k = n; k < frame_len; k += hop) sum += window[k] * window[k];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

void EnforceRealEdges(Spectrum& bins) {
  if (bins.empty()) return;
  bins.front().imag(0.0);
  bins.back().imag(0.0);
}

double SpectrumEnergy(std::span<const Complex> bins, std::size_t fft_size) {
  if (bins.empty()) return 0.0;
  double e = std::norm(bins.front()) + std::norm(bins.back());
  for (std::size_t k = 1; k + 1 < bins.size(); ++k) e += 2.0 * std::norm(bins[k]);
  return e / static_cast<double>(fft_size);
}

FrameAnalyzer::FrameAnalyzer(const FrameConfig& cfg)
    : cfg_(cfg), fft_(cfg.fft_size), scratch_(cfg.fft_size, 0.0) {
  cfg_.Validate();
}

void FrameAnalyzer::Analyze(std::span<const double> frame, Spectrum& out) {
  if (frame.size() != cfg_.frame_len) {
    throw Error(ErrorKind::kShape, "frame length mismatch in analysis");
  }
  AnalyzeSplit(frame, {}, out);
}

SpectralFrame FrameAnalyzer::Analyze(std::span<const double> frame, std::int64_t index) {
  SpectralFrame f;
  f.index = index;
  Analyze(frame, f.bins);
  return f;
}

void FrameAnalyzer::AnalyzeSplit(std::span<const double> first,
                                 std::span<const double> second, Spectrum& out) {
  if (first.size() + second.size() != cfg_.frame_len) {
    throw Error(ErrorKind::kShape, "frame length mismatch in analysis");
  }
  const auto& w = cfg_.window;
  std::size_t n = 0;
  for (double v : first) {
    scratch_[n] = v * w[n];
    ++n;
  }
  for (double v : second) {
    scratch_[n] = v * w[n];
    ++n;
  }
  out.resize(cfg_.bins());
  fft_.Forward(scratch_, out);
  EnforceRealEdges(out);
}

StreamingSynthesizer::StreamingSynthesizer(const FrameConfig& cfg)
    : cfg_(cfg),
      fft_(cfg.fft_size),
      frame_(cfg.fft_size, 0.0),
      tail_(cfg.frame_len - cfg.hop, 0.0),
      out_(cfg.hop, 0.0) {
  cfg_.Validate();
}

std::span<const double> StreamingSynthesizer::Push(const Spectrum& bins) {
  if (bins.size() != cfg_.bins()) {
    throw Error(ErrorKind::kShape,
                "synthesis frame has " + std::to_string(bins.size()) + " bins, expected " +
                    std::to_string(cfg_.bins()));
  }
  fft_.Inverse(bins, frame_);
  const auto& w = cfg_.window;
  for (std::size_t n = 0; n < cfg_.frame_len; ++n) frame_[n] *= w[n];

  // With 50% overlap the tail is exactly one hop long.
  for (std::size_t n = 0; n < cfg_.hop; ++n) out_[n] = tail_[n] + frame_[n];
  std::copy(frame_.begin() + static_cast<std::ptrdiff_t>(cfg_.hop),
            frame_.begin() + static_cast<std::ptrdiff_t>(cfg_.frame_len), tail_.begin());
  return out_;
}

void StreamingSynthesizer::Reset() {
  std::fill(tail_.begin(), tail_.end(), 0.0);
}

std::vector<SpectralFrame> Stft(const AudioBuffer& signal, const FrameConfig& cfg) {
  cfg.Validate();
  if (signal.size() < cfg.frame_len) {
    throw Error(ErrorKind::kEmptyInput, "signal shorter than one frame");
  }
  FrameAnalyzer analyzer(cfg);
  const std::size_t count = (signal.size() - cfg.frame_len) / cfg.hop + 1;
  std::vector<SpectralFrame> frames(count);
  std::span<const double> x = signal.samples;
  for (std::size_t m = 0; m < count; ++m) {
    frames[m].index = static_cast<std::int64_t>(m);
    analyzer.Analyze(x.subspan(m * cfg.hop, cfg.frame_len), frames[m].bins);
  }
  return frames;
}

AudioBuffer Istft(std::span<const SpectralFrame> frames, const FrameConfig& cfg,
                  double sample_rate) {
  cfg.Validate();
  AudioBuffer out;
  out.sample_rate = sample_rate;
  if (frames.empty()) return out;
  for (const auto& f : frames) {
    if (f.size() != frames.front().size() || f.size() != cfg.bins()) {
      throw Error(ErrorKind::kShape, "inconsistent bin counts in istft input");
    }
  }
  StreamingSynthesizer synth(cfg);
  out.samples.reserve((frames.size() - 1) * cfg.hop + cfg.frame_len);
  for (const auto& f : frames) {
    auto hop = synth.Push(f);
    out.samples.insert(out.samples.end(), hop.begin(), hop.end());
  }
  auto tail = synth.Tail();
  out.samples.insert(out.samples.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace howl
