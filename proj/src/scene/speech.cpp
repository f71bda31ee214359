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

#include "howl/scene/speech.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "howl/common.hpp"
#include "howl/random.hpp"

namespace howl {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vowel {
  std::array<double, 3> formants;
  std::array<double, 3> bandwidths;
};

constexpr std::array<Vowel, 5> kVowels = {{
    {{730.0, 1090.0, 2440.0}, {90.0, 110.0, 170.0}},  // a
    {{530.0, 1840.0, 2480.0}, {60.0, 100.0, 140.0}},  // e
    {{270.0, 2290.0, 3010.0}, {60.0, 90.0, 150.0}},   // i
    {{570.0, 840.0, 2410.0}, {70.0, 80.0, 160.0}},    // o
    {{300.0, 870.0, 2240.0}, {60.0, 90.0, 140.0}},    // u
}};

double FormantGain(const Vowel& v, double f) {
  double g = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double d = (f - v.formants[i]) / v.bandwidths[i];
    g += std::pow(0.6, static_cast<double>(i)) / (1.0 + d * d);
  }
  return g;
}

// Raised-cosine attack and release over |edge| samples.
double Envelope(std::size_t n, std::size_t len, std::size_t edge) {
  edge = std::min(edge, len / 2);
  if (edge == 0) return 1.0;
  if (n < edge) return 0.5 - 0.5 * std::cos(std::numbers::pi * n / edge);
  if (n >= len - edge) return 0.5 - 0.5 * std::cos(std::numbers::pi * (len - 1 - n) / edge);
  return 1.0;
}

void AddVoiced(std::vector<double>& out, std::size_t start, std::size_t len, double fs,
               std::mt19937_64& rng) {
  const Vowel& v = kVowels[static_cast<std::size_t>(Uniform01(rng) * kVowels.size())];
  const double f0_start = UniformIn(rng, 90.0, 240.0);
  const double f0_end = f0_start * UniformIn(rng, 0.8, 1.2);
  const double level = UniformIn(rng, 0.5, 1.0);
  const double nyquist_guard = std::min(4000.0, 0.45 * fs);
  const std::size_t harmonics =
      static_cast<std::size_t>(nyquist_guard / std::max(f0_start, f0_end));
  std::vector<double> gains(harmonics);
  std::vector<double> phases(harmonics);
  for (std::size_t h = 0; h < harmonics; ++h) {
    gains[h] = FormantGain(v, (h + 1) * 0.5 * (f0_start + f0_end));
    phases[h] = kTwoPi * Uniform01(rng);
  }
  double phase = 0.0;
  const std::size_t edge = static_cast<std::size_t>(0.015 * fs);
  for (std::size_t n = 0; n < len && start + n < out.size(); ++n) {
    const double f0 = f0_start + (f0_end - f0_start) * n / len;
    phase += kTwoPi * f0 / fs;
    if (phase > kTwoPi) phase -= kTwoPi;
    double acc = 0.0;
    for (std::size_t h = 0; h < harmonics; ++h) {
      acc += gains[h] * std::sin((h + 1) * phase + phases[h]);
    }
    out[start + n] += level * Envelope(n, len, edge) * acc;
  }
}

void AddUnvoiced(std::vector<double>& out, std::size_t start, std::size_t len, double fs,
                 std::mt19937_64& rng) {
  const double level = UniformIn(rng, 0.1, 0.3);
  const std::size_t edge = static_cast<std::size_t>(0.005 * fs);
  double prev = 0.0;
  for (std::size_t n = 0; n < len && start + n < out.size(); ++n) {
    // First difference tilts the white noise towards high frequencies.
    const double w = StandardNormal(rng);
    out[start + n] += level * Envelope(n, len, edge) * (w - 0.7 * prev);
    prev = w;
  }
}

}  // namespace

AudioBuffer SynthesizeSpeech(double duration_seconds, double sample_rate, std::uint64_t seed) {
  if (!(sample_rate > 0.0)) throw Error(ErrorKind::kConfig, "sample rate must be positive");
  if (!(duration_seconds > 0.0)) throw Error(ErrorKind::kConfig, "duration must be positive");
  const std::size_t total = static_cast<std::size_t>(std::llround(duration_seconds * sample_rate));
  std::vector<double> out(total, 0.0);
  std::mt19937_64 rng(seed);
  std::size_t pos = static_cast<std::size_t>(0.02 * sample_rate);
  while (pos < total) {
    const double kind = Uniform01(rng);
    if (kind < 0.65) {
      const auto len = static_cast<std::size_t>(UniformIn(rng, 0.08, 0.25) * sample_rate);
      AddVoiced(out, pos, len, sample_rate, rng);
      pos += len;
    } else if (kind < 0.85) {
      const auto len = static_cast<std::size_t>(UniformIn(rng, 0.04, 0.1) * sample_rate);
      AddUnvoiced(out, pos, len, sample_rate, rng);
      pos += len;
    } else {
      pos += static_cast<std::size_t>(UniformIn(rng, 0.03, 0.15) * sample_rate);
    }
  }
  const double rms = Rms(out);
  if (rms > 0.0) {
    for (double& v : out) v *= 0.1 / rms;
  }
  return AudioBuffer(std::move(out), sample_rate);
}

}  // namespace howl
