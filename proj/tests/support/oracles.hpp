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

// Independent reference implementations used as test oracles. Everything
// here is deliberately naive: plain loops, no FFTs, no frame batching.

#ifndef HOWL_TESTS_SUPPORT_ORACLES_HPP_
#define HOWL_TESTS_SUPPORT_ORACLES_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace howl::testing {

// One-sided DFT by direct summation.
inline std::vector<std::complex<double>> DirectDft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) /
                         static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// y[n] = sum_k h[k] x[n-k], truncated to x.size().
inline std::vector<double> DirectConvolve(std::span<const double> x, std::span<const double> h) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const std::size_t kmax = std::min(h.size(), n + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < kmax; ++k) acc += h[k] * x[n - k];
    y[n] = acc;
  }
  return y;
}

enum class BruteSuppressor { kPassthrough, kOracle };

struct BruteForceResult {
  std::vector<double> y;
  std::vector<double> x;
  std::optional<std::size_t> halt_sample;
};

// Sample-by-sample closed loop: x[n] = G * s_hat[n - D],
// y[n] = s[n] + sum_k h[k] x[n-k], and s_hat = y (passthrough) or s
// (oracle). Convolution runs over a ring buffer of past loudspeaker samples.
// Stops at the sample completing a run of |run| samples with |y| > threshold.
inline BruteForceResult BruteForceLoop(std::span<const double> s, std::span<const double> h,
                                       double gain, std::size_t delay, BruteSuppressor kind,
                                       bool detector, double threshold = 0.99,
                                       std::size_t run = 100) {
  BruteForceResult r;
  const std::size_t n_total = s.size();
  const std::size_t taps = h.size();
  // Ring of past loudspeaker samples, stored twice so that the newest |taps|
  // samples are always contiguous: ring[pos + taps - k] = x[n - k].
  std::vector<double> ring(2 * taps, 0.0);
  std::vector<double> s_hat(n_total, 0.0);
  std::size_t pos = 0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < n_total; ++n) {
    const double x = n >= delay ? gain * s_hat[n - delay] : 0.0;
    pos = (pos + 1) % taps;
    ring[pos] = ring[pos + taps] = x;
    double d = 0.0;
    const double* newest = &ring[pos + taps];
    for (std::size_t k = 0; k < taps; ++k) d += h[k] * newest[-static_cast<std::ptrdiff_t>(k)];
    const double y = s[n] + d;
    r.y.push_back(y);
    r.x.push_back(x);
    if (detector) {
      count = std::abs(y) > threshold ? count + 1 : 0;
      if (count >= run) {
        r.halt_sample = n;
        return r;
      }
    }
    s_hat[n] = kind == BruteSuppressor::kPassthrough ? y : s[n];
  }
  return r;
}

inline std::vector<double> WhiteNoise(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

inline double MaxAbsDiff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace howl::testing

#endif  // HOWL_TESTS_SUPPORT_ORACLES_HPP_
