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

#include "howl/rir/image_method.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "howl/common.hpp"
#include "howl/random.hpp"

namespace howl {

namespace {

bool Inside(const Vec3& p, const Vec3& dims) {
  return p.x > 0.0 && p.y > 0.0 && p.z > 0.0 && p.x < dims.x && p.y < dims.y &&
         p.z < dims.z;
}

double UniformSigned(std::mt19937_64& rng) { return 2.0 * Uniform01(rng) - 1.0; }

// Bilinear-transform Butterworth high-pass, direct form I, in place.
void HighPass(std::vector<double>& x, double corner, double fs) {
  const double w0 = 2.0 * std::numbers::pi * corner / fs;
  const double alpha = std::sin(w0) / std::sqrt(2.0);
  const double cw = std::cos(w0);
  const double a0 = 1.0 + alpha;
  const double b0 = (1.0 + cw) / 2.0 / a0;
  const double b1 = -(1.0 + cw) / a0;
  const double b2 = b0;
  const double a1 = -2.0 * cw / a0;
  const double a2 = (1.0 - alpha) / a0;
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& v : x) {
    const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = v;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

}  // namespace

double Distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::size_t RoomSpec::TapCount() const {
  if (rir_length > 0) return rir_length;
  return static_cast<std::size_t>(std::lround(0.5 * sample_rate));
}

void RoomSpec::Validate() const {
  if (!(dimensions.x > 0.0 && dimensions.y > 0.0 && dimensions.z > 0.0)) {
    throw Error(ErrorKind::kConfig, "room dimensions must be positive");
  }
  if (!Inside(source, dimensions) || !Inside(mic, dimensions)) {
    throw Error(ErrorKind::kConfig, "source and microphone must lie inside the room");
  }
  if (!(rt60 >= 0.0) || !std::isfinite(rt60)) {
    throw Error(ErrorKind::kConfig, "rt60 must be finite and >= 0");
  }
  if (!(sample_rate > 0.0) || !(sound_speed > 0.0)) {
    throw Error(ErrorKind::kConfig, "sample rate and sound speed must be positive");
  }
  if (image_jitter < 0.0) {
    throw Error(ErrorKind::kConfig, "image jitter must be >= 0");
  }
  if (!(highpass_hz >= 0.0 && highpass_hz < 0.5 * sample_rate)) {
    throw Error(ErrorKind::kConfig, "high-pass corner must lie in [0, fs/2)");
  }
}

double EyringReflection(const RoomSpec& spec) {
  if (spec.rt60 <= 0.0) return 0.0;
  const Vec3& d = spec.dimensions;
  const double volume = d.x * d.y * d.z;
  const double surface = 2.0 * (d.x * d.y + d.x * d.z + d.y * d.z);
  // Eyring: rt60 = 24 ln10 V / (-c S ln(1 - alpha)), beta = sqrt(1 - alpha).
  return std::exp(-12.0 * std::numbers::ln10 * volume /
                  (spec.sound_speed * surface * spec.rt60));
}

namespace {

std::vector<double> SumImages(const RoomSpec& spec, double beta, std::uint64_t seed) {
  const std::size_t taps = spec.TapCount();
  const double fs = spec.sample_rate;
  const double c = spec.sound_speed;
  const Vec3& L = spec.dimensions;
  const Vec3& s = spec.source;
  const Vec3& r = spec.mic;
  std::vector<double> out(taps, 0.0);

  const double max_dist = static_cast<double>(taps) / fs * c;
  const int nx = static_cast<int>(std::ceil(max_dist / (2.0 * L.x))) + 1;
  const int ny = static_cast<int>(std::ceil(max_dist / (2.0 * L.y))) + 1;
  const int nz = static_cast<int>(std::ceil(max_dist / (2.0 * L.z))) + 1;

  const int max_order = 2 * (nx + ny + nz) + 6;
  std::vector<double> beta_pow(static_cast<std::size_t>(max_order) + 1, 0.0);
  for (int k = 0; k <= max_order; ++k) {
    beta_pow[static_cast<std::size_t>(k)] = k == 0 ? 1.0 : std::pow(beta, k);
  }

  std::mt19937_64 rng(seed);
  const double jitter = spec.image_jitter;
  const double norm = 1.0 / (4.0 * std::numbers::pi);

  for (int mx = -nx; mx <= nx; ++mx) {
    for (int qx = 0; qx <= 1; ++qx) {
      const int ox = std::abs(mx - qx) + std::abs(mx);
      const double px = (1 - 2 * qx) * s.x - r.x + 2.0 * mx * L.x;
      for (int my = -ny; my <= ny; ++my) {
        for (int qy = 0; qy <= 1; ++qy) {
          const int oy = std::abs(my - qy) + std::abs(my);
          const double py = (1 - 2 * qy) * s.y - r.y + 2.0 * my * L.y;
          for (int mz = -nz; mz <= nz; ++mz) {
            for (int qz = 0; qz <= 1; ++qz) {
              const int oz = std::abs(mz - qz) + std::abs(mz);
              const double pz = (1 - 2 * qz) * s.z - r.z + 2.0 * mz * L.z;
              const int order = ox + oy + oz;
              const double gain = beta_pow[static_cast<std::size_t>(order)];
              if (gain == 0.0) continue;
              double dx = px, dy = py, dz = pz;
              if (jitter > 0.0 && order > 0) {
                dx += jitter * UniformSigned(rng);
                dy += jitter * UniformSigned(rng);
                dz += jitter * UniformSigned(rng);
              }
              const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
              if (dist > max_dist) continue;
              const auto tap = static_cast<std::size_t>(std::lround(dist / c * fs));
              if (tap >= taps) continue;
              out[tap] += gain * norm / std::max(dist, 1e-3);
            }
          }
        }
      }
    }
  }
  return out;
}

double EstimateRt60(const std::vector<double>& taps, double fs) {
  Rir probe;
  probe.sample_rate = fs;
  probe.taps = taps;
  return SchroederDecay(probe).rt60;
}

}  // namespace

Rir GenerateRir(const RoomSpec& spec, std::uint64_t seed) {
  spec.Validate();
  const double fs = spec.sample_rate;

  Rir rir;
  rir.sample_rate = fs;
  rir.direct_path_delay =
      static_cast<std::size_t>(std::lround(Distance(spec.source, spec.mic) / spec.sound_speed * fs));

  RoomSpec fit = spec;
  rir.taps = SumImages(fit, EyringReflection(fit), seed);
  if (spec.calibrate_rt60 && spec.rt60 > 0.0) {
    // Fixed-point refit of the design rt60; the measured/design ratio is
    // nearly constant for a given room, so this settles in 2-3 rounds.
    for (int round = 0; round < 6; ++round) {
      const double measured = EstimateRt60(rir.taps, fs);
      if (!(measured > 0.0) || std::abs(measured / spec.rt60 - 1.0) < 0.01) break;
      fit.rt60 *= spec.rt60 / measured;
      rir.taps = SumImages(fit, EyringReflection(fit), seed);
    }
  }

  // Anechoic decay never leaves anything to truncate.
  rir.truncated = spec.rt60 > 0.0 && spec.rt60 * fs > static_cast<double>(rir.taps.size());
  if (spec.highpass_hz > 0.0) HighPass(rir.taps, spec.highpass_hz, fs);
  return rir;
}

RirPair GenerateRirPair(const RoomSpec& spec, const Vec3& near_end_pos, std::uint64_t seed) {
  RoomSpec near_spec = spec;
  near_spec.source = near_end_pos;
  near_spec.Validate();
  RirPair pair;
  pair.near_end = GenerateRir(near_spec, seed);
  pair.loudspeaker = GenerateRir(spec, seed);
  return pair;
}

DecayAnalysis SchroederDecay(const Rir& rir) {
  const double total = rir.Energy();
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kUndefined, "Schroeder decay of a zero-energy rir");
  }
  const std::size_t n = rir.taps.size();
  DecayAnalysis out;
  out.decay_db.assign(n, -std::numeric_limits<double>::infinity());
  double remaining = 0.0;
  std::vector<double> edc(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    remaining += rir.taps[i] * rir.taps[i];
    edc[i] = remaining;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (edc[i] > 0.0) out.decay_db[i] = 10.0 * std::log10(edc[i] / edc[0]);
  }

  // Linear regression of dB vs seconds over the -5..-25 dB span.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  bool reached_end = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double db = out.decay_db[i];
    if (db < -25.0) {
      reached_end = true;
      break;
    }
    if (db > -5.0) continue;
    const double t = static_cast<double>(i) / rir.sample_rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++count;
  }
  if (!reached_end || count < 2) return out;
  const double cnt = static_cast<double>(count);
  const double denom = cnt * sxx - sx * sx;
  if (!(denom > 0.0)) return out;
  const double slope = (cnt * sxy - sx * sy) / denom;  // dB per second
  if (slope < 0.0) out.rt60 = -60.0 / slope;
  return out;
}

}  // namespace howl
