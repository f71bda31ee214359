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

#include "howl/kalman/fdkf.hpp"

#include <algorithm>
#include <cmath>

#include "howl/common.hpp"

namespace howl {

namespace {

bool AllFinite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

constexpr double kMisalignmentFloorDb = -80.0;

}  // namespace

void KalmanConfig::Validate() const {
  if (block == 0 || partitions == 0) {
    throw Error(ErrorKind::kConfig, "Kalman block and partitions must be positive");
  }
  if (!(transition > 0.0 && transition <= 1.0)) {
    throw Error(ErrorKind::kConfig, "Kalman transition must be in (0, 1]");
  }
  if (!(obs_smoothing >= 0.0 && obs_smoothing < 1.0) ||
      !(process_smoothing >= 0.0 && process_smoothing < 1.0)) {
    throw Error(ErrorKind::kConfig, "Kalman smoothing factors must be in [0, 1)");
  }
  if (!(initial_covariance > 0.0)) {
    throw Error(ErrorKind::kConfig, "Kalman initial covariance must be positive");
  }
}

FrequencyDomainKalman::FrequencyDomainKalman(const KalmanConfig& cfg)
    : cfg_(cfg), fft_(2 * cfg.block) {
  cfg_.Validate();
  Reset();
}

void FrequencyDomainKalman::Reset() {
  const std::size_t p = cfg_.partitions;
  const std::size_t k = bins();
  weights_.assign(p, Spectrum(k));
  covariance_.assign(p, std::vector<double>(k, cfg_.initial_covariance));
  process_noise_.assign(p, std::vector<double>(k, 0.0));
  obs_noise_.assign(k, 0.0);
  reference_.assign(p, Spectrum(k));
  head_ = 0;
  x_frame_.assign(2 * cfg_.block, 0.0);
  accum_.assign(k, Complex());
  update_.assign(k, Complex());
  time_.assign(2 * cfg_.block, 0.0);
  denom_.assign(k, 0.0);
  steps_ = 0;
}

void FrequencyDomainKalman::ApplyConstraint(Spectrum& s) {
  // Keep the first |block| lags of the gradient image; the second half is
  // circular wrap-around.
  fft_.Inverse(s, time_);
  std::fill(time_.begin() + static_cast<std::ptrdiff_t>(cfg_.block), time_.end(), 0.0);
  fft_.Forward(time_, s);
}

bool FrequencyDomainKalman::WeightsFinite() const {
  for (const auto& w : weights_) {
    for (const auto& v : w) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  }
  return true;
}

const KalmanOutput& FrequencyDomainKalman::Step(std::span<const double> mic_block,
                                                std::span<const double> loudspeaker_block) {
  const std::size_t b = cfg_.block;
  const std::size_t nb = bins();
  const std::size_t parts = cfg_.partitions;
  if (mic_block.size() != b || loudspeaker_block.size() != b) {
    throw Error(ErrorKind::kShape, "Kalman step block size mismatch");
  }
  out_.accepted = false;
  if (!AllFinite(mic_block) || !AllFinite(loudspeaker_block)) return out_;

  const double a = cfg_.transition;
  const double a2 = a * a;

  // Time update.
  for (std::size_t p = 0; p < parts; ++p) {
    for (std::size_t k = 0; k < nb; ++k) {
      weights_[p][k] *= a;
      covariance_[p][k] = a2 * covariance_[p][k] + process_noise_[p][k];
    }
  }

  // Reference spectrum of [previous block, current block].
  std::copy(x_frame_.begin() + static_cast<std::ptrdiff_t>(b), x_frame_.end(), x_frame_.begin());
  std::copy(loudspeaker_block.begin(), loudspeaker_block.end(),
            x_frame_.begin() + static_cast<std::ptrdiff_t>(b));
  head_ = (head_ + parts - 1) % parts;
  fft_.Forward(x_frame_, reference_[head_]);
  auto ref = [&](std::size_t p) -> const Spectrum& { return reference_[(head_ + p) % parts]; };

  // Playback prediction (overlap-save: keep the last block).
  std::fill(accum_.begin(), accum_.end(), Complex());
  for (std::size_t p = 0; p < parts; ++p) {
    MultiplyAccumulate(weights_[p], ref(p), accum_);
  }
  fft_.Inverse(accum_, time_);
  out_.playback_time.assign(time_.begin() + static_cast<std::ptrdiff_t>(b), time_.end());
  out_.error_time.resize(b);
  for (std::size_t i = 0; i < b; ++i) out_.error_time[i] = mic_block[i] - out_.playback_time[i];

  std::fill(time_.begin(), time_.end(), 0.0);
  std::copy(mic_block.begin(), mic_block.end(), time_.begin() + static_cast<std::ptrdiff_t>(b));
  out_.mic.bins.resize(nb);
  fft_.Forward(time_, out_.mic.bins);
  std::fill(time_.begin(), time_.end(), 0.0);
  std::copy(out_.playback_time.begin(), out_.playback_time.end(),
            time_.begin() + static_cast<std::ptrdiff_t>(b));
  out_.playback_estimate.bins.resize(nb);
  fft_.Forward(time_, out_.playback_estimate.bins);
  out_.error.bins.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    out_.error.bins[k] = out_.mic.bins[k] - out_.playback_estimate.bins[k];
  }
  out_.mic.index = out_.playback_estimate.index = out_.error.index = steps_;
  const Spectrum& e = out_.error.bins;

  // Measurement update.
  const double lambda = cfg_.obs_smoothing;
  for (std::size_t k = 0; k < nb; ++k) {
    obs_noise_[k] = lambda * obs_noise_[k] + (1.0 - lambda) * std::norm(e[k]);
    double d = 2.0 * obs_noise_[k];
    for (std::size_t p = 0; p < parts; ++p) d += covariance_[p][k] * std::norm(ref(p)[k]);
    denom_[k] = d;
  }
  for (std::size_t p = 0; p < parts; ++p) {
    const Spectrum& x = ref(p);
    auto& cov = covariance_[p];
    bool any = false;
    for (std::size_t k = 0; k < nb; ++k) {
      if (denom_[k] > 0.0 && std::isfinite(denom_[k])) {
        const Complex gain = cov[k] * std::conj(x[k]) / denom_[k];
        update_[k] = Mul(gain, e[k]);
        any = any || update_[k] != Complex();
        cov[k] *= 1.0 - 0.5 * cov[k] * std::norm(x[k]) / denom_[k];
      } else {
        update_[k] = Complex();
      }
    }
    if (any) {
      ApplyConstraint(update_);
      for (std::size_t k = 0; k < nb; ++k) weights_[p][k] += update_[k];
    }
  }

  if (cfg_.enable_process_noise) {
    const double alpha = cfg_.process_smoothing;
    for (std::size_t p = 0; p < parts; ++p) {
      for (std::size_t k = 0; k < nb; ++k) {
        process_noise_[p][k] = alpha * process_noise_[p][k] +
                               (1.0 - alpha) * (1.0 - a2) * std::norm(weights_[p][k]);
      }
    }
  }

  if (!WeightsFinite()) {
    ++divergence_resets_;
    const auto resets = divergence_resets_;
    const auto steps = steps_;
    Reset();
    divergence_resets_ = resets;
    steps_ = steps;
  }
  ++steps_;
  out_.accepted = true;
  return out_;
}

std::vector<double> FrequencyDomainKalman::ImpulseResponse() const {
  const std::size_t b = cfg_.block;
  std::vector<double> taps(cfg_.modeled_taps(), 0.0);
  RealFft fft(2 * b);
  std::vector<double> t(2 * b);
  for (std::size_t p = 0; p < cfg_.partitions; ++p) {
    fft.Inverse(weights_[p], t);
    std::copy_n(t.begin(), b, taps.begin() + static_cast<std::ptrdiff_t>(p * b));
  }
  return taps;
}

void FrequencyDomainKalman::SetImpulseResponse(std::span<const double> taps) {
  const std::size_t b = cfg_.block;
  std::vector<double> t(2 * b);
  for (std::size_t p = 0; p < cfg_.partitions; ++p) {
    std::fill(t.begin(), t.end(), 0.0);
    for (std::size_t i = 0; i < b; ++i) {
      const std::size_t n = p * b + i;
      if (n < taps.size()) t[i] = taps[n];
    }
    fft_.Forward(t, weights_[p]);
  }
}

double FrequencyDomainKalman::Misalignment(std::span<const double> true_taps) const {
  const std::size_t n = cfg_.modeled_taps();
  double ref_energy = 0.0;
  for (std::size_t i = 0; i < std::min(n, true_taps.size()); ++i) {
    ref_energy += true_taps[i] * true_taps[i];
  }
  if (!(ref_energy > 0.0)) {
    throw Error(ErrorKind::kUndefined, "misalignment against a zero-energy path");
  }
  const auto est = ImpulseResponse();
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = i < true_taps.size() ? true_taps[i] : 0.0;
    const double d = est[i] - h;
    err += d * d;
  }
  const double ratio = err / ref_energy;
  if (ratio <= 1e-8) return kMisalignmentFloorDb;
  return std::max(kMisalignmentFloorDb, 10.0 * std::log10(ratio));
}

double Misalignment(const FrequencyDomainKalman& filter, const Rir& true_rir) {
  return filter.Misalignment(true_rir.taps);
}

}  // namespace howl
