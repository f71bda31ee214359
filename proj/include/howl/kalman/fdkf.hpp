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

#ifndef HOWL_KALMAN_FDKF_HPP_
#define HOWL_KALMAN_FDKF_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "howl/audio.hpp"
#include "howl/dsp/fft.hpp"
#include "howl/dsp/stft.hpp"

namespace howl {

struct KalmanConfig {
  // New samples per step; the loop engine sets this to its hop.
  std::size_t block = 64;
  // Modeled path length is block * partitions taps (2048 = 128 ms at 16 kHz).
  std::size_t partitions = 32;
  // State transition factor A.
  double transition = 0.999;
  // Recursive |E|^2 average for the observation noise.
  double obs_smoothing = 0.99;
  // Smoothing of the (1 - A^2)|W|^2 process-noise estimate.
  double process_smoothing = 0.9;
  double initial_covariance = 1.0;
  bool enable_process_noise = true;

  std::size_t modeled_taps() const { return block * partitions; }
  void Validate() const;
};

// Per-step outputs. Spectra live on the filter's own overlap-save grid
// (2*block-point FFT of [zeros, block]); |error| is computed as
// mic - playback_estimate and nothing else.
struct KalmanOutput {
  SpectralFrame mic;
  SpectralFrame playback_estimate;
  SpectralFrame error;
  std::vector<double> playback_time;
  std::vector<double> error_time;
  bool accepted = false;
};

// Partitioned-block frequency-domain adaptive Kalman filter with the
// diagonal (per-bin) covariance approximation. Each step takes one block of
// microphone samples and the loudspeaker block that was playing during it,
// predicts the playback from the last |partitions| loudspeaker blocks, and
// updates the per-bin path estimate.
class FrequencyDomainKalman {
 public:
  explicit FrequencyDomainKalman(const KalmanConfig& cfg = {});

  // Non-finite input leaves the state untouched and returns accepted=false.
  // A non-finite weight after the update resets the filter.
  const KalmanOutput& Step(std::span<const double> mic_block,
                           std::span<const double> loudspeaker_block);

  // Time-domain taps implied by the partition weights.
  std::vector<double> ImpulseResponse() const;
  // Replace the path estimate with |taps| (zero-padded or truncated).
  void SetImpulseResponse(std::span<const double> taps);
  // 10 log10(|h_est - h|^2 / |h|^2), floored at -80 dB.
  double Misalignment(std::span<const double> true_taps) const;

  void Reset();

  const KalmanConfig& config() const { return cfg_; }
  std::size_t bins() const { return cfg_.block + 1; }
  const std::vector<Spectrum>& weights() const { return weights_; }
  const std::vector<std::vector<double>>& covariance() const { return covariance_; }
  const std::vector<double>& obs_noise() const { return obs_noise_; }
  std::size_t divergence_resets() const { return divergence_resets_; }
  std::int64_t steps() const { return steps_; }

 private:
  void ApplyConstraint(Spectrum& s);
  bool WeightsFinite() const;

  KalmanConfig cfg_;
  RealFft fft_;
  std::vector<Spectrum> weights_;
  std::vector<std::vector<double>> covariance_;
  std::vector<std::vector<double>> process_noise_;
  std::vector<double> obs_noise_;
  std::vector<Spectrum> reference_;  // ring, newest at head_
  std::size_t head_ = 0;
  std::vector<double> x_frame_;
  std::size_t divergence_resets_ = 0;
  std::int64_t steps_ = 0;

  KalmanOutput out_;
  Spectrum accum_;
  Spectrum update_;
  std::vector<double> time_;
  std::vector<double> denom_;
};

// Convenience overload over an Rir.
double Misalignment(const FrequencyDomainKalman& filter, const Rir& true_rir);

}  // namespace howl

#endif  // HOWL_KALMAN_FDKF_HPP_
