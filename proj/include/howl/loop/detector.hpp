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

#ifndef HOWL_LOOP_DETECTOR_HPP_
#define HOWL_LOOP_DETECTOR_HPP_

#include <cstddef>
#include <optional>
#include <span>

namespace howl {

struct HowlingDetectorConfig {
  double amplitude_threshold = 0.99;
  std::size_t consecutive_samples = 100;
  bool enabled = true;

  void Validate() const;
};

struct DetectionResult {
  bool triggered = false;
  // Offset within the scanned span of the sample that completed the run.
  std::optional<std::size_t> trigger_index;
};

// Run-length test on |sample| > threshold. The run counter persists across
// Scan calls, so runs may straddle hop boundaries.
class HowlingDetector {
 public:
  explicit HowlingDetector(const HowlingDetectorConfig& cfg = {});

  DetectionResult Scan(std::span<const double> samples);

  std::size_t run_length() const { return run_; }
  bool triggered() const { return triggered_; }
  void Reset();

 private:
  HowlingDetectorConfig cfg_;
  std::size_t run_ = 0;
  bool triggered_ = false;
};

}  // namespace howl

#endif  // HOWL_LOOP_DETECTOR_HPP_
