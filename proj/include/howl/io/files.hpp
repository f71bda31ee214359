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

#ifndef HOWL_IO_FILES_HPP_
#define HOWL_IO_FILES_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "howl/audio.hpp"
#include "howl/kalman/fdkf.hpp"
#include "howl/metrics/evaluate.hpp"
#include "howl/suppressor/mask.hpp"
#include "howl/suppressor/trainer.hpp"

namespace howl {

inline constexpr int kModelFileVersion = 1;

// Provenance written at the top of every CSV as "# key=value" lines.
struct FileHeader {
  std::string kind;     // e.g. "scene-report"
  std::string command;  // subcommand that produced the file
  std::uint64_t seed = 0;
  std::string config_hash;
};

std::uint64_t Fnv1a64(std::string_view data);
std::string HexDigest(std::uint64_t value);

// Shortest round-tripping decimal form; "nan", "inf", "-inf" otherwise.
std::string FormatNumber(double v);

// Model CSV: header lines (format, version, bins), then one row per bin with
// the real and imaginary parts of the mic and reference gains.
void SaveModel(const std::filesystem::path& path, const MaskModel& model,
               const FileHeader& header);
// Throws kIo for unreadable, truncated or malformed files.
MaskModel LoadModel(const std::filesystem::path& path);

// RIR as a tap list. CSV export carries sample rate and direct-path delay;
// import also accepts a bare list of numbers (one or more per line).
void SaveRirCsv(const std::filesystem::path& path, const Rir& rir);
Rir LoadRirCsv(const std::filesystem::path& path, double sample_rate = kDefaultSampleRate);
// Float WAV keeps the taps unquantized; .csv and .wav are picked by extension.
void SaveRir(const std::filesystem::path& path, const Rir& rir);
Rir LoadRir(const std::filesystem::path& path);

void WriteSceneReport(const std::filesystem::path& path, const FileHeader& header,
                      std::string_view method, const EvalReport& report);

// Summary layout: one row per method, columns grouped by gain level.
void WriteSummaryTable(const std::filesystem::path& path, const FileHeader& header,
                       std::span<const std::pair<std::string, EvalReport>> methods);

// One row per epoch; rows with overflow halts carry the "overflow" marker.
void WriteLossHistory(const std::filesystem::path& path, const FileHeader& header,
                      const TrainResult& result);

// Per-partition, per-bin weight magnitudes.
void WriteKalmanSnapshot(const std::filesystem::path& path, const FrequencyDomainKalman& filter);

}  // namespace howl

#endif  // HOWL_IO_FILES_HPP_
