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

#include "howl/metrics/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "howl/common.hpp"
#include "howl/metrics/sdr.hpp"

namespace howl {

SceneScore ScoreScene(const SessionResult& result, const AudioBuffer& reference,
                      std::size_t index) {
  SceneScore score;
  score.index = index;
  score.gain = result.gain;
  score.delay_samples = result.delay_samples;
  score.halt = result.halt;
  score.halt_sample = result.halt_sample;
  const std::size_t n = result.estimate.size();
  if (n > reference.size() || (!result.halted() && n != reference.size())) {
    throw Error(ErrorKind::kShape, "scene " + std::to_string(index) + ": estimate has " +
                                       std::to_string(n) + " samples, reference " +
                                       std::to_string(reference.size()));
  }
  score.scored_samples = n;
  score.si_sdr = std::numeric_limits<double>::quiet_NaN();
  const auto ref = reference.view().first(n);
  if (n > 0 && Energy(ref) > 0.0) score.si_sdr = SiSdr(result.estimate.view(), ref);
  return score;
}

namespace {

GroupSummary SummarizeGroup(double key, std::span<const SceneScore* const> members) {
  GroupSummary g;
  g.gain = key;
  g.scenes = members.size();
  std::vector<double> values;
  std::size_t halted = 0;
  for (const SceneScore* s : members) {
    if (std::isfinite(s->si_sdr)) {
      values.push_back(s->si_sdr);
    } else {
      ++g.excluded;
    }
    if (s->halted()) ++halted;
    if (s->halt == HaltReason::kOverflow) ++g.overflow_halts;
  }
  // Sorted accumulation keeps the result independent of scene order.
  std::sort(values.begin(), values.end());
  if (!values.empty()) {
    double sum = 0.0;
    for (double v : values) sum += v;
    g.mean_sdr = sum / values.size();
    double sq = 0.0;
    for (double v : values) sq += (v - g.mean_sdr) * (v - g.mean_sdr);
    g.std_sdr = std::sqrt(sq / values.size());
  } else {
    g.mean_sdr = g.std_sdr = std::numeric_limits<double>::quiet_NaN();
  }
  g.howling_rate = g.scenes ? static_cast<double>(halted) / g.scenes : 0.0;
  return g;
}

}  // namespace

EvalReport Summarize(std::vector<SceneScore> scores) {
  std::sort(scores.begin(), scores.end(), [](const SceneScore& a, const SceneScore& b) {
    return a.index < b.index;
  });
  EvalReport report;
  report.scenes = std::move(scores);
  std::map<long long, std::vector<const SceneScore*>> groups;
  std::vector<const SceneScore*> all;
  for (const auto& s : report.scenes) {
    groups[std::llround(s.gain * 1e6)].push_back(&s);
    all.push_back(&s);
  }
  for (const auto& [key, members] : groups) {
    report.groups.push_back(SummarizeGroup(static_cast<double>(key) * 1e-6, members));
  }
  report.overall = SummarizeGroup(std::numeric_limits<double>::quiet_NaN(), all);
  return report;
}

EvalReport Evaluate(std::span<const SessionResult> results,
                    std::span<const AudioBuffer> references) {
  if (results.size() != references.size()) {
    throw Error(ErrorKind::kShape, "results and references differ in scene count");
  }
  if (results.empty()) throw Error(ErrorKind::kEmptyInput, "no scenes to evaluate");
  std::vector<SceneScore> scores;
  for (std::size_t i = 0; i < results.size(); ++i) {
    scores.push_back(ScoreScene(results[i], references[i], i));
  }
  return Summarize(std::move(scores));
}

}  // namespace howl
