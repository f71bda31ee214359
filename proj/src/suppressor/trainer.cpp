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

#include "howl/suppressor/trainer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "howl/common.hpp"
#include "howl/parallel.hpp"
#include "howl/suppressor/loss.hpp"
#include "howl/suppressor/suppressor.hpp"

namespace howl {

std::string_view InitKindName(InitKind kind) {
  switch (kind) {
    case InitKind::kIdentity: return "identity";
    case InitKind::kZeros: return "zeros";
    case InitKind::kReference: return "reference";
  }
  return "unknown";
}

std::optional<InitKind> ParseInitKind(std::string_view name) {
  for (auto k : {InitKind::kIdentity, InitKind::kZeros, InitKind::kReference}) {
    if (InitKindName(k) == name) return k;
  }
  return std::nullopt;
}

MaskModel InitialModel(InitKind kind, std::size_t bins) {
  switch (kind) {
    case InitKind::kIdentity:
      return MaskModel::Identity(bins);
    case InitKind::kZeros:
      return MaskModel::Zeros(bins);
    case InitKind::kReference: {
      MaskModel m = MaskModel::Zeros(bins);
      for (auto& g : m.ref_gain()) g = Complex(1.0, 0.0);
      return m;
    }
  }
  throw Error(ErrorKind::kConfig, "unknown init kind");
}

std::string_view OptimizerKindName(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kSgd: return "sgd";
    case OptimizerKind::kAdam: return "adam";
  }
  return "unknown";
}

std::optional<OptimizerKind> ParseOptimizerKind(std::string_view name) {
  for (auto k : {OptimizerKind::kSgd, OptimizerKind::kAdam}) {
    if (OptimizerKindName(k) == name) return k;
  }
  return std::nullopt;
}

void TrainConfig::Validate() const {
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    throw Error(ErrorKind::kConfig, "step size must be finite and >= 0");
  }
  if (!(grad_clip >= 0.0)) throw Error(ErrorKind::kConfig, "gradient clip must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0) ||
      !(adam_epsilon > 0.0)) {
    throw Error(ErrorKind::kConfig, "Adam moments need beta in [0, 1) and epsilon > 0");
  }
  if (loop.mode == LoopMode::kNoAhs) {
    throw Error(ErrorKind::kConfig, "no-ahs mode bypasses the model; nothing to train");
  }
  loop.framing.Validate();
  loop.detector.Validate();
}

LoopConfig SceneLoopConfig(const LoopConfig& base, const Scene& scene) {
  LoopConfig cfg = base;
  cfg.gain = scene.gain;
  cfg.delay_seconds = scene.delay_seconds;
  cfg.sample_rate = scene.target.sample_rate;
  return cfg;
}

namespace {

struct SceneOutcome {
  HaltReason halt = HaltReason::kNone;
  std::size_t frames = 0;
  double loss = 0.0;
  std::vector<double> grad;
};

SceneOutcome RunScene(const MaskModel& model, const Scene& scene, const TrainConfig& cfg) {
  LoopConfig loop = SceneLoopConfig(cfg.loop, scene);
  loop.record_frames = true;
  const SessionResult result =
      RunClosedLoop(scene.target, scene.rirs.loudspeaker, loop, Suppressor::Trained(model));
  SceneOutcome out;
  out.halt = result.halt;
  out.frames = result.frames.size();
  if (out.frames == 0) return out;
  std::vector<FrozenFrame> frozen;
  frozen.reserve(result.frames.size());
  for (const auto& t : result.frames) {
    frozen.push_back({t.mic.bins, t.reference.bins, t.target.bins});
  }
  MaskGradient g = GradMaeFrozen(model, frozen);
  out.loss = g.loss;
  out.grad = std::move(g.values);
  return out;
}

}  // namespace

TrainResult TrainRecursive(const MaskModel& initial, std::span<const Scene> scenes,
                           const TrainConfig& cfg) {
  cfg.Validate();
  if (scenes.empty()) throw Error(ErrorKind::kEmptyInput, "training set is empty");
  if (initial.bins() != cfg.loop.framing.bins()) {
    throw Error(ErrorKind::kShape, "model bin count does not match the framing");
  }
  if (!initial.AllFinite()) throw Error(ErrorKind::kConfig, "initial model is not finite");

  TrainResult result;
  result.initial = initial;
  result.model = initial;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> moment1(initial.ParameterCount(), 0.0);
  std::vector<double> moment2(initial.ParameterCount(), 0.0);
  std::size_t adam_steps = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<SceneOutcome> outcomes(scenes.size());
    const MaskModel& model = result.model;
    ParallelFor(scenes.size(), cfg.jobs,
                [&](std::size_t i) { outcomes[i] = RunScene(model, scenes[i], cfg); });

    EpochRecord rec;
    rec.epoch = epoch;
    std::vector<double> grad(model.ParameterCount(), 0.0);
    double loss_sum = 0.0;
    for (const auto& o : outcomes) {
      if (o.halt == HaltReason::kHowling) ++rec.howling_halts;
      if (o.halt == HaltReason::kOverflow) ++rec.overflow_halts;
      if (o.frames == 0) continue;
      ++rec.scenes_used;
      rec.frames += o.frames;
      loss_sum += o.loss;
      for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += o.grad[j];
    }
    result.total_howling_halts += rec.howling_halts;
    result.total_overflow_halts += rec.overflow_halts;
    if (rec.scenes_used == 0) {
      throw Error(ErrorKind::kTraining, "epoch " + std::to_string(epoch) +
                                            ": every scene halted before its first frame");
    }
    const double inv = 1.0 / static_cast<double>(rec.scenes_used);
    rec.finite_loss = loss_sum * inv;
    rec.loss = rec.overflow_halts > 0 ? nan : rec.finite_loss;

    double norm2 = 0.0;
    for (double& v : grad) {
      v *= inv;
      norm2 += v * v;
    }
    rec.grad_norm = std::sqrt(norm2);
    const bool usable = std::isfinite(rec.loss) && std::isfinite(rec.grad_norm);
    if (usable && cfg.step_size > 0.0 && rec.grad_norm > 0.0) {
      double scale = cfg.step_size;
      if (cfg.grad_clip > 0.0 && rec.grad_norm > cfg.grad_clip) {
        scale *= cfg.grad_clip / rec.grad_norm;
      }
      std::vector<double> params = model.Parameters();
      if (cfg.optimizer == OptimizerKind::kSgd) {
        for (std::size_t j = 0; j < params.size(); ++j) params[j] -= scale * grad[j];
      } else {
        const double clip = scale / cfg.step_size;
        ++adam_steps;
        const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam_steps));
        const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam_steps));
        for (std::size_t j = 0; j < params.size(); ++j) {
          const double g = clip * grad[j];
          moment1[j] = cfg.adam_beta1 * moment1[j] + (1.0 - cfg.adam_beta1) * g;
          moment2[j] = cfg.adam_beta2 * moment2[j] + (1.0 - cfg.adam_beta2) * g * g;
          params[j] -= cfg.step_size * (moment1[j] / c1) /
                       (std::sqrt(moment2[j] / c2) + cfg.adam_epsilon);
        }
      }
      MaskModel next(model.bins());
      next.SetParameters(params);
      if (next.AllFinite()) {
        result.model = std::move(next);
        rec.updated = true;
      }
    }
    result.history.push_back(rec);
  }

  std::ostringstream report;
  if (result.history.empty()) {
    result.converged = true;
    report << "no epochs run; model unchanged";
  } else {
    const double first = result.history.front().loss;
    const double last = result.history.back().loss;
    result.converged = std::isfinite(first) && std::isfinite(last) && last <= first;
    report << (result.converged ? "converged" : "did not converge") << ": first-epoch loss "
           << first << ", final-epoch loss " << last << ", overflow halts "
           << result.total_overflow_halts << ", howling halts " << result.total_howling_halts;
  }
  result.report = report.str();
  return result;
}

}  // namespace howl
