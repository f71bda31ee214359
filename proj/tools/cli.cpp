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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "howl/common.hpp"
#include "howl/io/files.hpp"
#include "howl/io/wav.hpp"
#include "howl/loop/session.hpp"
#include "howl/metrics/evaluate.hpp"
#include "howl/parallel.hpp"
#include "howl/rir/image_method.hpp"
#include "howl/scene/scene.hpp"
#include "howl/suppressor/suppressor.hpp"
#include "howl/suppressor/trainer.hpp"

namespace howl::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every flag as given (or defaulted). Parsing into typed values happens in
// the Resolve* helpers so that bad values map onto the usage exit code.
struct Options {
  std::string mode = "hybrid";
  std::string suppressor;
  std::string gain;
  std::string gain_range = "1,3";
  std::string gains;
  std::string delay_range = "0.15,0.25";
  std::string rt60_range = "0,0.6";
  long long scenes = 5;
  std::uint64_t seed = 1;
  std::string hd = "on";
  long long epochs = 10;
  double step_size = 1e-2;
  std::string optimizer = "sgd";
  std::string init = "identity";
  std::string model_in;
  long long jobs = 1;
  std::string out;
  double duration = 3.0;
  std::string speech_dir;
  std::string playback_rir;
  std::string zero_coupling = "off";
  double mask_cap = std::numeric_limits<double>::infinity();
  std::string write_audio = "on";
  // rir-gen
  std::string room = "6,5,3";
  std::string source = "1,1,1.5";
  std::string mic = "2,2,1.5";
  double rt60 = 0.3;
  long long rir_length = 0;
  double highpass = 0.0;
};

std::vector<double> ParseList(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cur, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cur.size() || !std::isfinite(v)) {
      throw UsageError("--" + flag + ": '" + cur + "' is not a finite number");
    }
    values.push_back(v);
    cur.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ':' || c == ' ') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return values;
}

Range ParseRange(const std::string& text, const std::string& flag) {
  const auto v = ParseList(text, flag);
  if (v.size() == 1) return Range::Fixed(v[0]);
  if (v.size() != 2 || v[0] > v[1]) {
    throw UsageError("--" + flag + " expects 'lo,hi' with lo <= hi, got '" + text + "'");
  }
  return {v[0], v[1]};
}

Vec3 ParseVec3(const std::string& text, const std::string& flag) {
  const auto v = ParseList(text, flag);
  if (v.size() != 3) throw UsageError("--" + flag + " expects 'x,y,z'");
  return {v[0], v[1], v[2]};
}

bool ParseSwitch(const std::string& text, const std::string& flag) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw UsageError("--" + flag + " expects on or off, got '" + text + "'");
}

std::vector<std::string> SplitNames(const std::string& text) {
  std::vector<std::string> names;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (!cur.empty()) names.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  return names;
}

LoopMode ResolveMode(const std::string& name) {
  const auto mode = ParseLoopMode(name);
  if (!mode) throw UsageError("--mode: unknown mode '" + name + "'");
  return *mode;
}

std::size_t ResolveCount(long long v, const std::string& flag, long long min) {
  if (v < min) throw UsageError("--" + flag + " must be >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

// Flat JSON config turned into flag tokens that precede the command-line
// flags; with take-last semantics the command line wins.
std::vector<std::string> ConfigTokens(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file must hold a flat JSON object");
  std::vector<std::string> tokens;
  for (const auto& [key, value] : doc.items()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "config") throw UsageError("config files cannot nest");
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "on" : "off";
    } else if (value.is_number()) {
      text = value.dump();
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (!item.is_number() && !item.is_string()) {
          throw UsageError("config key '" + key + "': arrays may hold numbers or strings");
        }
        if (!text.empty()) text += ",";
        text += item.is_string() ? item.get<std::string>() : item.dump();
      }
    } else {
      throw UsageError("config key '" + key + "' must be a string, number, bool or array");
    }
    tokens.push_back("--" + flag);
    tokens.push_back(text);
  }
  return tokens;
}

SceneSpec ResolveSceneSpec(const Options& o) {
  SceneSpec spec;
  spec.gain = o.gain.empty() ? ParseRange(o.gain_range, "gain-range") : ParseRange(o.gain, "gain");
  spec.delay = ParseRange(o.delay_range, "delay-range");
  spec.rt60 = ParseRange(o.rt60_range, "rt60-range");
  if (!(o.duration > 0.0) || !std::isfinite(o.duration)) {
    throw UsageError("--duration must be positive");
  }
  spec.duration = o.duration;
  spec.zero_coupling = ParseSwitch(o.zero_coupling, "zero-coupling");
  try {
    spec.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (spec.delay.lo * spec.sample_rate < 128.0) {
    throw UsageError("--delay-range: delays below one frame (8 ms) are not supported");
  }
  if (!o.speech_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(o.speech_dir)) {
      if (entry.path().extension() == ".wav") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error(ErrorKind::kIo, "no .wav files in " + o.speech_dir);
    for (const auto& f : files) {
      AudioBuffer a = ReadWav(f);
      if (a.sample_rate != spec.sample_rate) {
        throw Error(ErrorKind::kIo, f.string() + ": expected a 16 kHz file");
      }
      spec.speech_pool.push_back(std::move(a));
    }
  }
  if (!o.playback_rir.empty()) spec.playback_override = LoadRir(o.playback_rir);
  return spec;
}

json OptionsJson(const Options& o, const std::string& command) {
  // Everything that changes results; output location and thread count do not.
  return json{{"command", command},        {"mode", o.mode},
              {"suppressor", o.suppressor}, {"gain", o.gain},
              {"gain_range", o.gain_range}, {"gains", o.gains},
              {"delay_range", o.delay_range}, {"rt60_range", o.rt60_range},
              {"scenes", o.scenes},         {"seed", o.seed},
              {"hd", o.hd},                 {"epochs", o.epochs},
              {"step_size", o.step_size},   {"optimizer", o.optimizer},
              {"init", o.init},             {"model_in", o.model_in},
              {"duration", o.duration},     {"speech_dir", o.speech_dir},
              {"playback_rir", o.playback_rir}, {"zero_coupling", o.zero_coupling},
              {"mask_cap", FormatNumber(o.mask_cap)}, {"version", kVersion}};
}

FileHeader MakeHeader(const Options& o, const std::string& command) {
  FileHeader h;
  h.command = command;
  h.seed = o.seed;
  h.config_hash = HexDigest(Fnv1a64(OptionsJson(o, command).dump()));
  return h;
}

fs::path OutDir(const Options& o, const std::string& fallback) {
  fs::path dir = o.out.empty() ? fs::path(fallback) : fs::path(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

struct Method {
  std::string name;
  SuppressorKind kind;
  LoopMode mode;
};

Suppressor MakeSuppressor(const Method& m, const Options& o) {
  switch (m.kind) {
    case SuppressorKind::kPassthrough: return Suppressor::Passthrough();
    case SuppressorKind::kKalmanOnly: return Suppressor::KalmanOnly();
    case SuppressorKind::kOracleMask: return Suppressor::Oracle(o.mask_cap);
    case SuppressorKind::kTrainedMask: {
      if (!o.model_in.empty()) return Suppressor::Trained(LoadModel(o.model_in));
      const auto init = ParseInitKind(o.init);
      return Suppressor::Trained(InitialModel(*init, FrameConfig().bins()));
    }
  }
  throw UsageError("unknown suppressor");
}

void CheckPairing(const Method& m) {
  if (m.mode == LoopMode::kNoAhs && m.kind != SuppressorKind::kPassthrough) {
    throw UsageError("no-ahs mode bypasses suppression; use --suppressor passthrough");
  }
  if (m.kind == SuppressorKind::kKalmanOnly && m.mode != LoopMode::kHybrid) {
    throw UsageError("kalman-only needs --mode hybrid (its reference is the Kalman error)");
  }
}

SuppressorKind ResolveKind(const std::string& name) {
  const auto kind = ParseSuppressorKind(name);
  if (!kind) throw UsageError("--suppressor: unknown suppressor '" + name + "'");
  return *kind;
}

void CheckModelOptions(const Options& o) {
  if (!ParseInitKind(o.init)) throw UsageError("--init: unknown init '" + o.init + "'");
  if (!(o.mask_cap > 0.0)) throw UsageError("--mask-cap must be positive");
}

LoopConfig BaseLoop(const Options& o, LoopMode mode) {
  LoopConfig cfg;
  cfg.mode = mode;
  cfg.detector.enabled = ParseSwitch(o.hd, "hd");
  return cfg;
}

std::vector<Scene> MakeScenes(const SceneSpec& spec, std::uint64_t seed, std::size_t count,
                              std::size_t jobs) {
  std::vector<Scene> scenes(count);
  ParallelFor(count, jobs, [&](std::size_t i) { scenes[i] = BuildScene(spec, seed, i); });
  return scenes;
}

std::string SceneDirName(std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "scene_%03zu", index);
  return name;
}

struct MethodRun {
  std::vector<SessionResult> results;
  std::vector<AudioBuffer> references;
  EvalReport report;
};

// |snapshot_dir|, when set, receives scene_NNN/kalman.csv for hybrid runs.
MethodRun RunMethod(const std::vector<Scene>& scenes, const Method& m, const Options& o,
                    std::optional<double> gain, std::size_t jobs,
                    const fs::path* snapshot_dir = nullptr) {
  const Suppressor sup = MakeSuppressor(m, o);
  const LoopConfig base = BaseLoop(o, m.mode);
  MethodRun run;
  run.results.resize(scenes.size());
  ParallelFor(scenes.size(), jobs, [&](std::size_t i) {
    LoopConfig cfg = SceneLoopConfig(base, scenes[i]);
    if (gain) cfg.gain = *gain;
    auto inspect = [&](const LoopSession& session) {
      if (snapshot_dir == nullptr || session.kalman() == nullptr) return;
      const fs::path dir = *snapshot_dir / SceneDirName(scenes[i].index);
      fs::create_directories(dir);
      WriteKalmanSnapshot(dir / "kalman.csv", *session.kalman());
    };
    run.results[i] =
        RunClosedLoop(scenes[i].target, scenes[i].rirs.loudspeaker, cfg, sup, inspect);
  });
  std::vector<SceneScore> scores;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    run.references.push_back(scenes[i].target);
    scores.push_back(ScoreScene(run.results[i], scenes[i].target, scenes[i].index));
  }
  run.report = Summarize(std::move(scores));
  return run;
}

void WriteJson(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

std::string SummaryLine(const std::string& name, const GroupSummary& g) {
  std::ostringstream s;
  s << name << ": scenes=" << g.scenes << " excluded=" << g.excluded
    << " sdr_db=" << FormatNumber(std::round(g.mean_sdr * 100.0) / 100.0) << " +- "
    << FormatNumber(std::round(g.std_sdr * 100.0) / 100.0)
    << " howling_rate=" << FormatNumber(g.howling_rate)
    << " overflow_halts=" << g.overflow_halts;
  return s.str();
}

int CmdSimulate(const Options& o, std::ostream& out) {
  const SceneSpec spec = ResolveSceneSpec(o);
  const std::size_t count = ResolveCount(o.scenes, "scenes", 1);
  const std::size_t jobs = ResolveCount(o.jobs, "jobs", 1);
  CheckModelOptions(o);
  Method m;
  m.mode = ResolveMode(o.mode);
  if (o.suppressor.empty()) {
    m.kind = m.mode == LoopMode::kNoAhs  ? SuppressorKind::kPassthrough
             : m.mode == LoopMode::kHybrid ? SuppressorKind::kKalmanOnly
                                           : SuppressorKind::kTrainedMask;
  } else {
    const auto names = SplitNames(o.suppressor);
    if (names.size() != 1) throw UsageError("simulate takes a single --suppressor");
    m.kind = ResolveKind(names[0]);
  }
  m.name = std::string(SuppressorKindName(m.kind));
  CheckPairing(m);
  const bool audio = ParseSwitch(o.write_audio, "write-audio");
  const FileHeader header = MakeHeader(o, "simulate");
  const fs::path dir = OutDir(o, "howl_simulate");

  const auto scenes = MakeScenes(spec, o.seed, count, jobs);
  const MethodRun run = RunMethod(scenes, m, o, std::nullopt, jobs, &dir);

  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const Scene& s = scenes[i];
    const SessionResult& r = run.results[i];
    const fs::path sdir = dir / SceneDirName(s.index);
    fs::create_directories(sdir);
    if (audio) {
      WriteWav(sdir / "estimate.wav", r.estimate);
      WriteWav(sdir / "mic.wav", r.mic);
      WriteWav(sdir / "loudspeaker.wav", r.loudspeaker);
      WriteWav(sdir / "target.wav", s.target);
    }
    WriteJson(sdir / "meta.json",
              json{{"format", "howl-lab session"},
                   {"version", kVersion},
                   {"scene", s.index},
                   {"seed", o.seed},
                   {"scene_seed", s.seed},
                   {"config_hash", header.config_hash},
                   {"gain", r.gain},
                   {"delay_seconds", s.delay_seconds},
                   {"delay_samples", r.delay_samples},
                   {"rt60", s.rt60},
                   {"mode", LoopModeName(r.mode)},
                   {"suppressor", m.name},
                   {"sample_rate", s.target.sample_rate},
                   {"halt", HaltReasonName(r.halt)},
                   {"halt_sample", r.halt_sample ? json(*r.halt_sample) : json(nullptr)},
                   {"frames_emitted", r.frames_emitted},
                   {"target_length", r.target_length},
                   {"si_sdr_db", FormatNumber(run.report.scenes[i].si_sdr)}});
  }
  WriteSceneReport(dir / "report.csv", header, m.name, run.report);
  const std::vector<std::pair<std::string, EvalReport>> table = {{m.name, run.report}};
  WriteSummaryTable(dir / "summary.csv", header, table);
  out << "mode=" << LoopModeName(m.mode) << " " << SummaryLine(m.name, run.report.overall) << "\n";
  out << "wrote " << (dir / "report.csv").string() << "\n";
  return kExitOk;
}

int CmdTrain(const Options& o, std::ostream& out) {
  const SceneSpec spec = ResolveSceneSpec(o);
  const std::size_t count = ResolveCount(o.scenes, "scenes", 1);
  const std::size_t jobs = ResolveCount(o.jobs, "jobs", 1);
  CheckModelOptions(o);
  TrainConfig tc;
  tc.epochs = ResolveCount(o.epochs, "epochs", 0);
  tc.step_size = o.step_size;
  if (!(o.step_size >= 0.0) || !std::isfinite(o.step_size)) {
    throw UsageError("--step-size must be finite and >= 0");
  }
  const auto opt = ParseOptimizerKind(o.optimizer);
  if (!opt) throw UsageError("--optimizer: unknown optimizer '" + o.optimizer + "'");
  tc.optimizer = *opt;
  tc.loop = BaseLoop(o, ResolveMode(o.mode));
  if (tc.loop.mode == LoopMode::kNoAhs) throw UsageError("train needs a mode with a model");
  tc.jobs = jobs;
  const MaskModel initial = o.model_in.empty()
                                ? InitialModel(*ParseInitKind(o.init), tc.loop.framing.bins())
                                : LoadModel(o.model_in);
  const FileHeader header = MakeHeader(o, "train");
  const fs::path dir = OutDir(o, "howl_train");

  const auto scenes = MakeScenes(spec, o.seed, count, jobs);
  const TrainResult result = TrainRecursive(initial, scenes, tc);
  SaveModel(dir / "model.csv", result.model, header);
  WriteLossHistory(dir / "loss_history.csv", header, result);
  for (const auto& e : result.history) {
    out << "epoch " << e.epoch << " loss=" << FormatNumber(e.loss)
        << " howling_halts=" << e.howling_halts << " overflow_halts=" << e.overflow_halts
        << (e.overflow_halts > 0 ? " [overflow]" : "") << "\n";
  }
  out << result.report << "\n";
  out << "wrote " << (dir / "model.csv").string() << "\n";
  return kExitOk;
}

int CmdEval(const Options& o, std::ostream& out) {
  const SceneSpec spec = ResolveSceneSpec(o);
  if (o.scenes < 1) throw UsageError("--scenes: empty scene set");
  const std::size_t count = static_cast<std::size_t>(o.scenes);
  const std::size_t jobs = ResolveCount(o.jobs, "jobs", 1);
  CheckModelOptions(o);
  const auto names = SplitNames(o.suppressor.empty() ? "passthrough,kalman-only,oracle"
                                                     : o.suppressor);
  const LoopMode model_mode = ResolveMode(o.mode);
  std::vector<Method> methods;
  for (const auto& n : names) {
    Method m;
    m.name = n;
    m.kind = ResolveKind(n);
    switch (m.kind) {
      case SuppressorKind::kPassthrough: m.mode = LoopMode::kNoAhs; break;
      case SuppressorKind::kKalmanOnly: m.mode = LoopMode::kHybrid; break;
      case SuppressorKind::kOracleMask: m.mode = LoopMode::kNnOnly; break;
      case SuppressorKind::kTrainedMask: m.mode = model_mode; break;
    }
    CheckPairing(m);
    methods.push_back(m);
  }
  std::vector<std::optional<double>> levels;
  if (o.gains.empty()) {
    levels.push_back(std::nullopt);
  } else {
    for (double g : ParseList(o.gains, "gains")) {
      if (g < 0.0 || g > 10.0) throw UsageError("--gains must lie in [0, 10]");
      levels.push_back(g);
    }
    if (levels.empty()) throw UsageError("--gains is empty");
  }
  const FileHeader header = MakeHeader(o, "eval");
  const fs::path dir = OutDir(o, "howl_eval");

  // Load the model up front so a corrupt file fails before any simulation.
  for (const auto& m : methods) MakeSuppressor(m, o);
  const auto scenes = MakeScenes(spec, o.seed, count, jobs);
  std::vector<std::pair<std::string, EvalReport>> table;
  for (const auto& m : methods) {
    std::vector<SceneScore> scores;
    for (const auto& level : levels) {
      const MethodRun run = RunMethod(scenes, m, o, level, jobs);
      for (auto s : run.report.scenes) {
        // Keep scene ids unique across gain levels.
        s.index += scores.size() / std::max<std::size_t>(count, 1) * count;
        scores.push_back(s);
      }
    }
    EvalReport report = Summarize(std::move(scores));
    WriteSceneReport(dir / ("report_" + m.name + ".csv"), header, m.name, report);
    for (const auto& g : report.groups) {
      out << SummaryLine(m.name + " G=" + FormatNumber(g.gain), g) << "\n";
    }
    table.emplace_back(m.name, std::move(report));
  }
  WriteSummaryTable(dir / "summary.csv", header, table);
  out << "wrote " << (dir / "summary.csv").string() << "\n";
  return kExitOk;
}

int CmdRirGen(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw UsageError("rir-gen needs --out <file.csv|file.wav>");
  RoomSpec room;
  room.dimensions = ParseVec3(o.room, "room");
  room.source = ParseVec3(o.source, "source");
  room.mic = ParseVec3(o.mic, "mic");
  room.rt60 = o.rt60;
  room.rir_length = ResolveCount(o.rir_length, "rir-length", 0);
  room.highpass_hz = o.highpass;
  try {
    room.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const Rir rir = GenerateRir(room, o.seed);
  const fs::path path(o.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  SaveRir(path, rir);
  out << "taps=" << rir.taps.size() << " direct_path_delay=" << rir.direct_path_delay
      << " truncated=" << (rir.truncated ? "yes" : "no");
  if (room.OutsideSceneRange()) out << " rt60_outside_0_0.6=yes";
  if (rir.Energy() > 0.0) {
    out << " schroeder_rt60=" << FormatNumber(std::round(SchroederDecay(rir).rt60 * 1e4) / 1e4);
  }
  out << "\nwrote " << path.string() << "\n";
  return kExitOk;
}

void AddSceneOptions(CLI::App* app, Options& o) {
  app->add_option("--gain", o.gain, "Fixed amplifier gain G (overrides --gain-range)");
  app->add_option("--gain-range", o.gain_range, "G sampling range lo,hi")->capture_default_str();
  app->add_option("--delay-range", o.delay_range, "Loop delay range in seconds lo,hi")
      ->capture_default_str();
  app->add_option("--rt60-range", o.rt60_range, "RT60 range in seconds lo,hi")
      ->capture_default_str();
  app->add_option("--scenes", o.scenes, "Number of scenes")->capture_default_str();
  app->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app->add_option("--duration", o.duration, "Seconds of target speech per scene")
      ->capture_default_str();
  app->add_option("--speech-dir", o.speech_dir, "Directory of 16 kHz WAV utterances");
  app->add_option("--playback-rir", o.playback_rir, "Loudspeaker path file (.csv or .wav)");
  app->add_option("--zero-coupling", o.zero_coupling, "on: all-zero loudspeaker path")
      ->capture_default_str();
  app->add_option("--hd", o.hd, "Howling detection on|off")->capture_default_str();
  app->add_option("--jobs", o.jobs, "Parallel scene workers")->capture_default_str();
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--mode", o.mode, "no-ahs | nn-only | hybrid | teacher-forced")
      ->capture_default_str();
  app->add_option("--model-in", o.model_in, "Mask model file for the trained suppressor");
  app->add_option("--init", o.init, "identity | zeros | reference (when no --model-in)")
      ->capture_default_str();
  app->add_option("--mask-cap", o.mask_cap, "Oracle mask magnitude cap");
}

}  // namespace

int RunCli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app("Closed-loop acoustic howling simulation and suppression lab", "howl");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* simulate = app.add_subcommand("simulate", "Run scenes through the closed loop");
  AddSceneOptions(simulate, o);
  simulate->add_option("--suppressor", o.suppressor,
                       "passthrough | kalman-only | oracle | trained");
  simulate->add_option("--write-audio", o.write_audio, "Write WAV files on|off")
      ->capture_default_str();

  auto* train = app.add_subcommand("train", "Recursively train the mask model");
  AddSceneOptions(train, o);
  train->add_option("--epochs", o.epochs, "Training epochs")->capture_default_str();
  train->add_option("--step-size", o.step_size, "Optimizer step size")->capture_default_str();
  train->add_option("--optimizer", o.optimizer, "sgd | adam")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Evaluate suppressors per gain level");
  AddSceneOptions(eval, o);
  eval->add_option("--suppressor", o.suppressor, "Comma-separated suppressor list");
  eval->add_option("--gains", o.gains, "Comma-separated G levels applied to every scene");

  auto* rir = app.add_subcommand("rir-gen", "Generate one image-method RIR");
  rir->add_option("--room", o.room, "Room size x,y,z in meters")->capture_default_str();
  rir->add_option("--source", o.source, "Source position x,y,z")->capture_default_str();
  rir->add_option("--mic", o.mic, "Microphone position x,y,z")->capture_default_str();
  rir->add_option("--rt60", o.rt60, "Reverberation time in seconds")->capture_default_str();
  rir->add_option("--rir-length", o.rir_length, "Taps (0: 0.5 s)")->capture_default_str();
  rir->add_option("--highpass", o.highpass, "High-pass corner in Hz (0: off)")
      ->capture_default_str();
  rir->add_option("--seed", o.seed, "Seed")->capture_default_str();
  rir->add_option("--out", o.out, "Output file (.csv or .wav)");

  for (auto* sub : {simulate, train, eval, rir}) {
    sub->add_option("--config", "Flat JSON file of flag values; the command line wins");
  }

  try {
    // Splice config-file values in front of the user's flags.
    std::vector<std::string> args;
    std::vector<std::string> config_tokens;
    for (std::size_t i = 0; i < raw_args.size(); ++i) {
      const std::string& a = raw_args[i];
      if (a == "--config") {
        if (i + 1 >= raw_args.size()) throw UsageError("--config needs a file");
        config_tokens = ConfigTokens(raw_args[++i]);
      } else if (a.rfind("--config=", 0) == 0) {
        config_tokens = ConfigTokens(a.substr(9));
      } else {
        args.push_back(a);
      }
    }
    if (!config_tokens.empty()) {
      if (args.empty() || args[0].rfind("-", 0) == 0) {
        throw UsageError("--config must follow a subcommand");
      }
      args.insert(args.begin() + 1, config_tokens.begin(), config_tokens.end());
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "howl: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "howl: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return CmdSimulate(o, out);
    if (train->parsed()) return CmdTrain(o, out);
    if (eval->parsed()) return CmdEval(o, out);
    if (rir->parsed()) return CmdRirGen(o, out);
  } catch (const UsageError& e) {
    err << "howl: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "howl: " << ErrorKindName(e.kind()) << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "howl: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace howl::cli
