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

#include "howl/io/files.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "howl/common.hpp"
#include "howl/io/wav.hpp"

namespace howl {
namespace {

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

void Finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

void WriteHeader(std::ostream& out, const FileHeader& h) {
  out << "# howl-lab " << h.kind << "\n";
  out << "# version=" << kModelFileVersion << "\n";
  if (!h.command.empty()) out << "# command=" << h.command << "\n";
  out << "# seed=" << h.seed << "\n";
  if (!h.config_hash.empty()) out << "# config_hash=" << h.config_hash << "\n";
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == ';') {
      if (!cur.empty()) fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) fields.push_back(cur);
  return fields;
}

bool ParseDouble(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string GainLabel(double g) { return "G=" + FormatNumber(g); }

}  // namespace

std::uint64_t Fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HexDigest(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void SaveModel(const std::filesystem::path& path, const MaskModel& model,
               const FileHeader& header) {
  auto out = OpenOut(path);
  FileHeader h = header;
  h.kind = "mask-model";
  WriteHeader(out, h);
  out << "format,howl-mask-model\n";
  out << "version," << kModelFileVersion << "\n";
  out << "bins," << model.bins() << "\n";
  out << "bin,mic_re,mic_im,ref_re,ref_im\n";
  for (std::size_t k = 0; k < model.bins(); ++k) {
    out << k << ',' << FormatNumber(model.mic_gain()[k].real()) << ','
        << FormatNumber(model.mic_gain()[k].imag()) << ','
        << FormatNumber(model.ref_gain()[k].real()) << ','
        << FormatNumber(model.ref_gain()[k].imag()) << "\n";
  }
  Finish(out, path);
}

MaskModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open model file " + path.string());
  const auto corrupt = [&](const std::string& why) {
    return Error(ErrorKind::kIo, "corrupt model file " + path.string() + ": " + why);
  };
  std::map<std::string, std::string> meta;
  std::vector<std::vector<std::string>> rows;
  bool in_table = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    if (!in_table) {
      if (fields[0] == "bin") {
        in_table = true;
      } else if (fields.size() == 2) {
        meta[fields[0]] = fields[1];
      } else {
        throw corrupt("unexpected line '" + line + "'");
      }
      continue;
    }
    rows.push_back(std::move(fields));
  }
  if (meta["format"] != "howl-mask-model") throw corrupt("missing format tag");
  if (meta["version"] != std::to_string(kModelFileVersion)) {
    throw corrupt("unsupported version '" + meta["version"] + "'");
  }
  double bins_d = 0.0;
  if (!ParseDouble(meta["bins"], bins_d) || bins_d < 1.0 || bins_d != std::floor(bins_d)) {
    throw corrupt("bad bin count");
  }
  const auto bins = static_cast<std::size_t>(bins_d);
  if (!in_table || rows.size() != bins) throw corrupt("expected " + meta["bins"] + " rows");
  std::vector<double> params(4 * bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const auto& r = rows[k];
    double idx = 0.0;
    if (r.size() != 5 || !ParseDouble(r[0], idx) || idx != static_cast<double>(k)) {
      throw corrupt("malformed row " + std::to_string(k));
    }
    for (std::size_t j = 0; j < 4; ++j) {
      double v = 0.0;
      if (!ParseDouble(r[j + 1], v) || !std::isfinite(v)) {
        throw corrupt("bad value in row " + std::to_string(k));
      }
      params[j * bins + k] = v;
    }
  }
  MaskModel model(bins);
  model.SetParameters(params);
  return model;
}

void SaveRirCsv(const std::filesystem::path& path, const Rir& rir) {
  auto out = OpenOut(path);
  out << "# howl-lab rir\n";
  out << "# sample_rate=" << FormatNumber(rir.sample_rate) << "\n";
  out << "# direct_path_delay=" << rir.direct_path_delay << "\n";
  out << "# truncated=" << (rir.truncated ? 1 : 0) << "\n";
  for (double t : rir.taps) out << FormatNumber(t) << "\n";
  Finish(out, path);
}

Rir LoadRirCsv(const std::filesystem::path& path, double sample_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open rir file " + path.string());
  Rir rir;
  rir.sample_rate = sample_rate;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      double v = 0.0;
      if (!ParseDouble(line.substr(eq + 1), v)) continue;
      if (key == "sample_rate") rir.sample_rate = v;
      if (key == "direct_path_delay") rir.direct_path_delay = static_cast<std::size_t>(v);
      if (key == "truncated") rir.truncated = v != 0.0;
      continue;
    }
    for (const auto& f : SplitFields(line)) {
      double v = 0.0;
      if (!ParseDouble(f, v) || !std::isfinite(v)) {
        throw Error(ErrorKind::kIo, path.string() + ":" + std::to_string(line_no) +
                                        ": not a finite number: '" + f + "'");
      }
      rir.taps.push_back(v);
    }
  }
  if (rir.taps.empty()) throw Error(ErrorKind::kIo, path.string() + ": no taps");
  if (!(rir.sample_rate > 0.0)) throw Error(ErrorKind::kIo, path.string() + ": bad sample rate");
  return rir;
}

void SaveRir(const std::filesystem::path& path, const Rir& rir) {
  if (path.extension() == ".wav") {
    WriteWav(path, AudioBuffer(rir.taps, rir.sample_rate), WavEncoding::kFloat32);
  } else {
    SaveRirCsv(path, rir);
  }
}

Rir LoadRir(const std::filesystem::path& path) {
  if (path.extension() == ".wav") {
    AudioBuffer a = ReadWav(path);
    Rir rir;
    rir.taps = std::move(a.samples);
    rir.sample_rate = a.sample_rate;
    std::size_t peak = 0;
    for (std::size_t i = 0; i < rir.taps.size(); ++i) {
      if (std::abs(rir.taps[i]) > std::abs(rir.taps[peak])) peak = i;
    }
    rir.direct_path_delay = peak;
    if (rir.taps.empty()) throw Error(ErrorKind::kIo, path.string() + ": no taps");
    return rir;
  }
  return LoadRirCsv(path);
}

void WriteSceneReport(const std::filesystem::path& path, const FileHeader& header,
                      std::string_view method, const EvalReport& report) {
  auto out = OpenOut(path);
  FileHeader h = header;
  h.kind = "scene-report";
  WriteHeader(out, h);
  out << "method,scene,gain,delay_samples,si_sdr_db,halt,halt_sample,scored_samples\n";
  for (const auto& s : report.scenes) {
    out << method << ',' << s.index << ',' << FormatNumber(s.gain) << ',' << s.delay_samples
        << ',' << FormatNumber(s.si_sdr) << ',' << HaltReasonName(s.halt) << ','
        << (s.halt_sample ? std::to_string(*s.halt_sample) : std::string()) << ','
        << s.scored_samples << "\n";
  }
  const auto& o = report.overall;
  out << "# overall scenes=" << o.scenes << " excluded=" << o.excluded
      << " mean_sdr_db=" << FormatNumber(o.mean_sdr) << " std_sdr_db=" << FormatNumber(o.std_sdr)
      << " howling_rate=" << FormatNumber(o.howling_rate)
      << " overflow_halts=" << o.overflow_halts << "\n";
  Finish(out, path);
}

void WriteSummaryTable(const std::filesystem::path& path, const FileHeader& header,
                       std::span<const std::pair<std::string, EvalReport>> methods) {
  std::set<long long> keys;
  for (const auto& [name, rep] : methods) {
    for (const auto& g : rep.groups) keys.insert(std::llround(g.gain * 1e6));
  }
  auto out = OpenOut(path);
  FileHeader h = header;
  h.kind = "summary";
  WriteHeader(out, h);
  out << "method";
  for (long long k : keys) {
    const std::string g = GainLabel(static_cast<double>(k) * 1e-6);
    out << ',' << g << " sdr_mean," << g << " sdr_std," << g << " howling_rate," << g
        << " excluded";
  }
  out << ",all sdr_mean,all sdr_std,all howling_rate,all excluded\n";
  for (const auto& [name, rep] : methods) {
    out << name;
    for (long long k : keys) {
      const GroupSummary* match = nullptr;
      for (const auto& g : rep.groups) {
        if (std::llround(g.gain * 1e6) == k) match = &g;
      }
      if (match) {
        out << ',' << FormatNumber(match->mean_sdr) << ',' << FormatNumber(match->std_sdr) << ','
            << FormatNumber(match->howling_rate) << ',' << match->excluded;
      } else {
        out << ",,,,";
      }
    }
    const auto& o = rep.overall;
    out << ',' << FormatNumber(o.mean_sdr) << ',' << FormatNumber(o.std_sdr) << ','
        << FormatNumber(o.howling_rate) << ',' << o.excluded << "\n";
  }
  Finish(out, path);
}

void WriteLossHistory(const std::filesystem::path& path, const FileHeader& header,
                      const TrainResult& result) {
  auto out = OpenOut(path);
  FileHeader h = header;
  h.kind = "loss-history";
  WriteHeader(out, h);
  out << "epoch,loss,finite_loss,scenes_used,frames,howling_halts,overflow_halts,grad_norm,"
         "updated,marker\n";
  for (const auto& e : result.history) {
    out << e.epoch << ',' << FormatNumber(e.loss) << ',' << FormatNumber(e.finite_loss) << ','
        << e.scenes_used << ',' << e.frames << ',' << e.howling_halts << ',' << e.overflow_halts
        << ',' << FormatNumber(e.grad_norm) << ',' << (e.updated ? 1 : 0) << ','
        << (e.overflow_halts > 0 ? "overflow" : "") << "\n";
  }
  out << "# " << result.report << "\n";
  Finish(out, path);
}

void WriteKalmanSnapshot(const std::filesystem::path& path,
                         const FrequencyDomainKalman& filter) {
  auto out = OpenOut(path);
  out << "# howl-lab kalman-snapshot\n";
  out << "# steps=" << filter.steps() << " divergence_resets=" << filter.divergence_resets()
      << "\n";
  out << "partition,bin,weight_magnitude,covariance\n";
  const auto& w = filter.weights();
  const auto& p = filter.covariance();
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t k = 0; k < w[i].size(); ++k) {
      out << i << ',' << k << ',' << FormatNumber(std::abs(w[i][k])) << ','
          << FormatNumber(p[i][k]) << "\n";
    }
  }
  Finish(out, path);
}

}  // namespace howl
