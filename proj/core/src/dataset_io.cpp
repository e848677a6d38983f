#include "pulsegrid/dataset_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pulsegrid {

namespace fs = std::filesystem;

namespace {

std::string channel_header() {
  std::string h;
  for (int roi = 1; roi <= 6; ++roi)
    for (const char* col : {"r", "g", "b"})
      h += ",roi" + std::to_string(roi) + "_" + col;
  return h;
}

std::string fmt(real v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    size_t start = 0;
    while (start < field.size() && field[start] == ' ') ++start;
    out.push_back(field.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_real(const std::string& s, real& v) {
  try {
    size_t pos = 0;
    v = std::stod(s, &pos);
    return pos == s.size() && !s.empty();
  } catch (...) {
    return false;
  }
}

}  // namespace

std::string write_dataset(const std::vector<ColorSignalSequence>& sequences,
                          const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create dataset directory " + dir + ": " + ec.message());

  const std::string header = "frame_index" + channel_header() + ",ref_hr_bpm";
  for (const ColorSignalSequence& seq : sequences) {
    const fs::path file = fs::path(dir) / (seq.id + ".csv");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << header << "\n";
    const int T = seq.signals.dim(1);
    for (int t = 0; t < T; ++t) {
      out << t;
      for (int c = 0; c < kChannels; ++c) out << "," << fmt(seq.signals.at(c, t));
      out << "," << fmt(seq.ref_hr[static_cast<size_t>(t)]) << "\n";
    }
    if (!out) throw std::runtime_error("failed writing " + file.string());
  }

  const fs::path manifest = fs::path(dir) / "manifest.csv";
  std::ofstream out(manifest, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + manifest.string());
  out << "id,camera,scenario,fps,file\n";
  for (const ColorSignalSequence& seq : sequences)
    out << seq.id << "," << camera_name(seq.camera) << "," << scenario_name(seq.scenario) << ","
        << seq.fps << "," << seq.id << ".csv\n";
  if (!out) throw std::runtime_error("failed writing " + manifest.string());
  return manifest.string();
}

namespace {

bool read_sequence_csv(const fs::path& file, ColorSignalSequence& seq, std::string& reason) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    reason = "referenced file is missing";
    return false;
  }
  std::string line;
  if (!std::getline(in, line)) {
    reason = "empty file";
    return false;
  }
  const std::string expected = "frame_index" + channel_header() + ",ref_hr_bpm";
  if (split_csv(line) != split_csv(expected)) {
    reason = "missing or unexpected columns (header must be '" + expected + "')";
    return false;
  }
  std::vector<real> values;  // kChannels per frame, column-major later
  std::vector<real> hr;
  int expected_frame = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != static_cast<size_t>(kChannels) + 2) {
      reason = "row " + std::to_string(expected_frame) + " has " + std::to_string(f.size()) +
               " fields, expected " + std::to_string(kChannels + 2);
      return false;
    }
    real frame = 0;
    if (!parse_real(f[0], frame) || frame != static_cast<real>(expected_frame)) {
      reason = "non-contiguous frame_index at row " + std::to_string(expected_frame);
      return false;
    }
    for (int c = 0; c < kChannels; ++c) {
      real v = 0;
      if (!parse_real(f[static_cast<size_t>(c) + 1], v)) {
        reason = "malformed number in frame " + std::to_string(expected_frame);
        return false;
      }
      values.push_back(v);
    }
    real h = 0;
    if (!parse_real(f.back(), h)) {
      reason = "malformed ref_hr_bpm in frame " + std::to_string(expected_frame);
      return false;
    }
    if (h < 40.0 || h > 125.0) {
      reason = "HR out of admissible range [40,125] at frame " + std::to_string(expected_frame);
      return false;
    }
    hr.push_back(h);
    ++expected_frame;
  }
  const int T = expected_frame;
  if (T < kWindowLen) {
    reason = "only " + std::to_string(T) + " frames (need at least 64)";
    return false;
  }
  seq.signals = Tensor({kChannels, T});
  for (int t = 0; t < T; ++t)
    for (int c = 0; c < kChannels; ++c)
      seq.signals.at(c, t) = values[static_cast<size_t>(t) * kChannels + c];
  seq.ref_hr = std::move(hr);
  return true;
}

}  // namespace

IngestResult ingest(const std::string& dir) {
  IngestResult result;
  const fs::path manifest = fs::path(dir) / "manifest.csv";
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw std::runtime_error("no manifest.csv in " + dir);

  std::string line;
  if (!std::getline(in, line) || split_csv(line) != split_csv("id,camera,scenario,fps,file"))
    throw std::runtime_error("manifest " + manifest.string() +
                             " must start with header 'id,camera,scenario,fps,file'");

  std::set<std::string> seen_ids;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 5) {
      result.rejections.push_back({line, "manifest row needs 5 fields"});
      continue;
    }
    ColorSignalSequence seq;
    seq.id = f[0];
    std::string reason;
    if (!seen_ids.insert(seq.id).second) {
      result.rejections.push_back({f[4], "duplicate sequence id " + seq.id});
      continue;
    }
    try {
      seq.camera = parse_camera(f[1]);
      seq.scenario = parse_scenario(f[2]);
    } catch (const std::invalid_argument& e) {
      result.rejections.push_back({f[4], e.what()});
      continue;
    }
    real fps = 0;
    if (!parse_real(f[3], fps) || fps != static_cast<real>(kFps)) {
      result.rejections.push_back({f[4], "unsupported fps '" + f[3] + "' (must be 15)"});
      continue;
    }
    seq.fps = kFps;
    if (!read_sequence_csv(fs::path(dir) / f[4], seq, reason)) {
      result.rejections.push_back({f[4], reason});
      continue;
    }
    result.sequences.push_back(std::move(seq));
  }
  return result;
}

}  // namespace pulsegrid
