#include "pulsegrid/run_manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace pulsegrid {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kFnvOffset = 14695981039346656037ull;
constexpr uint64_t kFnvPrime = 1099511628211ull;

void fnv1a_bytes(uint64_t& h, const char* data, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= kFnvPrime;
  }
}

void fnv1a_file(uint64_t& h, const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string() + " for fingerprinting");
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    fnv1a_bytes(h, buf, static_cast<size_t>(in.gcount()));
}

}  // namespace

uint64_t fingerprint_path(const std::string& path) {
  uint64_t h = kFnvOffset;
  const fs::path root(path);
  if (fs::is_regular_file(root)) {
    fnv1a_file(h, root);
    return h;
  }
  if (!fs::is_directory(root))
    throw std::runtime_error("cannot fingerprint " + path + ": no such file or directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end(), [&root](const fs::path& a, const fs::path& b) {
    return a.lexically_relative(root) < b.lexically_relative(root);
  });
  for (const fs::path& f : files) {
    const std::string rel = f.lexically_relative(root).generic_string();
    fnv1a_bytes(h, rel.data(), rel.size());
    fnv1a_bytes(h, "\0", 1);
    fnv1a_file(h, f);
  }
  return h;
}

std::string fingerprint_string(const std::string& path) {
  if (path.empty()) return "none";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a:%016llx",
                static_cast<unsigned long long>(fingerprint_path(path)));
  return buf;
}

void write_run_manifest(const RunManifest& manifest, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory " + out_dir + ": " + ec.message());
  nlohmann::json j;
  j["command"] = manifest.command;
  j["config"] = manifest.config;
  j["seed"] = manifest.seed;
  j["data_fingerprint"] = manifest.data_fingerprint;
  j["artifacts"] = manifest.artifacts;
  j["tool_version"] = manifest.tool_version;
  const fs::path file = fs::path(out_dir) / "run_manifest.json";
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(1) << "\n";
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

}  // namespace pulsegrid
