#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pulsegrid {

constexpr const char* kToolVersion = "0.1.0";

// Reproducibility record written into every output directory before heavy
// work starts: the effective config, seed, a content hash of the input data,
// artifact paths, and the tool version. No timestamps, so identical inputs
// produce identical manifests.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  uint64_t seed = 0;
  std::string data_fingerprint;  // "fnv1a:<hex>" or "none"
  std::vector<std::string> artifacts;
  std::string tool_version = kToolVersion;
};

// FNV-1a (64-bit) over the bytes of every regular file under `path` (a file
// or directory; directory contents are hashed in sorted relative-path order,
// with each path mixed in before its bytes).
uint64_t fingerprint_path(const std::string& path);
std::string fingerprint_string(const std::string& path);  // "fnv1a:<16 hex>" | "none"

void write_run_manifest(const RunManifest& manifest, const std::string& out_dir);

}  // namespace pulsegrid
