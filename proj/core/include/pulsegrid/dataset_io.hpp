#pragma once

#include <string>
#include <vector>

#include "pulsegrid/data.hpp"

namespace pulsegrid {

// Canonical on-disk dataset layout: one CSV per sequence with header
//   frame_index,roi1_r,roi1_g,roi1_b,...,roi6_r,roi6_g,roi6_b,ref_hr_bpm
// and one row per frame (frame_index contiguous from 0), plus manifest.csv
// with header id,camera,scenario,fps,file. UTF-8, comma separators, '.'
// decimal point.

struct Rejection {
  std::string file;
  std::string reason;
};

struct IngestResult {
  std::vector<ColorSignalSequence> sequences;
  std::vector<Rejection> rejections;
};

// Writes every sequence plus the manifest into `dir` (created if missing).
// Returns the manifest path.
std::string write_dataset(const std::vector<ColorSignalSequence>& sequences,
                          const std::string& dir);

// Reads manifest.csv under `dir` and every referenced file. Invalid entries
// (missing file, malformed header, non-contiguous frames, HR outside
// [40,125], bad fps) become rejection entries; valid sequences still load.
IngestResult ingest(const std::string& dir);

}  // namespace pulsegrid
