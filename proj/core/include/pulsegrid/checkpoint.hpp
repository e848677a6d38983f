#pragma once

#include <cstdint>
#include <string>

#include "pulsegrid/model.hpp"

namespace pulsegrid {

struct CheckpointMeta {
  int epoch = 0;
  real val_mae = 0.0;
};

// JSON container holding the spec, build seed, every named parameter array,
// BN running stats, and training metadata. Saving the result of a load
// reproduces the original file byte for byte (doubles are serialized with
// shortest-round-trip precision).
void save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::string& path);

Model load_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);

}  // namespace pulsegrid
