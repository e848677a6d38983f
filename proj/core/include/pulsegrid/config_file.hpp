#pragma once

#include <map>
#include <string>

#include "pulsegrid/train.hpp"

namespace pulsegrid {

// Flat `key = value` file, one pair per line; '#' starts a comment. Keys
// mirror TrainConfig: batch_size, epochs, loss, with_filter, alpha, seed,
// lr_min, lr_max, adam_beta1, adam_beta2, adam_eps, dropout, softmax_mse.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Applies `kv` on top of `base`; unknown keys or unparsable values throw.
TrainConfig train_config_from(const std::map<std::string, std::string>& kv,
                              TrainConfig base = {});

std::map<std::string, std::string> config_to_map(const TrainConfig& config);

}  // namespace pulsegrid
