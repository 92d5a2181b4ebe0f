#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ibts/adam.hpp"

namespace ibts {

// FNV-1a over every parameter's name, shape and float32 encoding. Two
// parameter sets have the same fingerprint exactly when their checkpoints
// would be byte-identical.
uint64_t params_fingerprint(const ParamSet& params);

// One float32 little-endian blob per tensor: <dir>/<name>.bin.
void save_param_blobs(const std::string& dir, const ParamSet& params);
ParamSet load_param_blobs(const std::string& dir,
                          const std::vector<std::pair<std::string, Shape>>& manifest);

}  // namespace ibts
