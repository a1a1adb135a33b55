#pragma once

#include <string>

#include "pitchstats/tcn/model.hpp"

namespace pitchstats::tcn {

// Model file: "PTCN" magic, u32 format version, u64-length-prefixed JSON
// blob (config + init seed, canonical key order), then every state tensor
// in declaration order as u32 rank, u64 dims, raw 64-bit floats.
// Little-endian throughout. Round trips are bit-exact.
void save_model(const TcnModel& model, const std::string& path);

// Rebuilds the model, checking the version, that the config validates, and
// that every stored shape matches the shape the config derives. Truncated or
// oversized files fail cleanly.
TcnModel load_model(const std::string& path);

}  // namespace pitchstats::tcn
