#pragma once

#include <string>

#include <json.hpp>

#include "inls/core.hpp"

namespace inls {

/// Binary checkpoint layout (all values little-endian):
///   16-byte header "INLSCKPT" + uint32 version + uint32 zero,
///   int64 N, N x int64 M, float64 L, float64 b,
///   M^N (re, im) float64 pairs in row-major order.
/// A sidecar `<path>.json` repeats the metadata and adds the creation time,
/// the producing run id and solver position (t, step).
inline constexpr char kCheckpointMagic[8] = {'I', 'N', 'L', 'S', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointInfo {
  double t = 0.0;
  long step = 0;
  std::string run_id;
};

struct Checkpoint {
  Field field;
  nlohmann::json sidecar;
};

/// Writes `path` and `path + ".json"`. Throws IoError on failure.
void write_checkpoint(const std::string& path, const Field& f, const CheckpointInfo& info);

/// Reads a checkpoint and validates header, sizes and the sidecar metadata.
Checkpoint read_checkpoint(const std::string& path);

}  // namespace inls
