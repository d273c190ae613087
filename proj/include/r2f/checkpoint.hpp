#pragma once

#include <map>
#include <string>

#include "r2f/model.hpp"
#include "r2f/retrieval.hpp"

namespace r2f {

inline constexpr int kCheckpointVersion = 1;

struct ModelCheckpoint {
  int version = kCheckpointVersion;
  Model model;
  RetrievalConfig retrieval;
  double threshold = 0.5;
  std::string train_digest;
  std::map<std::string, double> dev_metrics;
};

// Line-oriented text, doubles written in shortest round-trip form, closed
// by an "end <checksum>" line over everything before it.
std::string serialize_checkpoint(const ModelCheckpoint& checkpoint);
// Throws kVersionMismatch for another format version and
// kCorruptCheckpoint for truncated, malformed or tampered content.
ModelCheckpoint parse_checkpoint(const std::string& content);

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

}  // namespace r2f
