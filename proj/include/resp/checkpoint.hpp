// SPDX-License-Identifier: Apache-2.0
#ifndef RESP_CHECKPOINT_HPP
#define RESP_CHECKPOINT_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "resp/nn.hpp"

namespace resp::checkpoint {

// Versioned binary container for a trained model. Byte layout is
// documented in docs/checkpoint.md; round-trips are bit-exact.
struct Checkpoint {
  nn::ModelParams model;
  std::optional<nn::AdamState> optimizer;
  std::uint64_t train_step = 0;
  std::uint64_t seed = 0;
};

void save(const std::string& path, const Checkpoint& ckpt); // atomic write
Checkpoint load(const std::string& path);

// Error classification for tests and CLI messages.
struct BadCheckpoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VersionMismatch : BadCheckpoint {
  using BadCheckpoint::BadCheckpoint;
};
struct Truncated : BadCheckpoint {
  using BadCheckpoint::BadCheckpoint;
};

} // namespace resp::checkpoint

#endif
