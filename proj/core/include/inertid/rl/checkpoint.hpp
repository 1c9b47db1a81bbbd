#pragma once

#include <cstdint>
#include <string>

#include "inertid/rl/environment.hpp"
#include "inertid/rl/policy.hpp"

namespace inertid::rl {

inline constexpr int kCheckpointVersion = 1;

/// Policy plus the settings it was trained under.
struct Checkpoint {
  PolicyParams params;
  RewardWeights weights;
  std::string scenario;
  std::int64_t total_steps = 0;
  std::uint64_t seed = 0;
  int thrusters = 0;
  int wheels = 0;
};

std::string checkpoint_to_json(const Checkpoint& c);
/// Throws ValidationError on malformed input or an unknown version.
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::string& path, const Checkpoint& c);
/// Throws NotFoundError if the file cannot be opened.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace inertid::rl
