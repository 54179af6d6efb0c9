#pragma once

#include <span>
#include <vector>

#include "plugpull/config.hpp"
#include "plugpull/simlog.hpp"

namespace plugpull::sim {

/// Serial reference: one scenario after another.
std::vector<SimLog> run_batch_serial(std::span<const ScenarioConfig> configs);

/// OpenMP over scenarios; each run stays single-threaded, so the logs are
/// identical to run_batch_serial. The first failure is rethrown.
std::vector<SimLog> run_batch(std::span<const ScenarioConfig> configs);

/// cfg with seeds first_seed .. first_seed + count - 1.
std::vector<ScenarioConfig> seed_variations(const ScenarioConfig& cfg, std::uint64_t first_seed,
                                            std::size_t count);

}  // namespace plugpull::sim
