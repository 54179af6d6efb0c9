#include "plugpull/sweep.hpp"

#include <exception>

#include "plugpull/simulator.hpp"

namespace plugpull::sim {

std::vector<SimLog> run_batch_serial(std::span<const ScenarioConfig> configs) {
  std::vector<SimLog> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(run_scenario(c));
  return out;
}

std::vector<SimLog> run_batch(std::span<const ScenarioConfig> configs) {
  const auto n = static_cast<std::ptrdiff_t>(configs.size());
  std::vector<SimLog> out(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = run_scenario(configs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<ScenarioConfig> seed_variations(const ScenarioConfig& cfg, std::uint64_t first_seed,
                                            std::size_t count) {
  std::vector<ScenarioConfig> out(count, cfg);
  for (std::size_t i = 0; i < count; ++i) out[i].seed = first_seed + i;
  return out;
}

}  // namespace plugpull::sim
