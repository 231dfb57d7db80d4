#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bdipt/attack.hpp"
#include "bdipt/program.hpp"
#include "bdipt/reasoner.hpp"
#include "bdipt/target_sim.hpp"

namespace bdipt {

/// Outcome of one untraced run in a seed sweep.
struct RunSummary {
  std::uint64_t seed = 0;
  RunOutcome outcome = RunOutcome::Exhausted;
  Privilege final_privilege = Privilege::None;
  std::uint64_t cycles = 0;
  std::uint64_t draws = 0;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct BatchStats {
  std::uint64_t runs = 0;
  std::uint64_t goal_achieved = 0;
  std::uint64_t exhausted = 0;
  std::uint64_t cycle_cap = 0;
  double success_rate = 0.0;
  double mean_cycles = 0.0;
  double mean_draws = 0.0;
};

/// Runs seeds first_seed .. first_seed+count-1 one after another. Reference
/// implementation for the parallel sweep.
std::vector<RunSummary> run_batch_serial(const Scenario& scenario, const AgentProgram& program,
                                         std::uint64_t first_seed, std::uint64_t count,
                                         std::optional<std::uint64_t> max_cycles = std::nullopt);

/// Same result as run_batch_serial, element for element, spread over OpenMP
/// threads (0 = runtime default).
std::vector<RunSummary> run_batch_parallel(const Scenario& scenario, const AgentProgram& program,
                                           std::uint64_t first_seed, std::uint64_t count,
                                           std::optional<std::uint64_t> max_cycles = std::nullopt, int threads = 0);

BatchStats summarize(std::span<const RunSummary> runs);

/// One attack adjudicated in isolation against `spec`, once per seed.
struct AttackTrial {
  ActionRequest request;
  Privilege starting = Privilege::None;
};

std::uint64_t count_attack_successes_serial(const TargetSpec& spec, const AttackTrial& trial,
                                            const Thresholds& thresholds, std::uint64_t first_seed,
                                            std::uint64_t count);

std::uint64_t count_attack_successes_parallel(const TargetSpec& spec, const AttackTrial& trial,
                                              const Thresholds& thresholds, std::uint64_t first_seed,
                                              std::uint64_t count, int threads = 0);

}  // namespace bdipt
