#include "bdipt/batch.hpp"

#include <omp.h>

#include "bdipt/runner.hpp"

namespace bdipt {

namespace {

RunSummary one_run(const Scenario& scenario, const AgentProgram& program, std::uint64_t seed,
                   std::optional<std::uint64_t> max_cycles) {
  RunOptions options;
  options.seed = seed;
  options.max_cycles = max_cycles;
  options.record_trace = false;
  RunResult r = run_scenario(scenario, program, options);
  return RunSummary{seed, r.outcome, privilege_from_string(r.report.final_privilege), r.report.cycles,
                    r.report.draws};
}

bool one_attack(const TargetSpec& spec, const AttackTrial& trial, const Thresholds& thresholds, std::uint64_t seed) {
  RunRng rng(seed);
  AttackContext ctx{trial.starting, {}};
  return resolve_attack(spec, trial.request, rng, thresholds, ctx).success;
}

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace

std::vector<RunSummary> run_batch_serial(const Scenario& scenario, const AgentProgram& program,
                                         std::uint64_t first_seed, std::uint64_t count,
                                         std::optional<std::uint64_t> max_cycles) {
  std::vector<RunSummary> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(one_run(scenario, program, first_seed + i, max_cycles));
  return out;
}

std::vector<RunSummary> run_batch_parallel(const Scenario& scenario, const AgentProgram& program,
                                           std::uint64_t first_seed, std::uint64_t count,
                                           std::optional<std::uint64_t> max_cycles, int threads) {
  std::vector<RunSummary> out(count);
  set_threads(threads);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        one_run(scenario, program, first_seed + static_cast<std::uint64_t>(i), max_cycles);
  return out;
}

BatchStats summarize(std::span<const RunSummary> runs) {
  BatchStats st;
  st.runs = runs.size();
  double cycles = 0.0;
  double draws = 0.0;
  for (const auto& r : runs) {
    switch (r.outcome) {
      case RunOutcome::GoalAchieved: ++st.goal_achieved; break;
      case RunOutcome::Exhausted: ++st.exhausted; break;
      case RunOutcome::CycleCap: ++st.cycle_cap; break;
    }
    cycles += static_cast<double>(r.cycles);
    draws += static_cast<double>(r.draws);
  }
  if (st.runs > 0) {
    const auto n = static_cast<double>(st.runs);
    st.success_rate = static_cast<double>(st.goal_achieved) / n;
    st.mean_cycles = cycles / n;
    st.mean_draws = draws / n;
  }
  return st;
}

std::uint64_t count_attack_successes_serial(const TargetSpec& spec, const AttackTrial& trial,
                                            const Thresholds& thresholds, std::uint64_t first_seed,
                                            std::uint64_t count) {
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < count; ++i) hits += one_attack(spec, trial, thresholds, first_seed + i) ? 1 : 0;
  return hits;
}

std::uint64_t count_attack_successes_parallel(const TargetSpec& spec, const AttackTrial& trial,
                                              const Thresholds& thresholds, std::uint64_t first_seed,
                                              std::uint64_t count, int threads) {
  set_threads(threads);
  std::uint64_t hits = 0;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    hits += one_attack(spec, trial, thresholds, first_seed + static_cast<std::uint64_t>(i)) ? 1 : 0;
  return hits;
}

}  // namespace bdipt
