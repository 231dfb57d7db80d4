#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdipt/actions.hpp"
#include "bdipt/program.hpp"
#include "bdipt/reasoner.hpp"
#include "bdipt/target_sim.hpp"

namespace bdipt {

struct ReportStep {
  std::uint64_t cycle = 0;
  std::string action;
  std::string target;
  std::vector<std::string> args;  // rendered terms, target excluded
  std::string outcome;            // ok | success | failure | <ActionError code>
  std::optional<double> draw;
  std::string privilege_after;
  std::string detail;  // the console line describing the step

  friend bool operator==(const ReportStep&, const ReportStep&) = default;
};

struct Report {
  std::string scenario;
  std::string agent;
  std::uint64_t seed = 0;
  std::string result;  // goal-achieved | exhausted | cycle-cap
  std::string final_privilege = "none";
  std::uint64_t cycles = 0;
  std::uint64_t draws = 0;
  std::vector<ReportStep> steps;
  std::vector<std::string> beliefs;

  friend bool operator==(const Report&, const Report&) = default;
};

using Trace = std::vector<std::string>;

std::string_view to_string(RunOutcome outcome);

/// The simulated network as seen by one agent: routes plan actions to the
/// catalog, logs report steps and produces the console lines of each attack.
class SimulatedNetwork : public Environment {
 public:
  SimulatedNetwork(const Scenario& scenario, RunRng& rng, const ActionCatalog& catalog = ActionCatalog::standard());

  ActionResult execute(const ActionCall& call, const BeliefBase& beliefs) override;

  const std::vector<ReportStep>& steps() const { return steps_; }
  const RunContext& context() const { return run_; }

 private:
  const ActionCatalog& catalog_;
  RunContext run_;
  std::vector<ReportStep> steps_;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;        // defaults to the scenario's
  std::optional<std::uint64_t> max_cycles;  // defaults to the scenario's
  std::vector<double> draws;                // scripted draws served first
  bool record_trace = true;
};

struct RunResult {
  RunOutcome outcome = RunOutcome::Exhausted;
  Report report;
  Trace trace;
};

RunResult run_scenario(const Scenario& scenario, const AgentProgram& program, const RunOptions& options = {});

enum class ReportFormat : unsigned char { Human, Machine };

std::string emit_report(const Report& report, ReportFormat format);
/// Inverse of the machine format. Throws std::invalid_argument on malformed input.
Report parse_report(std::string_view text);

/// Command-line entry point. `args` excludes the program name.
/// Returns 0 when the goal is achieved, 1 when exhausted or capped, 2 on
/// configuration, parse or usage errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bdipt
