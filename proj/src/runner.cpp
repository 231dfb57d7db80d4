#include "bdipt/runner.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdipt/batch.hpp"

namespace bdipt {

namespace {

std::string attack_description(const std::string& action, const std::vector<std::string>& args, bool rate) {
  auto arg = [&](std::size_t i) { return i < args.size() ? args[i] : std::string("?"); };
  if (action == "password_attack") return rate ? arg(0) + " password attack" : "password attack on " + arg(0);
  if (action == "bof_attack") return arg(1) + " buffer overflow attack";
  if (action == "sqli_attack") return "sql injection attack";
  if (action == "sniffer_attack") return "sniffer attack via " + arg(0);
  if (action == "social_attack") return "social engineering attack";
  return action;
}

bool is_attack(const std::string& action) {
  return action == "password_attack" || action == "bof_attack" || action == "sqli_attack" ||
         action == "sniffer_attack" || action == "social_attack";
}

std::string spaced(std::string code) {
  std::replace(code.begin(), code.end(), '-', ' ');
  return code;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_draws(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || v < 0.0 || v >= 1.0)
      throw std::invalid_argument("draw values must be numbers in [0,1), got '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::string_view to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::GoalAchieved: return "goal-achieved";
    case RunOutcome::Exhausted: return "exhausted";
    case RunOutcome::CycleCap: return "cycle-cap";
  }
  return "exhausted";
}

SimulatedNetwork::SimulatedNetwork(const Scenario& scenario, RunRng& rng, const ActionCatalog& catalog)
    : catalog_(catalog), run_{scenario, rng, {}} {}

ActionResult SimulatedNetwork::execute(const ActionCall& call, const BeliefBase& beliefs) {
  ActionResult result;
  if (!catalog_.contains(call.name, call.args.size())) {
    result.status = ActionStatus::Unknown;
    return result;
  }
  if (call.name == "report") return result;

  ReportStep step;
  step.cycle = call.cycle;
  step.action = call.name;
  if (!call.args.empty()) step.target = call.args.front().to_display();
  std::vector<std::string> shown;
  for (std::size_t i = 1; i < call.args.size(); ++i) {
    step.args.push_back(call.args[i].to_string());
    shown.push_back(call.args[i].to_display());
  }
  const bool attack = is_attack(call.name);
  const std::string desc = attack ? attack_description(call.name, shown, false) : call.name;

  try {
    ActionEffect effect = catalog_.invoke(run_, beliefs, call.name, call.args);
    result.percepts = std::move(effect.percepts);
    if (effect.outcome) {
      const AttackOutcome& out = *effect.outcome;
      const char* verdict = out.success ? "successful" : "failed";
      step.outcome = out.success ? "success" : "failure";
      step.draw = out.draw;
      if (out.draw)
        result.messages.push_back("The rate of " + attack_description(call.name, shown, true) + " is " +
                                  format_number(*out.draw) + verdict);
      step.detail = desc + " is " + verdict;
      result.messages.push_back(step.detail);
      result.status = out.success ? ActionStatus::Ok : ActionStatus::Failed;
    } else {
      step.outcome = "ok";
      step.detail = desc + " returned " + std::to_string(result.percepts.size()) + " fact(s)";
    }
  } catch (const ActionError& e) {
    step.outcome = e.code();
    step.detail = desc + " " + spaced(e.code()) + ": " + e.what();
    result.messages.push_back(step.detail);
    result.status = ActionStatus::Failed;
  }
  step.privilege_after = std::string(to_string(run_.overall()));
  steps_.push_back(std::move(step));
  return result;
}

RunResult run_scenario(const Scenario& scenario, const AgentProgram& program, const RunOptions& options) {
  PriorityTable priorities = PriorityTable::defaults();
  for (const auto& [k, v] : scenario.priorities) priorities.set(k, v);

  const std::uint64_t seed = options.seed.value_or(scenario.seed);
  RunRng rng(seed, options.draws);
  SimulatedNetwork network(scenario, rng);
  AgentState state = init_agent(program, std::move(priorities), scenario.agent_name);
  state.record_trace = options.record_trace;

  RunResult out;
  out.outcome = run_agent(state, network, options.max_cycles.value_or(scenario.max_cycles));
  if (out.outcome == RunOutcome::GoalAchieved) state.log("we are successful!");

  Report& r = out.report;
  r.scenario = scenario.name;
  r.agent = scenario.agent_name;
  r.seed = seed;
  r.result = std::string(to_string(out.outcome));
  r.final_privilege = std::string(to_string(network.context().overall()));
  r.cycles = state.cycle_count;
  r.draws = rng.draws();
  r.steps = network.steps();
  r.beliefs = state.beliefs.dump();
  out.trace = std::move(state.trace);
  return out;
}

std::string emit_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::Machine) {
    nlohmann::ordered_json j;
    j["scenario"] = report.scenario;
    j["agent"] = report.agent;
    j["seed"] = report.seed;
    j["result"] = report.result;
    j["final_privilege"] = report.final_privilege;
    j["cycles"] = report.cycles;
    j["draws"] = report.draws;
    j["steps"] = nlohmann::ordered_json::array();
    for (const auto& s : report.steps) {
      nlohmann::ordered_json step;
      step["cycle"] = s.cycle;
      step["action"] = s.action;
      step["target"] = s.target;
      step["args"] = s.args;
      step["outcome"] = s.outcome;
      step["draw"] = s.draw ? nlohmann::ordered_json(*s.draw) : nlohmann::ordered_json(nullptr);
      step["privilege_after"] = s.privilege_after;
      step["detail"] = s.detail;
      j["steps"].push_back(std::move(step));
    }
    j["beliefs"] = report.beliefs;
    return j.dump(2) + "\n";
  }

  std::ostringstream os;
  os << "scenario: " << report.scenario << "\n"
     << "agent: " << report.agent << "\n"
     << "seed: " << report.seed << "\n"
     << "result: " << report.result << "\n"
     << "final privilege: " << report.final_privilege << "\n"
     << "cycles: " << report.cycles << "\n"
     << "draws: " << report.draws << "\n"
     << "steps:\n";
  for (const auto& s : report.steps) {
    os << s.detail << "\n  cycle " << s.cycle << ": " << s.action << "(" << s.target;
    for (const auto& a : s.args) os << ", " << a;
    os << ") -> " << s.outcome;
    if (s.draw) os << ", draw " << format_number(*s.draw);
    os << ", privilege " << s.privilege_after << "\n";
  }
  os << "beliefs:\n";
  for (const auto& b : report.beliefs) os << "  " << b << "\n";
  return os.str();
}

Report parse_report(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    Report r;
    r.scenario = j.at("scenario").get<std::string>();
    r.agent = j.at("agent").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.result = j.at("result").get<std::string>();
    r.final_privilege = j.at("final_privilege").get<std::string>();
    r.cycles = j.at("cycles").get<std::uint64_t>();
    r.draws = j.at("draws").get<std::uint64_t>();
    for (const auto& s : j.at("steps")) {
      ReportStep step;
      step.cycle = s.at("cycle").get<std::uint64_t>();
      step.action = s.at("action").get<std::string>();
      step.target = s.at("target").get<std::string>();
      step.args = s.at("args").get<std::vector<std::string>>();
      step.outcome = s.at("outcome").get<std::string>();
      if (!s.at("draw").is_null()) step.draw = s.at("draw").get<double>();
      step.privilege_after = s.at("privilege_after").get<std::string>();
      step.detail = s.at("detail").get<std::string>();
      r.steps.push_back(std::move(step));
    }
    r.beliefs = j.at("beliefs").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  }
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Run a BDI penetration-testing agent against a simulated network", "bdipt"};
  std::string scenario_path, agent_path, report_path, trace_path, format = "human", draws_text;
  std::optional<std::uint64_t> seed, max_cycles;
  std::uint64_t repeat = 0;
  int threads = 0;
  app.add_option("--scenario", scenario_path, "scenario file (JSON)")->required();
  app.add_option("--agent", agent_path, "agent program file")->required();
  app.add_option("--seed", seed, "RNG seed, overrides the scenario's");
  app.add_option("--max-cycles", max_cycles, "reasoning cycle cap");
  app.add_option("--report", report_path, "write the report here instead of stdout");
  app.add_option("--trace", trace_path, "write the trace here instead of stdout");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"human", "machine"}));
  app.add_option("--draws", draws_text, "comma-separated scripted draws served before the RNG");
  app.add_option("--repeat", repeat, "run N consecutive seeds and print aggregate statistics");
  app.add_option("--threads", threads, "worker threads for --repeat (0 = default)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  Scenario scenario;
  AgentProgram program;
  std::vector<double> draws;
  try {
    scenario = load_scenario(read_file(scenario_path));
    program = parse_program(read_file(agent_path));
    if (!draws_text.empty()) draws = parse_draws(draws_text);
  } catch (const ConfigError& e) {
    err << "config error at " << e.path() << ": " << e.what() << "\n";
    return 2;
  } catch (const SyntaxError& e) {
    err << agent_path << ":" << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (program.initial_goals.empty()) {
    err << "error: " << agent_path << " declares no initial goal\n";
    return 2;
  }

  auto sink = [&](const std::string& path, const std::string& text) {
    if (path.empty()) {
      out << text;
      return true;
    }
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) err << "error: cannot write " << path << "\n";
    return static_cast<bool>(f);
  };

  if (repeat > 0) {
    auto runs = run_batch_parallel(scenario, program, seed.value_or(scenario.seed), repeat, max_cycles, threads);
    BatchStats st = summarize(runs);
    std::string text;
    if (format == "machine") {
      nlohmann::ordered_json j{{"scenario", scenario.name},       {"runs", st.runs},
                               {"goal_achieved", st.goal_achieved}, {"exhausted", st.exhausted},
                               {"cycle_cap", st.cycle_cap},         {"success_rate", st.success_rate},
                               {"mean_cycles", st.mean_cycles},     {"mean_draws", st.mean_draws}};
      text = j.dump(2) + "\n";
    } else {
      std::ostringstream os;
      os << "scenario: " << scenario.name << "\nruns: " << st.runs << "\ngoal-achieved: " << st.goal_achieved
         << "\nexhausted: " << st.exhausted << "\ncycle-cap: " << st.cycle_cap
         << "\nsuccess rate: " << format_number(st.success_rate) << "\nmean cycles: " << format_number(st.mean_cycles)
         << "\nmean draws: " << format_number(st.mean_draws) << "\n";
      text = os.str();
    }
    if (!sink(report_path, text)) return 2;
    return st.goal_achieved > 0 ? 0 : 1;
  }

  RunOptions options;
  options.seed = seed;
  options.max_cycles = max_cycles;
  options.draws = std::move(draws);
  RunResult result = run_scenario(scenario, program, options);

  std::string trace;
  for (const auto& line : result.trace) trace += line + "\n";
  if (!sink(trace_path, trace)) return 2;
  if (!sink(report_path, emit_report(result.report, format == "machine" ? ReportFormat::Machine : ReportFormat::Human)))
    return 2;
  return result.outcome == RunOutcome::GoalAchieved ? 0 : 1;
}

}  // namespace bdipt
