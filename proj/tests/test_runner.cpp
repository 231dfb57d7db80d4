#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "bdipt/runner.hpp"
#include "support.hpp"

using namespace bdipt;

namespace {

const std::vector<double> kSimOneDraws{0.13183533644420975, 0.9};
const std::vector<double> kSimTwoDraws{0.9, 0.5, 0.6};

RunResult run_table2(std::vector<double> draws) {
  RunOptions options;
  options.draws = std::move(draws);
  return run_scenario(testing_support::scenario("table2"), testing_support::agent("pentest"), options);
}

std::string joined(const Trace& trace) {
  std::string out;
  for (const auto& line : trace) out += line + "\n";
  return out;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> cli_table2(std::vector<std::string> extra) {
  std::vector<std::string> args{"--scenario", testing_support::source_path("scenarios/table2.json"), "--agent",
                                testing_support::source_path("agents/pentest.asl")};
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("first table2 simulation: the password attack fails and the remote overflow lands") {
  RunResult r = run_table2(kSimOneDraws);
  CHECK(r.outcome == RunOutcome::GoalAchieved);
  CHECK(r.report.result == "goal-achieved");
  CHECK(r.report.final_privilege == "root");
  CHECK(r.report.draws == 2);
  const std::set<std::string> expected{
      "attacked(\"cve_remote\")[source(target)]", "ostype(linux)[source(target)]",
      "password_attack_failed[source(target)]",    "port(22)[source(target)]",
      "port(3306)[source(target)]",                "port(80)[source(target)]",
      "privilege(root)[source(self)]",             "service(mysql)[source(target)]",
      "service(nginx)[source(target)]",            "service(ssh)[source(target)]",
      "vulnerability(cve_local)[source(target)]",  "vulnerability(cve_remote)[source(target)]"};
  CHECK(std::set<std::string>(r.report.beliefs.begin(), r.report.beliefs.end()) == expected);
  CHECK(r.report.beliefs.size() == expected.size());
  CHECK(std::is_sorted(r.report.beliefs.begin(), r.report.beliefs.end()));
  const std::string text = joined(r.trace);
  CHECK(contains(text, "The rate of ssh password attack is 0.13183533644420975failed"));
  CHECK(contains(text, "remote buffer overflow attack is successful"));
  CHECK(r.trace.back() == "[bdi_agent] we are successful!");
}

TEST_CASE("second table2 simulation climbs none, user, root") {
  RunResult r = run_table2(kSimTwoDraws);
  CHECK(r.outcome == RunOutcome::GoalAchieved);
  std::vector<std::string> privileges;
  for (const auto& s : r.report.steps)
    if (privileges.empty() || privileges.back() != s.privilege_after) privileges.push_back(s.privilege_after);
  CHECK(privileges == std::vector<std::string>{"none", "user", "root"});

  std::vector<std::string> bof;
  for (const auto& s : r.report.steps)
    if (s.action == "bof_attack") bof.push_back(s.args.at(1) + ":" + s.outcome);
  CHECK(bof == std::vector<std::string>{"local:success", "local:precondition-unmet", "remote:success"});
  CHECK(contains(joined(r.trace), "local buffer overflow attack is successful"));
  CHECK(contains(joined(r.trace), "remote buffer overflow attack is successful"));
}

TEST_CASE("report steps agree with the trace and the draw count") {
  for (const auto& draws : {kSimOneDraws, kSimTwoDraws}) {
    RunResult r = run_table2(draws);
    std::uint64_t drawn = 0;
    std::uint64_t last_cycle = 0;
    for (const auto& s : r.report.steps) {
      if (s.outcome != "ok")
        CHECK(std::find(r.trace.begin(), r.trace.end(), "[bdi_agent] " + s.detail) != r.trace.end());
      CHECK(s.cycle > last_cycle);
      CHECK(s.cycle <= r.report.cycles);
      last_cycle = s.cycle;
      if (s.draw) {
        CHECK(*s.draw == draws.at(drawn));
        ++drawn;
      }
      CHECK(s.target == "target");
    }
    CHECK(drawn == r.report.draws);
  }
}

TEST_CASE("the hardened scenario is exhausted without any access") {
  RunResult r =
      run_scenario(testing_support::scenario("hardened"), testing_support::agent("pentest"), RunOptions{});
  CHECK(r.outcome == RunOutcome::Exhausted);
  CHECK(r.report.result == "exhausted");
  CHECK(r.report.final_privilege == "none");
  CHECK(r.report.cycles < 500);
  CHECK(contains(joined(r.trace), "goal privilege(root) failed: no applicable plan left"));
  CHECK(std::find(r.report.beliefs.begin(), r.report.beliefs.end(),
                  "attack_failed(privilege(root))[source(self)]") != r.report.beliefs.end());
}

TEST_CASE("a tiny cycle cap stops the run") {
  RunOptions options;
  options.max_cycles = 3;
  RunResult r = run_scenario(testing_support::scenario("table2"), testing_support::agent("pentest"), options);
  CHECK(r.outcome == RunOutcome::CycleCap);
  CHECK(r.report.result == "cycle-cap");
  CHECK(r.report.cycles == 3);
  CHECK(r.trace.back() == "[bdi_agent] cycle cap of 3 reached");
}

TEST_CASE("the pivot scenario reaches root through the sniffer") {
  RunResult r = run_scenario(testing_support::scenario("pivot"), testing_support::agent("pivot"), RunOptions{});
  CHECK(r.outcome == RunOutcome::GoalAchieved);
  CHECK(std::any_of(r.report.steps.begin(), r.report.steps.end(),
                    [](const ReportStep& s) { return s.action == "sniffer_attack" && s.outcome == "success"; }));
}

TEST_CASE("runs are reproducible from the seed alone") {
  RunOptions options;
  options.seed = 12345;
  Scenario s = testing_support::scenario("table2");
  AgentProgram p = testing_support::agent("pentest");
  RunResult a = run_scenario(s, p, options);
  RunResult b = run_scenario(s, p, options);
  CHECK(a.trace == b.trace);
  CHECK(a.report == b.report);
  CHECK(a.report.seed == 12345);
  options.record_trace = false;
  RunResult quiet = run_scenario(s, p, options);
  CHECK(quiet.trace.empty());
  CHECK(quiet.report == a.report);
}

TEST_CASE("the human report shows every step and belief") {
  RunResult r = run_table2(kSimOneDraws);
  std::string human = emit_report(r.report, ReportFormat::Human);
  CHECK(contains(human, "scenario: table2\n"));
  CHECK(contains(human, "result: goal-achieved\n"));
  CHECK(contains(human, "final privilege: root\n"));
  CHECK(contains(human, "remote buffer overflow attack is successful\n"));
  CHECK(contains(human, "  cycle 22: password_attack(target, ssh) -> failure, draw 0.13183533644420975, privilege none\n"));
  CHECK(contains(human, "beliefs:\n  attacked(\"cve_remote\")[source(target)]\n"));
}

TEST_CASE("machine reports round-trip") {
  for (const auto& draws : {kSimOneDraws, kSimTwoDraws}) {
    Report report = run_table2(draws).report;
    CHECK(parse_report(emit_report(report, ReportFormat::Machine)) == report);
  }
  Report empty;
  empty.scenario = "nothing";
  empty.agent = "a";
  empty.result = "exhausted";
  std::string text = emit_report(empty, ReportFormat::Machine);
  CHECK(contains(text, "\"steps\": []"));
  CHECK(parse_report(text) == empty);
  CHECK_THROWS_AS(parse_report("{\"scenario\": 3}"), std::invalid_argument);
  CHECK_THROWS_AS(parse_report("not json"), std::invalid_argument);
}

TEST_CASE("outcome names") {
  CHECK(to_string(RunOutcome::GoalAchieved) == "goal-achieved");
  CHECK(to_string(RunOutcome::Exhausted) == "exhausted");
  CHECK(to_string(RunOutcome::CycleCap) == "cycle-cap");
}

TEST_CASE("traces match the recorded golden files") {
  CHECK(joined(run_table2(kSimOneDraws).trace) == testing_support::slurp("tests/golden/sim1.trace"));
  CHECK(joined(run_table2(kSimTwoDraws).trace) == testing_support::slurp("tests/golden/sim2.trace"));
}

TEST_CASE("command line exit codes") {
  CHECK(cli(cli_table2({"--draws", "0.13183533644420975,0.9"})).code == 0);
  CHECK(cli({"--scenario", testing_support::source_path("scenarios/hardened.json"), "--agent",
             testing_support::source_path("agents/pentest.asl")})
            .code == 1);
  CHECK(cli(cli_table2({"--max-cycles", "2"})).code == 1);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"--agent", "x.asl"}).code == 2);
  CHECK(cli(cli_table2({"--draws", "0.5,1.5"})).code == 2);
  CHECK(cli(cli_table2({"--format", "yaml"})).code == 2);
  CliRun missing = cli({"--scenario", "/nonexistent/s.json", "--agent", testing_support::source_path("agents/pentest.asl")});
  CHECK(missing.code == 2);
  CHECK_FALSE(missing.err.empty());
}

TEST_CASE("configuration and syntax errors are reported on stderr") {
  auto dir = std::filesystem::temp_directory_path() / "bdipt_runner_test";
  std::filesystem::create_directories(dir);
  auto bad_scenario = dir / "bad.json";
  auto bad_agent = dir / "bad.asl";
  std::ofstream(bad_scenario) << R"({"targets": [{"name": "t", "os": "linux", "ports": [22, 22]}]})";
  std::ofstream(bad_agent) << "!g.\n+!g <- .print(X).\n";

  CliRun config = cli({"--scenario", bad_scenario.string(), "--agent", testing_support::source_path("agents/pentest.asl")});
  CHECK(config.code == 2);
  CHECK(contains(config.err, "targets[0].ports[1]"));

  CliRun syntax = cli({"--scenario", testing_support::source_path("scenarios/table2.json"), "--agent", bad_agent.string()});
  CHECK(syntax.code == 2);
  CHECK(contains(syntax.err, "not bound"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("command line output: trace then report") {
  CliRun r = cli(cli_table2({"--draws", "0.9,0.5,0.6", "--format", "machine"}));
  REQUIRE(r.code == 0);
  auto brace = r.out.find("\n{");
  REQUIRE(brace != std::string::npos);
  CHECK(r.out.substr(0, brace + 1) == testing_support::slurp("tests/golden/sim2.trace"));
  Report parsed = parse_report(r.out.substr(brace + 1));
  CHECK(parsed == run_table2(kSimTwoDraws).report);
}

TEST_CASE("trace and report can be written to files") {
  auto dir = std::filesystem::temp_directory_path() / "bdipt_runner_files";
  std::filesystem::create_directories(dir);
  auto trace = (dir / "run.trace").string();
  auto report = (dir / "run.json").string();
  CliRun r = cli(cli_table2({"--draws", "0.13183533644420975,0.9", "--trace", trace, "--report", report, "--format",
                             "machine"}));
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream tin(trace), rin(report);
  std::stringstream ts, rs;
  ts << tin.rdbuf();
  rs << rin.rdbuf();
  CHECK(ts.str() == testing_support::slurp("tests/golden/sim1.trace"));
  CHECK(parse_report(rs.str()) == run_table2(kSimOneDraws).report);
  std::filesystem::remove_all(dir);
}

TEST_CASE("repeated runs print aggregate statistics") {
  CliRun r = cli(cli_table2({"--repeat", "50", "--seed", "1"}));
  CHECK(r.code == 0);
  CHECK(contains(r.out, "runs: 50"));
}
