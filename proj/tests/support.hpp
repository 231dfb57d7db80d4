#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bdipt/program.hpp"
#include "bdipt/target_sim.hpp"

namespace testing_support {

inline std::string source_path(const std::string& relative) { return std::string(BDIPT_SOURCE_DIR) + "/" + relative; }

inline std::string slurp(const std::string& relative) {
  std::ifstream in(source_path(relative), std::ios::binary);
  if (!in) throw std::runtime_error("missing test input " + relative);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bdipt::Scenario scenario(const std::string& name) { return bdipt::load_scenario(slurp("scenarios/" + name + ".json")); }

inline bdipt::AgentProgram agent(const std::string& name) { return bdipt::parse_program(slurp("agents/" + name + ".asl")); }

inline bdipt::Term t(const std::string& text) { return bdipt::parse_term(text); }
inline bdipt::Literal lit(const std::string& text) { return bdipt::parse_literal(text); }

}  // namespace testing_support
