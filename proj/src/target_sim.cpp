#include "bdipt/target_sim.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <json.hpp>

namespace bdipt {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kRemoteLogin = {"ssh", "ftp", "telnet", "mysql"};

bool valid_atom(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string term_text(const Term& t) {
  if (t.is_number()) return format_number(t.value());
  return t.name();
}

Literal percept(std::string functor, std::vector<Term> args, std::string_view source) {
  return Literal(Term::compound(std::move(functor), std::move(args)), {source_annotation(source)});
}

Literal marker(std::string_view name, std::string_view source) {
  return Literal(Term::atom(std::string(name)), {source_annotation(source)});
}

// --- config parsing -------------------------------------------------------

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key))
    throw ConfigError(path == "$" ? std::string(key) : path + "." + key, "missing required field");
  return obj.at(key);
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

std::string get_atom(const json& v, const std::string& path) {
  std::string s = get_string(v, path);
  if (!valid_atom(s)) throw ConfigError(path, "'" + s + "' is not a lowercase identifier");
  return s;
}

double get_unit(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  double d = v.get<double>();
  if (!(d >= 0.0 && d <= 1.0)) throw ConfigError(path, "value " + json(d).dump() + " outside [0, 1]");
  return d;
}

std::uint64_t get_u64(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

const json& get_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array");
  return v;
}

VulnKind kind_from(const json& v, const std::string& path) {
  std::string s = get_string(v, path);
  if (s == "remote") return VulnKind::Remote;
  if (s == "local") return VulnKind::Local;
  if (s == "sqli") return VulnKind::Sqli;
  throw ConfigError(path, "unknown vulnerability kind '" + s + "' (remote|local|sqli)");
}

TargetSpec parse_target(const json& t, const std::string& path) {
  if (!t.is_object()) throw ConfigError(path, "expected an object");
  TargetSpec spec;
  spec.name = get_atom(require(t, "name", path), path + ".name");
  spec.os = get_atom(require(t, "os", path), path + ".os");
  if (t.contains("ports")) {
    const auto& ports = get_array(t.at("ports"), path + ".ports");
    for (std::size_t i = 0; i < ports.size(); ++i) {
      std::string p = path + ".ports[" + std::to_string(i) + "]";
      if (!ports[i].is_number_integer()) throw ConfigError(p, "expected an integer port");
      int port = ports[i].get<int>();
      if (port < 0 || port > 65535) throw ConfigError(p, "port out of range");
      if (std::find(spec.ports.begin(), spec.ports.end(), port) != spec.ports.end())
        throw ConfigError(p, "duplicate port");
      spec.ports.push_back(port);
    }
  }
  if (t.contains("services")) {
    const auto& services = get_array(t.at("services"), path + ".services");
    for (std::size_t i = 0; i < services.size(); ++i) {
      std::string p = path + ".services[" + std::to_string(i) + "]";
      ServiceSpec s;
      const auto& port = require(services[i], "port", p);
      if (!port.is_number_integer()) throw ConfigError(p + ".port", "expected an integer port");
      s.port = port.get<int>();
      s.name = get_atom(require(services[i], "name", p), p + ".name");
      if (std::find(spec.ports.begin(), spec.ports.end(), s.port) == spec.ports.end())
        throw ConfigError(p + ".port", "service port " + std::to_string(s.port) + " is not listed in ports");
      spec.services.push_back(std::move(s));
    }
  }
  if (t.contains("vulnerabilities")) {
    const auto& vulns = get_array(t.at("vulnerabilities"), path + ".vulnerabilities");
    for (std::size_t i = 0; i < vulns.size(); ++i) {
      std::string p = path + ".vulnerabilities[" + std::to_string(i) + "]";
      VulnSpec v;
      v.id = get_atom(require(vulns[i], "id", p), p + ".id");
      v.kind = kind_from(require(vulns[i], "kind", p), p + ".kind");
      if (spec.find_vulnerability(v.id)) throw ConfigError(p + ".id", "duplicate vulnerability id '" + v.id + "'");
      spec.vulnerabilities.push_back(std::move(v));
    }
  }
  if (t.contains("credentials")) {
    const auto& creds = get_array(t.at("credentials"), path + ".credentials");
    for (std::size_t i = 0; i < creds.size(); ++i) {
      std::string p = path + ".credentials[" + std::to_string(i) + "]";
      CredentialSpec c;
      c.service = get_atom(require(creds[i], "service", p), p + ".service");
      c.secret = get_string(require(creds[i], "secret", p), p + ".secret");
      spec.credentials.push_back(std::move(c));
    }
  }
  spec.subnet = t.contains("subnet") ? get_atom(t.at("subnet"), path + ".subnet") : "";
  if (t.contains("staff")) {
    const auto& staff = get_array(t.at("staff"), path + ".staff");
    for (std::size_t i = 0; i < staff.size(); ++i) {
      std::string p = path + ".staff[" + std::to_string(i) + "]";
      StaffSpec s;
      s.email = get_string(require(staff[i], "email", p), p + ".email");
      if (staff[i].contains("susceptibility"))
        s.susceptibility = get_unit(staff[i].at("susceptibility"), p + ".susceptibility");
      spec.staff.push_back(std::move(s));
    }
  }
  return spec;
}

nlohmann::ordered_json target_to_json(const TargetSpec& t) {
  nlohmann::ordered_json out;
  out["name"] = t.name;
  out["os"] = t.os;
  out["ports"] = t.ports;
  out["services"] = nlohmann::ordered_json::array();
  for (const auto& s : t.services) out["services"].push_back({{"port", s.port}, {"name", s.name}});
  out["vulnerabilities"] = nlohmann::ordered_json::array();
  for (const auto& v : t.vulnerabilities)
    out["vulnerabilities"].push_back({{"id", v.id}, {"kind", std::string(to_string(v.kind))}});
  out["credentials"] = nlohmann::ordered_json::array();
  for (const auto& c : t.credentials) out["credentials"].push_back({{"service", c.service}, {"secret", c.secret}});
  if (!t.subnet.empty()) out["subnet"] = t.subnet;
  out["staff"] = nlohmann::ordered_json::array();
  for (const auto& s : t.staff) out["staff"].push_back({{"email", s.email}, {"susceptibility", s.susceptibility}});
  return out;
}

// --- attacks -------------------------------------------------------------

bool direct_weakness(const TargetSpec& t) {
  return t.has_vulnerability_of(VulnKind::Remote) || t.has_vulnerability_of(VulnKind::Sqli) ||
         !t.credentials.empty() ||
         std::any_of(t.staff.begin(), t.staff.end(), [](const StaffSpec& s) { return s.susceptibility > 0.0; });
}

AttackOutcome chance(AttackOutcome out, RunRng& rng, double threshold, Privilege grant, PerceptBatch on_success,
                     Literal on_failure) {
  double u = rng.next();
  out.draw = u;
  out.success = u >= threshold;
  if (out.success) {
    out.privilege_granted = grant;
    out.evidence = std::move(on_success);
  } else {
    out.evidence = {std::move(on_failure)};
  }
  return out;
}

AttackOutcome impossible(AttackOutcome out, Literal on_failure) {
  out.success = false;
  out.evidence = {std::move(on_failure)};
  return out;
}

void expect_arity(const ActionRequest& r, std::size_t n) {
  if (r.args.size() != n)
    throw PreconditionUnmet(r.action + " expects " + std::to_string(n) + " argument(s) after the target");
}

AttackOutcome bof(const TargetSpec& spec, const ActionRequest& r, RunRng& rng, const Thresholds& th,
                  const AttackContext& ctx) {
  expect_arity(r, 2);
  const std::string vuln = term_text(r.args[0]);
  const std::string mode = term_text(r.args[1]);
  if (mode != "remote" && mode != "local") throw PreconditionUnmet("buffer overflow mode must be remote or local");
  const VulnKind want = mode == "remote" ? VulnKind::Remote : VulnKind::Local;
  if (want == VulnKind::Local && ctx.current < Privilege::User)
    throw PreconditionUnmet("local buffer overflow requires user privilege on " + spec.name);
  AttackOutcome out{r.action, false, std::nullopt, std::nullopt, {}};
  const auto failed = marker("bof_attack_failed", spec.name);
  const VulnSpec* v = spec.find_vulnerability(vuln);
  if (!v) return impossible(std::move(out), failed);
  if (v->kind != want)
    throw PreconditionUnmet(vuln + " is a " + std::string(to_string(v->kind)) + " vulnerability, not " + mode);
  double threshold = want == VulnKind::Remote ? th.bof_remote : th.bof_local;
  return chance(std::move(out), rng, threshold, Privilege::Root,
                {percept("attacked", {Term::string(vuln)}, spec.name)}, failed);
}

AttackOutcome sqli(const TargetSpec& spec, const ActionRequest& r, RunRng& rng, const Thresholds& th) {
  expect_arity(r, 0);
  AttackOutcome out{r.action, false, std::nullopt, std::nullopt, {}};
  const auto failed = marker("sqli_attack_failed", spec.name);
  auto it = std::find_if(spec.vulnerabilities.begin(), spec.vulnerabilities.end(),
                         [](const VulnSpec& v) { return v.kind == VulnKind::Sqli; });
  if (it == spec.vulnerabilities.end()) return impossible(std::move(out), failed);
  return chance(std::move(out), rng, th.sqli, Privilege::Web, {percept("injected", {Term::string(it->id)}, spec.name)},
                failed);
}

AttackOutcome password(const TargetSpec& spec, const ActionRequest& r, RunRng& rng, const Thresholds& th) {
  expect_arity(r, 1);
  const std::string service = term_text(r.args[0]);
  if (!kRemoteLogin.contains(service)) throw PreconditionUnmet(service + " does not accept remote logins");
  AttackOutcome out{r.action, false, std::nullopt, std::nullopt, {}};
  const auto failed = marker("password_attack_failed", spec.name);
  const CredentialSpec* cred = spec.find_credential(service);
  if (!cred) return impossible(std::move(out), failed);
  return chance(std::move(out), rng, th.password, Privilege::User,
                {percept("credential", {Term::atom(service), Term::string(cred->secret)}, spec.name)}, failed);
}

AttackOutcome sniffer(const TargetSpec& spec, const ActionRequest& r, RunRng& rng, const Thresholds& th,
                      const AttackContext& ctx) {
  expect_arity(r, 1);
  const std::string peer_name = term_text(r.args[0]);
  std::vector<const TargetSpec*> peers;
  for (const auto& t : ctx.network)
    if (t.name != spec.name && !spec.subnet.empty() && t.subnet == spec.subnet) peers.push_back(&t);
  if (peers.empty()) throw NoSubnetPeer(spec.name);
  auto it = std::find_if(peers.begin(), peers.end(), [&](const TargetSpec* p) { return p->name == peer_name; });
  if (it == peers.end()) throw PreconditionUnmet(peer_name + " is not on " + spec.name + "'s subnet");

  AttackOutcome out{r.action, false, std::nullopt, std::nullopt, {}};
  const auto failed = marker("sniffer_attack_failed", spec.name);
  std::vector<TargetSpec> others;
  for (const auto& t : ctx.network)
    if (t.name != spec.name) others.push_back(t);
  if (!peer_compromisable(**it, others)) return impossible(std::move(out), failed);

  PerceptBatch loot;
  for (const auto& c : spec.credentials)
    loot.push_back(percept("credential", {Term::atom(c.service), Term::string(c.secret)}, spec.name));
  loot.push_back(percept("sniffed", {Term::atom(peer_name)}, spec.name));
  return chance(std::move(out), rng, th.sniffer, Privilege::User, std::move(loot), failed);
}

AttackOutcome social(const TargetSpec& spec, const ActionRequest& r, RunRng& rng) {
  expect_arity(r, 0);
  AttackOutcome out{r.action, false, std::nullopt, std::nullopt, {}};
  const auto failed = marker("social_attack_failed", spec.name);
  if (spec.staff.empty()) return impossible(std::move(out), failed);
  auto weakest = std::max_element(spec.staff.begin(), spec.staff.end(), [](const StaffSpec& a, const StaffSpec& b) {
    return a.susceptibility < b.susceptibility;
  });
  return chance(std::move(out), rng, 1.0 - weakest->susceptibility, Privilege::User,
                {percept("phished", {Term::string(weakest->email)}, spec.name)}, failed);
}

}  // namespace

std::string_view to_string(VulnKind k) {
  switch (k) {
    case VulnKind::Remote: return "remote";
    case VulnKind::Local: return "local";
    case VulnKind::Sqli: return "sqli";
  }
  return "remote";
}

const VulnSpec* TargetSpec::find_vulnerability(std::string_view id) const {
  auto it = std::find_if(vulnerabilities.begin(), vulnerabilities.end(), [&](const VulnSpec& v) { return v.id == id; });
  return it == vulnerabilities.end() ? nullptr : &*it;
}

const CredentialSpec* TargetSpec::find_credential(std::string_view service) const {
  auto it =
      std::find_if(credentials.begin(), credentials.end(), [&](const CredentialSpec& c) { return c.service == service; });
  return it == credentials.end() ? nullptr : &*it;
}

bool TargetSpec::has_vulnerability_of(VulnKind kind) const {
  return std::any_of(vulnerabilities.begin(), vulnerabilities.end(), [&](const VulnSpec& v) { return v.kind == kind; });
}

const TargetSpec* Scenario::find_target(std::string_view name) const {
  auto it = std::find_if(targets.begin(), targets.end(), [&](const TargetSpec& t) { return t.name == name; });
  return it == targets.end() ? nullptr : &*it;
}

std::vector<const TargetSpec*> Scenario::subnet_peers(const TargetSpec& target) const {
  std::vector<const TargetSpec*> out;
  if (target.subnet.empty()) return out;
  for (const auto& t : targets)
    if (t.name != target.name && t.subnet == target.subnet) out.push_back(&t);
  return out;
}

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

Scenario load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("$", "scenario must be a JSON object");

  Scenario sc;
  if (doc.contains("name")) sc.name = get_string(doc.at("name"), "name");
  if (doc.contains("agent_name")) sc.agent_name = get_atom(doc.at("agent_name"), "agent_name");
  if (doc.contains("agent")) sc.agent_program = get_string(doc.at("agent"), "agent");
  if (doc.contains("seed")) sc.seed = get_u64(doc.at("seed"), "seed");
  if (doc.contains("max_cycles")) sc.max_cycles = get_u64(doc.at("max_cycles"), "max_cycles");
  if (sc.max_cycles == 0) throw ConfigError("max_cycles", "must be positive");

  if (doc.contains("thresholds")) {
    const auto& th = doc.at("thresholds");
    if (!th.is_object()) throw ConfigError("thresholds", "expected an object");
    const std::pair<const char*, double*> fields[] = {{"password", &sc.thresholds.password},
                                                      {"bof_remote", &sc.thresholds.bof_remote},
                                                      {"bof_local", &sc.thresholds.bof_local},
                                                      {"sqli", &sc.thresholds.sqli},
                                                      {"sniffer", &sc.thresholds.sniffer}};
    for (const auto& [key, value] : th.items()) {
      auto f = std::find_if(std::begin(fields), std::end(fields), [&](const auto& p) { return key == p.first; });
      if (f == std::end(fields)) throw ConfigError("thresholds." + key, "unknown attack family");
      *f->second = get_unit(value, "thresholds." + key);
    }
  }

  if (doc.contains("priorities")) {
    const auto& pr = doc.at("priorities");
    if (!pr.is_object()) throw ConfigError("priorities", "expected an object");
    for (const auto& [key, value] : pr.items()) {
      if (!value.is_number_integer()) throw ConfigError("priorities." + key, "expected an integer");
      sc.priorities[key] = value.get<int>();
    }
  }

  const auto& targets = get_array(require(doc, "targets", "$"), "targets");
  if (targets.empty()) throw ConfigError("targets", "at least one target is required");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    std::string p = "targets[" + std::to_string(i) + "]";
    TargetSpec t = parse_target(targets[i], p);
    if (sc.find_target(t.name)) throw ConfigError(p + ".name", "duplicate target name '" + t.name + "'");
    sc.targets.push_back(std::move(t));
  }
  return sc;
}

std::string serialize_scenario(const Scenario& sc) {
  nlohmann::ordered_json out;
  out["name"] = sc.name;
  out["agent_name"] = sc.agent_name;
  out["agent"] = sc.agent_program;
  out["seed"] = sc.seed;
  out["max_cycles"] = sc.max_cycles;
  out["thresholds"] = {{"password", sc.thresholds.password},
                       {"bof_remote", sc.thresholds.bof_remote},
                       {"bof_local", sc.thresholds.bof_local},
                       {"sqli", sc.thresholds.sqli},
                       {"sniffer", sc.thresholds.sniffer}};
  out["priorities"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : sc.priorities) out["priorities"][k] = v;
  out["targets"] = nlohmann::ordered_json::array();
  for (const auto& t : sc.targets) out["targets"].push_back(target_to_json(t));
  return out.dump(2) + "\n";
}

RunRng::RunRng(std::uint64_t seed, std::vector<double> scripted)
    : engine_(seed), scripted_(scripted.begin(), scripted.end()) {}

double RunRng::next() {
  ++draws_;
  if (!scripted_.empty()) {
    double u = scripted_.front();
    scripted_.pop_front();
    return u;
  }
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

PerceptBatch handle_probe(const TargetSpec& spec, ProbeFacet facet) {
  PerceptBatch out;
  switch (facet) {
    case ProbeFacet::Os:
      out.push_back(percept("ostype", {Term::atom(spec.os)}, spec.name));
      break;
    case ProbeFacet::Port: {
      std::vector<int> ports = spec.ports;
      std::sort(ports.begin(), ports.end());
      for (int p : ports) out.push_back(percept("port", {Term::number(p)}, spec.name));
      break;
    }
    case ProbeFacet::Service: {
      std::set<std::string> names;
      for (const auto& s : spec.services) names.insert(s.name);
      for (const auto& n : names) out.push_back(percept("service", {Term::atom(n)}, spec.name));
      break;
    }
    case ProbeFacet::Vulnerability: {
      std::set<std::string> ids;
      for (const auto& v : spec.vulnerabilities) ids.insert(v.id);
      for (const auto& id : ids) out.push_back(percept("vulnerability", {Term::atom(id)}, spec.name));
      break;
    }
    case ProbeFacet::Email: {
      std::set<std::string> emails;
      for (const auto& s : spec.staff) emails.insert(s.email);
      for (const auto& e : emails) out.push_back(percept("email", {Term::string(e)}, spec.name));
      break;
    }
  }
  return out;
}

AttackOutcome resolve_attack(const TargetSpec& spec, const ActionRequest& request, RunRng& rng,
                             const Thresholds& thresholds, const AttackContext& context) {
  if (request.action == "bof_attack") return bof(spec, request, rng, thresholds, context);
  if (request.action == "sqli_attack") return sqli(spec, request, rng, thresholds);
  if (request.action == "password_attack") return password(spec, request, rng, thresholds);
  if (request.action == "sniffer_attack") return sniffer(spec, request, rng, thresholds, context);
  if (request.action == "social_attack") return social(spec, request, rng);
  throw PreconditionUnmet(request.action + " is not an attack");
}

bool peer_compromisable(const TargetSpec& peer, std::span<const TargetSpec> network) {
  std::set<std::string> seen{peer.name};
  std::vector<const TargetSpec*> frontier{&peer};
  while (!frontier.empty()) {
    const TargetSpec* t = frontier.back();
    frontier.pop_back();
    if (direct_weakness(*t)) return true;
    if (t->subnet.empty()) continue;
    for (const auto& other : network)
      if (other.subnet == t->subnet && seen.insert(other.name).second) frontier.push_back(&other);
  }
  return false;
}

}  // namespace bdipt
