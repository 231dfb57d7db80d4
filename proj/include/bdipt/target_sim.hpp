#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bdipt/attack.hpp"
#include "bdipt/belief_base.hpp"

namespace bdipt {

enum class VulnKind : unsigned char { Remote, Local, Sqli };

std::string_view to_string(VulnKind k);

struct ServiceSpec {
  int port = 0;
  std::string name;
  friend bool operator==(const ServiceSpec&, const ServiceSpec&) = default;
};

struct VulnSpec {
  std::string id;
  VulnKind kind = VulnKind::Remote;
  friend bool operator==(const VulnSpec&, const VulnSpec&) = default;
};

struct CredentialSpec {
  std::string service;
  std::string secret;
  friend bool operator==(const CredentialSpec&, const CredentialSpec&) = default;
};

struct StaffSpec {
  std::string email;
  double susceptibility = 0.15;
  friend bool operator==(const StaffSpec&, const StaffSpec&) = default;
};

/// A simulated host.
struct TargetSpec {
  std::string name;
  std::string os;
  std::vector<int> ports;
  std::vector<ServiceSpec> services;
  std::vector<VulnSpec> vulnerabilities;
  std::vector<CredentialSpec> credentials;
  std::string subnet;
  std::vector<StaffSpec> staff;

  const VulnSpec* find_vulnerability(std::string_view id) const;
  const CredentialSpec* find_credential(std::string_view service) const;
  bool has_vulnerability_of(VulnKind kind) const;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

/// Per-family success thresholds: an attack succeeds iff its draw u >= threshold.
/// Only password, bof_remote and bof_local are calibrated from the reference
/// simulations; sqli and sniffer are configurable extensions.
struct Thresholds {
  double password = 0.8;
  double bof_remote = 0.5;
  double bof_local = 0.3;
  double sqli = 0.4;
  double sniffer = 0.6;
  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct Scenario {
  std::string name = "scenario";
  std::string agent_name = "bdi_agent";
  std::string agent_program;  // path, informational; the CLI takes --agent
  std::vector<TargetSpec> targets;
  Thresholds thresholds;
  std::map<std::string, int> priorities;  // overrides on top of the defaults
  std::uint64_t seed = 0;
  std::uint64_t max_cycles = 10000;

  const TargetSpec* find_target(std::string_view name) const;
  /// Other targets sharing `target`'s subnet, in declaration order.
  std::vector<const TargetSpec*> subnet_peers(const TargetSpec& target) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  /// JSON-pointer-like path of the offending field, e.g. "targets[0].ports".
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Parses and validates a scenario document (JSON).
///
/// {
///   "name": "table2", "agent_name": "bdi_agent", "agent": "agents/pentest.asl",
///   "seed": 42, "max_cycles": 10000,
///   "thresholds": {"password": 0.8, "bof_remote": 0.5, "bof_local": 0.3, "sqli": 0.4, "sniffer": 0.6},
///   "priorities": {"buffer_overflow": 30},
///   "targets": [{
///     "name": "target", "os": "linux", "ports": [80, 22, 3306],
///     "services": [{"port": 80, "name": "nginx"}],
///     "vulnerabilities": [{"id": "cve_remote", "kind": "remote"}],
///     "credentials": [{"service": "ssh", "secret": "456"}],
///     "subnet": "lan0",
///     "staff": [{"email": "admin@corp.example", "susceptibility": 0.15}]
///   }]
/// }
///
/// Missing thresholds take the defaults above.
Scenario load_scenario(std::string_view text);
std::string serialize_scenario(const Scenario& scenario);

/// Seeded uniform stream on [0,1): std::mt19937_64 (sequence fixed by the
/// C++ standard) mapped through the top 53 bits. Scripted draws, when given,
/// are served first.
class RunRng {
 public:
  explicit RunRng(std::uint64_t seed, std::vector<double> scripted = {});

  double next();
  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::deque<double> scripted_;
  std::uint64_t draws_ = 0;
};

enum class ProbeFacet : unsigned char { Os, Port, Service, Vulnerability, Email };

/// Facet literals, each annotated source(<target>), in sorted term order.
PerceptBatch handle_probe(const TargetSpec& spec, ProbeFacet facet);

struct AttackContext {
  Privilege current = Privilege::None;
  std::span<const TargetSpec> network;  // for subnet peer lookup
};

/// Adjudicates one attack against the spec. Consumes exactly one draw for a
/// launched chance-based attack and none when the attack is structurally
/// impossible (missing vulnerability, credential, staff or weak peer).
/// Throws PreconditionUnmet / NoSubnetPeer for requests that cannot launch.
AttackOutcome resolve_attack(const TargetSpec& spec, const ActionRequest& request, RunRng& rng,
                             const Thresholds& thresholds, const AttackContext& context = {});

/// Whether `peer` can be breached directly, or through one of its own
/// subnet peers.
bool peer_compromisable(const TargetSpec& peer, std::span<const TargetSpec> network);

}  // namespace bdipt
