//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_CONFIG_HPP_
#define MOLFORGE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "molforge/evolve.hpp"
#include "molforge/fitness.hpp"
#include "molforge/genesis.hpp"

namespace molforge {

struct ElementOverride {
  std::optional<int> valence;
  std::optional<double> weight;
};

struct ApiConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
};

// Everything a run depends on. Texts (fragments, leads, target) are kept as
// written; build_context() parses them.
struct RunConfig {
  std::uint64_t seed = 0;
  std::optional<std::vector<std::string>> elements;  // absent: the organic set
  std::map<std::string, ElementOverride> element_overrides;
  std::vector<std::string> fragments;
  std::vector<std::string> leads;

  ValidityRules gen_rules;
  double atom_vs_fragment_pct = 70.0;
  double growth_stop_pct = 20.0;
  int max_attempts = 100;

  EvolveParams evolve;

  std::string target;
  double violation_penalty = 0.5;
  std::optional<ValidityRules> fitness_rules;  // absent: gen_rules

  std::optional<InteractionConfig> interaction;
  std::optional<double> interaction_timeout_s;  // absent: wait forever

  std::filesystem::path archive_path = "molforge-run.ndjson";
  std::optional<ApiConfig> api;
};

// Field-level checks only. Errors are kConfigError with a message that starts
// with the offending field path, e.g. "evolve.elitism: ...".
RunConfig parse_run_config(const nlohmann::json &j);
// kIOFailure when unreadable, kConfigError when not JSON or invalid.
RunConfig load_run_config(const std::filesystem::path &path);

// Canonical form: every field present, fixed key order.
nlohmann::ordered_json to_json(const RunConfig &cfg);

// "run-" + 16 hex digits of a hash of the canonical form (archive_path and
// api excluded, so moving the output does not change the id).
std::string run_id_for(const RunConfig &cfg);

// The parsed, cross-checked pieces a run needs.
struct RunContext {
  GenSpec spec;
  FitnessConfig fitness;
  std::vector<std::string> leads;  // canonical genomes
};

// Parses every text and checks cross-field constraints; kConfigError with a
// field path on failure.
RunContext build_context(const RunConfig &cfg);

} // namespace molforge

#endif // MOLFORGE_CONFIG_HPP_
