//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/config.hpp"

#include <limits>

#include <cstdio>
#include <fstream>
#include <set>

#include "molforge/error.hpp"
#include "molforge/exsmiles.hpp"

namespace molforge {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &what) {
  throw Error(ErrorCode::kConfigError, path + ": " + what);
}

std::string join(const std::string &path, const std::string &key) {
  return path.empty() ? key : path + "." + key;
}

// Typed access to one JSON object; remembers which keys were read so unknown
// keys (usually typos) can be reported.
class Fields {
public:
  Fields(const json &j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string &key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json &raw(const std::string &key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string path(const std::string &key) const { return join(path_, key); }

  template <typename T> std::optional<T> opt(const std::string &key) {
    if (!has(key))
      return std::nullopt;
    return convert<T>(j_.at(key), path(key));
  }

  template <typename T> T get(const std::string &key, T fallback) {
    return opt<T>(key).value_or(std::move(fallback));
  }

  template <typename T> T required(const std::string &key) {
    if (!has(key))
      fail(path(key), "is required");
    return convert<T>(j_.at(key), path(key));
  }

  void finish() const {
    for (const auto &[key, value] : j_.items())
      if (!seen_.count(key))
        fail(join(path_, key), "unknown field");
  }

  template <typename T> static T convert(const json &v, const std::string &path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean())
        fail(path, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        fail(path, "expected a non-negative integer");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer())
        fail(path, "expected an integer");
      if (v.is_number_unsigned() ? v.get<std::uint64_t>() > std::uint64_t(std::numeric_limits<T>::max())
                                 : (v.get<std::int64_t>() < std::numeric_limits<T>::min() ||
                                    v.get<std::int64_t>() > std::numeric_limits<T>::max()))
        fail(path, "out of range");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number())
        fail(path, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string())
        fail(path, "expected a string");
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      if (!v.is_array())
        fail(path, "expected an array of strings");
      for (std::size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_string())
          fail(path + "[" + std::to_string(i) + "]", "expected a string");
    }
    try {
      return v.get<T>();
    } catch (const json::exception &) {
      fail(path, "out of range");
    }
  }

private:
  const json &j_;
  std::string path_;
  std::set<std::string> seen_;
};

ValidityRules parse_rules(const json &j, const std::string &path, ValidityRules rules) {
  Fields f(j, path);
  rules.min_atoms = f.get("min_atoms", rules.min_atoms);
  rules.max_atoms = f.get("max_atoms", rules.max_atoms);
  rules.max_weight = f.get("max_weight", rules.max_weight);
  f.finish();
  rules.require_complete = true;
  try {
    check_rules(rules);
  } catch (const Error &e) {
    fail(path, e.what());
  }
  return rules;
}

ordered_json rules_json(const ValidityRules &r) {
  return {{"min_atoms", r.min_atoms}, {"max_atoms", r.max_atoms}, {"max_weight", r.max_weight}};
}

void check_pct(double v, const std::string &path) {
  if (!(v >= 0.0 && v <= 100.0))
    fail(path, "must lie in [0, 100]");
}

} // namespace

RunConfig parse_run_config(const json &j) {
  RunConfig cfg;
  Fields root(j, "");
  cfg.seed = root.required<std::uint64_t>("seed");
  cfg.elements = root.opt<std::vector<std::string>>("elements");

  if (root.has("element_overrides")) {
    const auto &overrides = root.raw("element_overrides");
    if (!overrides.is_object())
      fail("element_overrides", "expected an object keyed by element symbol");
    for (const auto &[symbol, value] : overrides.items()) {
      Fields f(value, "element_overrides." + symbol);
      ElementOverride o;
      o.valence = f.opt<int>("valence");
      o.weight = f.opt<double>("weight");
      f.finish();
      cfg.element_overrides[symbol] = o;
    }
  }
  cfg.fragments = root.get<std::vector<std::string>>("fragments", {});
  cfg.leads = root.get<std::vector<std::string>>("leads", {});

  if (root.has("gen")) {
    Fields f(root.raw("gen"), "gen");
    if (f.has("rules"))
      cfg.gen_rules = parse_rules(f.raw("rules"), "gen.rules", cfg.gen_rules);
    cfg.atom_vs_fragment_pct = f.get("atom_vs_fragment_pct", cfg.atom_vs_fragment_pct);
    cfg.growth_stop_pct = f.get("growth_stop_pct", cfg.growth_stop_pct);
    cfg.max_attempts = f.get("max_attempts", cfg.max_attempts);
    f.finish();
    check_pct(cfg.atom_vs_fragment_pct, "gen.atom_vs_fragment_pct");
    check_pct(cfg.growth_stop_pct, "gen.growth_stop_pct");
    if (cfg.max_attempts < 1)
      fail("gen.max_attempts", "must be >= 1");
  }

  if (root.has("evolve")) {
    Fields f(root.raw("evolve"), "evolve");
    auto &e = cfg.evolve;
    e.population_size = f.get("population_size", e.population_size);
    e.iterations = f.get("iterations", e.iterations);
    e.mutation_rate_pct = f.get("mutation_rate_pct", e.mutation_rate_pct);
    e.crossover_rate_pct = f.get("crossover_rate_pct", e.crossover_rate_pct);
    if (auto name = f.opt<std::string>("selection_method")) {
      auto m = selection_method_from_string(*name);
      if (!m)
        fail(f.path("selection_method"), "unknown method '" + *name + "'");
      e.selection_method = *m;
    }
    e.tournament_size = f.get("tournament_size", e.tournament_size);
    e.sample_size = f.get("sample_size", e.sample_size);
    e.elitism = f.get("elitism", e.elitism);
    e.max_op_attempts = f.get("max_op_attempts", e.max_op_attempts);
    f.finish();
  }
  try {
    check_evolve_params(cfg.evolve);
  } catch (const Error &e) {
    fail("evolve", e.what());
  }

  {
    if (!root.has("fitness"))
      fail("fitness", "is required");
    Fields f(root.raw("fitness"), "fitness");
    cfg.target = f.required<std::string>("target");
    cfg.violation_penalty = f.get("violation_penalty", cfg.violation_penalty);
    if (f.has("rules"))
      cfg.fitness_rules = parse_rules(f.raw("rules"), "fitness.rules", cfg.gen_rules);
    f.finish();
    if (!(cfg.violation_penalty > 0.0 && cfg.violation_penalty <= 1.0))
      fail("fitness.violation_penalty", "must lie in (0, 1]");
  }

  if (root.has("interaction")) {
    Fields f(root.raw("interaction"), "interaction");
    InteractionConfig ic;
    ic.interval_generations = f.get("interval_generations", ic.interval_generations);
    if (f.has("strategy")) {
      Fields s(f.raw("strategy"), "interaction.strategy");
      const auto type = s.required<std::string>("type");
      auto kind = display_kind_from_string(type);
      if (!kind)
        fail(s.path("type"), "unknown strategy '" + type + "'");
      ic.strategy.kind = *kind;
      ic.strategy.param = s.get("param", 0);
      s.finish();
    }
    if (f.has("score_scale")) {
      const auto &scale = f.raw("score_scale");
      if (!scale.is_array())
        fail("interaction.score_scale", "expected an array");
      ic.score_scale.clear();
      for (std::size_t i = 0; i < scale.size(); ++i) {
        Fields l(scale[i], "interaction.score_scale[" + std::to_string(i) + "]");
        ic.score_scale.push_back(
            {l.required<std::string>("label"), l.required<double>("value")});
        l.finish();
      }
    }
    cfg.interaction_timeout_s = f.opt<double>("interaction_timeout_s");
    f.finish();
    try {
      check_interaction_config(ic);
    } catch (const Error &e) {
      fail("interaction", e.what());
    }
    if (cfg.interaction_timeout_s && !(*cfg.interaction_timeout_s > 0))
      fail("interaction.interaction_timeout_s", "must be > 0");
    if (ic.strategy.kind != DisplayKind::kAll && ic.strategy.param > cfg.evolve.population_size)
      fail("interaction.strategy.param", "exceeds evolve.population_size");
    cfg.interaction = ic;
  }

  cfg.archive_path = root.get<std::string>("archive_path", cfg.archive_path.string());

  if (root.has("api")) {
    Fields f(root.raw("api"), "api");
    ApiConfig api;
    api.bind = f.get("bind", api.bind);
    api.port = f.get("port", api.port);
    f.finish();
    if (api.port < 0 || api.port > 65535)
      fail("api.port", "must lie in [0, 65535]");
    cfg.api = api;
  }
  root.finish();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kIOFailure, "cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

ordered_json to_json(const RunConfig &cfg) {
  ordered_json j;
  j["seed"] = cfg.seed;
  j["elements"] = cfg.elements ? ordered_json(*cfg.elements) : ordered_json(nullptr);
  ordered_json overrides = ordered_json::object();
  for (const auto &[symbol, o] : cfg.element_overrides) {
    ordered_json e = ordered_json::object();
    if (o.valence)
      e["valence"] = *o.valence;
    if (o.weight)
      e["weight"] = *o.weight;
    overrides[symbol] = e;
  }
  j["element_overrides"] = overrides;
  j["fragments"] = cfg.fragments;
  j["leads"] = cfg.leads;
  j["gen"] = {{"rules", rules_json(cfg.gen_rules)},
              {"atom_vs_fragment_pct", cfg.atom_vs_fragment_pct},
              {"growth_stop_pct", cfg.growth_stop_pct},
              {"max_attempts", cfg.max_attempts}};
  const auto &e = cfg.evolve;
  j["evolve"] = {{"population_size", e.population_size},
                 {"iterations", e.iterations},
                 {"mutation_rate_pct", e.mutation_rate_pct},
                 {"crossover_rate_pct", e.crossover_rate_pct},
                 {"selection_method", to_string(e.selection_method)},
                 {"tournament_size", e.tournament_size},
                 {"sample_size", e.sample_size},
                 {"elitism", e.elitism},
                 {"max_op_attempts", e.max_op_attempts}};
  j["fitness"] = {{"target", cfg.target},
                  {"violation_penalty", cfg.violation_penalty},
                  {"rules", rules_json(cfg.fitness_rules.value_or(cfg.gen_rules))}};
  if (cfg.interaction) {
    const auto &ic = *cfg.interaction;
    ordered_json scale = ordered_json::array();
    for (const auto &l : ic.score_scale)
      scale.push_back({{"label", l.label}, {"value", l.value}});
    j["interaction"] = {
        {"interval_generations", ic.interval_generations},
        {"strategy", {{"type", to_string(ic.strategy.kind)}, {"param", ic.strategy.param}}},
        {"score_scale", scale},
        {"interaction_timeout_s", cfg.interaction_timeout_s
                                      ? ordered_json(*cfg.interaction_timeout_s)
                                      : ordered_json(nullptr)}};
  } else {
    j["interaction"] = nullptr;
  }
  j["archive_path"] = cfg.archive_path.string();
  j["api"] = cfg.api ? ordered_json{{"bind", cfg.api->bind}, {"port", cfg.api->port}}
                     : ordered_json(nullptr);
  return j;
}

std::string run_id_for(const RunConfig &cfg) {
  auto j = to_json(cfg);
  j.erase("archive_path");
  j.erase("api");
  // FNV-1a, 64-bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "run-%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunContext build_context(const RunConfig &cfg) {
  RunContext ctx;
  auto &table = ctx.spec.table;

  for (const auto &[symbol, o] : cfg.element_overrides) {
    const std::string path = "element_overrides." + symbol;
    ElementInfo info;
    if (table.contains(symbol))
      info = table.info(symbol);
    else if (!o.valence || !o.weight)
      fail(path, "a new element needs both valence and weight");
    else
      info.enabled = false;
    if (o.valence)
      info.valence = *o.valence;
    if (o.weight)
      info.atomic_weight = *o.weight;
    try {
      table.set(symbol, info);
    } catch (const Error &e) {
      fail(path, e.what());
    }
  }
  if (cfg.elements) {
    for (std::size_t i = 0; i < cfg.elements->size(); ++i)
      if (!table.contains((*cfg.elements)[i]))
        fail("elements[" + std::to_string(i) + "]", "unknown element '" + (*cfg.elements)[i] + "'");
    table.enable_only(*cfg.elements);
  }
  if (table.heavy_elements().empty())
    fail("elements", "no heavy element enabled");

  try {
    ctx.spec.fragments = load_fragments(table, cfg.fragments);
  } catch (const ListParseError &e) {
    fail("fragments[" + std::to_string(e.index()) + "]", e.what());
  } catch (const Error &e) {
    fail("fragments", e.what());
  }
  ctx.spec.rules = cfg.gen_rules;
  ctx.spec.atom_vs_fragment_pct = cfg.atom_vs_fragment_pct;
  ctx.spec.growth_stop_pct = cfg.growth_stop_pct;
  ctx.spec.max_attempts = cfg.max_attempts;
  try {
    check_gen_spec(ctx.spec);
  } catch (const Error &e) {
    fail("gen", e.what());
  }

  for (std::size_t i = 0; i < cfg.leads.size(); ++i) {
    const std::string path = "leads[" + std::to_string(i) + "]";
    try {
      const auto g = exsmiles::parse(table, cfg.leads[i]);
      if (!validate(table, ctx.spec.rules, g).valid())
        fail(path, "lead violates gen.rules or is incomplete");
      ctx.leads.push_back(exsmiles::serialize(g));
    } catch (const ParseError &e) {
      fail(path, e.what());
    }
  }

  ctx.fitness.target = cfg.target;
  ctx.fitness.violation_penalty = cfg.violation_penalty;
  ctx.fitness.rules = cfg.fitness_rules.value_or(cfg.gen_rules);
  try {
    check_fitness_config(table, ctx.fitness);
  } catch (const ParseError &e) {
    fail("fitness.target", e.what());
  } catch (const Error &e) {
    fail("fitness", e.what());
  }
  return ctx;
}

} // namespace molforge
