//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/genesis.hpp"

#include <algorithm>

#include "molforge/exsmiles.hpp"

namespace molforge {

std::vector<OpenSite> open_sites(const MoleculeGraph &g) {
  std::vector<OpenSite> out;
  for (int i = 0; i < static_cast<int>(g.atom_count()); ++i)
    if (int fv = g.free_valence(i); fv > 0)
      out.push_back({i, fv});
  return out;
}

ListParseError::ListParseError(const ParseError &cause, std::size_t index)
    : ParseError(cause.kind(), cause.position(),
                 "entry " + std::to_string(index) + ": " + cause.what()),
      index_(index) {}

std::vector<Fragment> load_fragments(const ElementTable &table,
                                     const std::vector<std::string> &texts) {
  std::vector<Fragment> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Fragment f;
    try {
      f.graph = exsmiles::parse(table, texts[i]);
    } catch (const ParseError &e) {
      throw ListParseError(e, i);
    }
    f.open_sites = open_sites(f.graph);
    if (f.open_sites.empty())
      throw Error(ErrorCode::kNoOpenSites,
                  "fragment " + std::to_string(i) + " '" + texts[i] +
                      "' has no open valence to attach through");
    f.source_text = texts[i];
    out.push_back(std::move(f));
  }
  return out;
}

void check_gen_spec(const GenSpec &spec) {
  check_rules(spec.rules);
  auto pct = [](double p) { return p >= 0.0 && p <= 100.0; };
  if (!pct(spec.atom_vs_fragment_pct) || !pct(spec.growth_stop_pct))
    throw Error(ErrorCode::kInvalidArgument, "percentages must lie in [0, 100]");
  if (spec.max_attempts < 1)
    throw Error(ErrorCode::kInvalidArgument, "max_attempts must be >= 1");
  if (spec.table.heavy_elements().empty() && spec.fragments.empty())
    throw Error(ErrorCode::kInvalidArgument,
                "generation needs an enabled heavy element or a fragment");
}

MoleculeGraph random_unit(const GenSpec &spec, Rng &rng) {
  const auto elements = spec.table.heavy_elements();
  const bool have_atoms = !elements.empty();
  const bool have_fragments = !spec.fragments.empty();
  if (!have_atoms && !have_fragments)
    throw Error(ErrorCode::kInvalidArgument, "empty generation vocabulary");
  const bool use_atom =
      !have_fragments || (have_atoms && rng.chance(spec.atom_vs_fragment_pct));
  if (use_atom) {
    MoleculeGraph g;
    g.add_atom(spec.table, elements[rng.index(elements.size())], 0);
    return g;
  }
  return spec.fragments[rng.index(spec.fragments.size())].graph;
}

int attach_unit(MoleculeGraph &g, int site, const MoleculeGraph &unit, int unit_site,
                int order) {
  const int offset = g.append(unit);
  g.add_bond(site, offset + unit_site, order);
  return offset;
}

double capped_weight(const ElementTable &table, const MoleculeGraph &g) {
  const double h = table.atomic_weight("H");
  double total = 0;
  for (int i = 0; i < static_cast<int>(g.atom_count()); ++i) {
    const auto &a = g.atom(i);
    total += table.atomic_weight(a.element) + (a.h_count + g.free_valence(i)) * h;
  }
  return total;
}

namespace {

MoleculeGraph grow(const GenSpec &spec, Rng &rng) {
  const auto &rules = spec.rules;
  const double h_weight = spec.table.atomic_weight("H");
  MoleculeGraph g = random_unit(spec, rng);
  double weight = capped_weight(spec.table, g);

  for (;;) {
    const auto open = open_sites(g);
    if (open.empty())
      break;
    const int heavy = static_cast<int>(g.atom_count());
    if (heavy >= rules.min_atoms && rng.chance(spec.growth_stop_pct))
      break;

    const OpenSite site = open[rng.index(open.size())];
    const MoleculeGraph unit = random_unit(spec, rng);
    const auto unit_open = open_sites(unit);
    const OpenSite unit_site = unit_open[rng.index(unit_open.size())];
    const int max_order =
        std::min({3, site.free_valence, unit_site.free_valence});
    const int order = rng.between(1, max_order);

    const double next_weight =
        weight + capped_weight(spec.table, unit) - 2.0 * order * h_weight;
    if (heavy + static_cast<int>(unit.atom_count()) > rules.max_atoms ||
        next_weight > rules.max_weight)
      break;
    attach_unit(g, site.atom, unit, unit_site.atom, order);
    weight = next_weight;
  }
  g.cap_with_hydrogens();
  return g;
}

} // namespace

MoleculeGraph generate_molecule(const GenSpec &spec, Rng &rng) {
  ValidityRules complete = spec.rules;
  complete.require_complete = true;
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    MoleculeGraph g = grow(spec, rng);
    if (validate(spec.table, complete, g).valid())
      return g;
  }
  throw Error(ErrorCode::kGenerationExhausted,
              "no valid molecule after " + std::to_string(spec.max_attempts) +
                  " attempts");
}

Population initial_population(const GenSpec &spec, const std::vector<std::string> &leads,
                              int size, Rng &rng) {
  if (size < 1)
    throw Error(ErrorCode::kInvalidArgument, "population size must be >= 1");
  ValidityRules complete = spec.rules;
  complete.require_complete = true;

  Population pop;
  const std::size_t lead_count = std::min(leads.size(), static_cast<std::size_t>(size));
  for (std::size_t i = 0; i < lead_count; ++i) {
    MoleculeGraph g;
    try {
      g = exsmiles::parse(spec.table, leads[i]);
    } catch (const ParseError &e) {
      throw ListParseError(e, i);
    }
    const auto report = validate(spec.table, complete, g);
    if (!report.valid())
      throw Error(ErrorCode::kInvalidLead,
                  "lead " + std::to_string(i) + " '" + leads[i] + "' violates " +
                      to_string(report.violations.front()));
    Chromosome c = make_chromosome(spec.table, g, pop.allocate_id());
    c.op_log.push_back("lead");
    pop.members.push_back(std::move(c));
  }
  while (pop.members.size() < static_cast<std::size_t>(size)) {
    Chromosome c = make_chromosome(spec.table, generate_molecule(spec, rng),
                                   pop.allocate_id());
    c.op_log.push_back("genesis");
    pop.members.push_back(std::move(c));
  }
  return pop;
}

} // namespace molforge
