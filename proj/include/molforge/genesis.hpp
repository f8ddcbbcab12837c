//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_GENESIS_HPP_
#define MOLFORGE_GENESIS_HPP_

#include <string>
#include <vector>

#include "molforge/chem_model.hpp"
#include "molforge/error.hpp"
#include "molforge/population.hpp"
#include "molforge/rng.hpp"

namespace molforge {

struct OpenSite {
  int atom = 0;
  int free_valence = 0;

  friend bool operator==(const OpenSite &, const OpenSite &) = default;
};

// Building block with open valences inferred from the structure.
struct Fragment {
  MoleculeGraph graph;
  std::vector<OpenSite> open_sites;
  std::string source_text;
};

std::vector<OpenSite> open_sites(const MoleculeGraph &g);

// Parse error raised while reading a list of texts; index() names the entry.
class ListParseError : public ParseError {
public:
  ListParseError(const ParseError &cause, std::size_t index);
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

// Throws ListParseError, or Error(kNoOpenSites) for complete fragments.
std::vector<Fragment> load_fragments(const ElementTable &table,
                                     const std::vector<std::string> &texts);

struct GenSpec {
  ElementTable table = ElementTable::organic();
  std::vector<Fragment> fragments;
  ValidityRules rules;
  double atom_vs_fragment_pct = 70.0;  // chance of a lone atom over a fragment
  double growth_stop_pct = 20.0;       // chance per step to cap once min_atoms is met
  int max_attempts = 100;
};

void check_gen_spec(const GenSpec &spec);

// A lone enabled atom (h_count 0) or a copy of a fragment, chosen per
// atom_vs_fragment_pct. Throws kInvalidArgument if the vocabulary is empty.
MoleculeGraph random_unit(const GenSpec &spec, Rng &rng);

// Appends `unit` to `g` and bonds g[site] to unit[unit_site]. Returns the
// index the unit's atom 0 received.
int attach_unit(MoleculeGraph &g, int site, const MoleculeGraph &unit, int unit_site,
                int order);

// Weight the molecule would have if every open valence were capped with H.
double capped_weight(const ElementTable &table, const MoleculeGraph &g);

// Grow-and-cap construction of a complete molecule satisfying spec.rules.
// Throws kGenerationExhausted after spec.max_attempts failed builds.
MoleculeGraph generate_molecule(const GenSpec &spec, Rng &rng);

// Leads first (verbatim, in order), then random molecules up to `size`.
// Throws ParseError, kInvalidLead, kGenerationExhausted.
Population initial_population(const GenSpec &spec, const std::vector<std::string> &leads,
                              int size, Rng &rng);

} // namespace molforge

#endif // MOLFORGE_GENESIS_HPP_
