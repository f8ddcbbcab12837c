//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_POPULATION_HPP_
#define MOLFORGE_POPULATION_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "molforge/chem_model.hpp"

namespace molforge {

using ChromosomeId = std::int64_t;

// One candidate. `genome` is the canonical Expanded SMILES and `graph` is
// parse(genome), so graph indices follow text order.
struct Chromosome {
  std::string genome;
  MoleculeGraph graph;
  double fitness = 0.0;
  std::optional<double> user_score;
  ChromosomeId id = 0;
  std::vector<ChromosomeId> parent_ids;
  std::vector<std::string> op_log;
};

// Canonicalizes the graph and fills genome/graph; other fields default.
Chromosome make_chromosome(const ElementTable &table, const MoleculeGraph &graph,
                           ChromosomeId id);

struct Population {
  std::vector<Chromosome> members;
  int generation = 0;
  ChromosomeId next_id = 0;  // ids are unique within a run

  ChromosomeId allocate_id() { return next_id++; }
  const Chromosome *find(ChromosomeId id) const;
  Chromosome *find(ChromosomeId id);
};

// Member indices ordered by fitness descending, ties by ascending id.
std::vector<std::size_t> fitness_order(const Population &pop);

} // namespace molforge

#endif // MOLFORGE_POPULATION_HPP_
