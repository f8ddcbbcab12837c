//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/population.hpp"

#include <algorithm>
#include <numeric>

#include "molforge/exsmiles.hpp"

namespace molforge {

Chromosome make_chromosome(const ElementTable &table, const MoleculeGraph &graph,
                           ChromosomeId id) {
  Chromosome c;
  c.genome = exsmiles::serialize(graph);
  c.graph = exsmiles::parse(table, c.genome);
  c.id = id;
  return c;
}

const Chromosome *Population::find(ChromosomeId id) const {
  auto it = std::find_if(members.begin(), members.end(),
                         [id](const Chromosome &c) { return c.id == id; });
  return it == members.end() ? nullptr : &*it;
}

Chromosome *Population::find(ChromosomeId id) {
  return const_cast<Chromosome *>(std::as_const(*this).find(id));
}

std::vector<std::size_t> fitness_order(const Population &pop) {
  std::vector<std::size_t> order(pop.members.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto &a = pop.members[x], &b = pop.members[y];
    if (a.fitness != b.fitness)
      return a.fitness > b.fitness;
    return a.id < b.id;
  });
  return order;
}

} // namespace molforge
