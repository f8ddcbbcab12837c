//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_EVOLVE_HPP_
#define MOLFORGE_EVOLVE_HPP_

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>

#include "molforge/genesis.hpp"
#include "molforge/population.hpp"
#include "molforge/rng.hpp"

namespace molforge {

enum class SelectionMethod {
  kRoulette,
  kTournament,
  kRandom,
  kAttractive,
  kDifference,
  kSequential,
};

std::string_view to_string(SelectionMethod method);
std::optional<SelectionMethod> selection_method_from_string(std::string_view name);

struct EvolveParams {
  int population_size = 50;
  int iterations = 100;
  double mutation_rate_pct = 40.0;
  double crossover_rate_pct = 80.0;
  SelectionMethod selection_method = SelectionMethod::kRoulette;
  int tournament_size = 3;
  int sample_size = 5;  // Attractive / Difference
  int elitism = 1;
  int max_op_attempts = 10;
};

void check_evolve_params(const EvolveParams &params);

using SimilarityFn = std::function<double(const Chromosome &, const Chromosome &)>;
using FitnessFn = std::function<double(const MoleculeGraph &)>;

// Indices into Population::members.
struct ParentPair {
  std::size_t first = 0;
  std::size_t second = 0;
};

// One fitness-proportional draw. Non-positive entries are never chosen; the
// total must be > 0.
std::size_t roulette_draw(std::span<const double> fitness, Rng &rng);

// Throws kPopulationTooSmall for fewer than two members. `cursor` is the
// running position used by Sequential selection.
ParentPair select_parents(const Population &pop, const EvolveParams &params,
                          const SimilarityFn &similarity, std::size_t cursor, Rng &rng);

// Bonds whose removal splits the graph, each paired with the side that does
// not contain the root (the detachable unit).
struct DetachableUnit {
  int bond = 0;
  int anchor = 0;              // root-side endpoint
  std::vector<int> atoms;      // unit atoms, ascending; first is never the anchor
};

std::vector<DetachableUnit> detachable_units(const MoleculeGraph &g);

// Exchanges unit `a_unit` of `a` with unit `b_unit` of `b` (equal attachment
// bond orders required). Returns the two children, unvalidated.
std::pair<MoleculeGraph, MoleculeGraph> exchange_units(const MoleculeGraph &a,
                                                       const DetachableUnit &a_unit,
                                                       const MoleculeGraph &b,
                                                       const DetachableUnit &b_unit);

// Valence-matched subtree exchange with validity retry. Never throws for valid
// parents: on exhaustion the children are copies logged "crossover-failed".
std::pair<Chromosome, Chromosome> crossover(const Chromosome &a, const Chromosome &b,
                                            const GenSpec &spec,
                                            const EvolveParams &params,
                                            ChromosomeId &next_id, Rng &rng);

enum class MutationOp {
  kInsertAtom,
  kReplaceH,
  kRemoveAtom,
  kRemoveBondAndAtom,
  kChangeAtomToFragment,
  kSwitchAtom,
  kIncreaseBond,
  kDecreaseBond,
  kCutRing,
  kAddRing,
};

inline constexpr std::array<MutationOp, 10> kAllMutationOps = {
    MutationOp::kInsertAtom,        MutationOp::kReplaceH,
    MutationOp::kRemoveAtom,        MutationOp::kRemoveBondAndAtom,
    MutationOp::kChangeAtomToFragment, MutationOp::kSwitchAtom,
    MutationOp::kIncreaseBond,      MutationOp::kDecreaseBond,
    MutationOp::kCutRing,           MutationOp::kAddRing,
};

std::string_view to_string(MutationOp op);

// Site-explicit structural edits. Each returns nullopt when the edit does not
// apply at that site; results are hydrogen-balanced but not validated.
namespace edits {

// Splits bond (order k) with a unit bonded as u-unit[p] and unit[q]-v, both of
// order k; p may equal q.
std::optional<MoleculeGraph> insert_unit(const MoleculeGraph &g, int bond,
                                         const MoleculeGraph &unit, int p, int q);
std::optional<MoleculeGraph> replace_h(const MoleculeGraph &g, int atom,
                                       const MoleculeGraph &unit, int unit_site);
std::optional<MoleculeGraph> remove_atom(const MoleculeGraph &g, int atom);
std::optional<MoleculeGraph> remove_bond_and_atom(const MoleculeGraph &g, int atom);
std::optional<MoleculeGraph> change_atom_to_fragment(const MoleculeGraph &g, int atom,
                                                     const MoleculeGraph &fragment,
                                                     int site);
std::optional<MoleculeGraph> switch_atom(const MoleculeGraph &g, int atom,
                                         const ElementTable &table,
                                         std::string_view element);
std::optional<MoleculeGraph> increase_bond(const MoleculeGraph &g, int bond);
std::optional<MoleculeGraph> decrease_bond(const MoleculeGraph &g, int bond);
std::optional<MoleculeGraph> cut_ring(const MoleculeGraph &g, int bond);
std::optional<MoleculeGraph> add_ring(const MoleculeGraph &g, int a, int b);

} // namespace edits

// Applies one operator at a random applicable site (sites tried in random
// order until a result validates). `g` must be canonical (parsed from its
// genome) because ring markers are read off the canonical traversal.
std::optional<MoleculeGraph> apply_mutation(MutationOp op, const MoleculeGraph &g,
                                            const GenSpec &spec, Rng &rng);

// Mutation-rate gate, then operators in shuffled order until one succeeds.
// The result keeps c's id; the operator name (or "mutation-exhausted") is
// appended to op_log.
Chromosome mutate(const Chromosome &c, const GenSpec &spec, const EvolveParams &params,
                  Rng &rng);

// Elites, then selection/crossover/mutation/evaluation until the population is
// full. Returns generation + 1.
Population step_generation(const Population &pop, const EvolveParams &params,
                           const FitnessFn &fitness, const SimilarityFn &similarity,
                           const GenSpec &spec, Rng &rng);

} // namespace molforge

#endif // MOLFORGE_EVOLVE_HPP_
