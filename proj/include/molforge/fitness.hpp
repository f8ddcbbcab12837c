//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_FITNESS_HPP_
#define MOLFORGE_FITNESS_HPP_

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "molforge/chem_model.hpp"
#include "molforge/error.hpp"
#include "molforge/population.hpp"
#include "molforge/rng.hpp"

namespace molforge {

enum class FeatureKind { kElem, kHCount, kBondTriple };

// (Elem, e), (HCount, e) or (BondTriple, e1, order, e2) with e1 <= e2.
struct FeatureKey {
  FeatureKind kind = FeatureKind::kElem;
  std::string first;
  int order = 0;
  std::string second;

  friend auto operator<=>(const FeatureKey &, const FeatureKey &) = default;
};

using Fingerprint = std::map<FeatureKey, int>;

Fingerprint fingerprint(const MoleculeGraph &g);

// Multiset Tanimoto; 1 when both are empty.
double similarity(const Fingerprint &a, const Fingerprint &b);

struct FitnessConfig {
  std::string target;  // expanded SMILES, complete molecule
  ValidityRules rules;
  double violation_penalty = 0.5;  // per violated rule class
};

// Throws kConfigError (bad penalty / incomplete target) or ParseError.
void check_fitness_config(const ElementTable &table, const FitnessConfig &cfg);

// Similarity to the target, halved (by default) once for an atom-count
// violation and once for a weight violation. The target fingerprint is
// computed once.
class FitnessEvaluator {
public:
  FitnessEvaluator(const ElementTable &table, FitnessConfig cfg);

  double operator()(const MoleculeGraph &g) const;
  double similarity_to_target(const MoleculeGraph &g) const;

  const FitnessConfig &config() const { return cfg_; }
  const MoleculeGraph &target() const { return target_; }

private:
  ElementTable table_;
  FitnessConfig cfg_;
  MoleculeGraph target_;
  Fingerprint target_fp_;
};

double evaluate(const MoleculeGraph &g, const FitnessConfig &cfg, const ElementTable &table);

// --- user interaction ------------------------------------------------------

enum class DisplayKind { kAll, kTopN, kBanding, kPartialSequential, kPartialRandom };

std::string_view to_string(DisplayKind kind);
std::optional<DisplayKind> display_kind_from_string(std::string_view name);

struct DisplayStrategy {
  DisplayKind kind = DisplayKind::kAll;
  int param = 0;  // n, bands or step; unused for All
};

struct ScoreLevel {
  std::string label;
  double value = 0;
};

// Excellent 1, Good 0.75, Average 0.5, Poor 0.25, Dreadful 0.
std::vector<ScoreLevel> default_score_scale();

struct InteractionConfig {
  int interval_generations = 10;
  DisplayStrategy strategy;
  std::vector<ScoreLevel> score_scale = default_score_scale();
};

// Throws kConfigError.
void check_interaction_config(const InteractionConfig &cfg);

struct InteractionSession {
  int generation = 0;
  std::vector<ChromosomeId> displayed;
  std::map<ChromosomeId, double> pending_scores;
  // Banding only: bands[b] holds the members represented by displayed[b].
  std::vector<std::vector<ChromosomeId>> bands;
};

// Throws kStrategyParamTooLarge when n / bands / step exceeds the population.
InteractionSession select_for_display(const Population &pop, const InteractionConfig &cfg,
                                      Rng &rng);

// Checks one score against the session and scale: kUnknownChromosomeId when
// the id was not displayed, kScoreOffScale when the value is not a level.
void check_user_score(const InteractionSession &session, const InteractionConfig &cfg,
                      ChromosomeId id, double score);

// Applies pending_scores: replacement for all strategies except Banding, which
// multiplies every member of the representative's band.
Population merge_user_scores(const Population &pop, const InteractionSession &session,
                             const InteractionConfig &cfg);

} // namespace molforge

#endif // MOLFORGE_FITNESS_HPP_
