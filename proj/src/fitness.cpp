//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "molforge/error.hpp"
#include "molforge/exsmiles.hpp"

namespace molforge {

Fingerprint fingerprint(const MoleculeGraph &g) {
  Fingerprint fp;
  for (const auto &a : g.atoms()) {
    ++fp[{FeatureKind::kElem, a.element, 0, {}}];
    if (a.h_count > 0)
      fp[{FeatureKind::kHCount, a.element, 0, {}}] += a.h_count;
  }
  for (const auto &b : g.bonds()) {
    auto lo = g.atom(b.a).element, hi = g.atom(b.b).element;
    if (hi < lo)
      std::swap(lo, hi);
    ++fp[{FeatureKind::kBondTriple, lo, b.order, hi}];
  }
  return fp;
}

double similarity(const Fingerprint &a, const Fingerprint &b) {
  long lo = 0, hi = 0;
  auto ia = a.begin(), ib = b.begin();
  // Merge walk over the two sorted maps.
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      hi += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      hi += ib->second;
      ++ib;
    } else {
      lo += std::min(ia->second, ib->second);
      hi += std::max(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return hi == 0 ? 1.0 : static_cast<double>(lo) / static_cast<double>(hi);
}

void check_fitness_config(const ElementTable &table, const FitnessConfig &cfg) {
  if (!(cfg.violation_penalty > 0.0 && cfg.violation_penalty <= 1.0))
    throw Error(ErrorCode::kConfigError, "violation_penalty must lie in (0, 1]");
  check_rules(cfg.rules);
  const auto target = exsmiles::parse(table, cfg.target);
  if (!target.is_complete())
    throw Error(ErrorCode::kConfigError, "target must be a complete molecule");
}

FitnessEvaluator::FitnessEvaluator(const ElementTable &table, FitnessConfig cfg)
    : table_(table), cfg_(std::move(cfg)) {
  check_fitness_config(table_, cfg_);
  target_ = exsmiles::parse(table_, cfg_.target);
  target_fp_ = fingerprint(target_);
}

double FitnessEvaluator::similarity_to_target(const MoleculeGraph &g) const {
  return similarity(fingerprint(g), target_fp_);
}

double FitnessEvaluator::operator()(const MoleculeGraph &g) const {
  double s = similarity_to_target(g);
  const auto report = validate(table_, cfg_.rules, g);
  if (report.has(ViolationKind::kTooFewAtoms) || report.has(ViolationKind::kTooManyAtoms))
    s *= cfg_.violation_penalty;
  if (report.has(ViolationKind::kOverWeight))
    s *= cfg_.violation_penalty;
  return std::clamp(s, 0.0, 1.0);
}

double evaluate(const MoleculeGraph &g, const FitnessConfig &cfg, const ElementTable &table) {
  return FitnessEvaluator(table, cfg)(g);
}

// --- user interaction ------------------------------------------------------

std::string_view to_string(DisplayKind kind) {
  switch (kind) {
  case DisplayKind::kAll: return "All";
  case DisplayKind::kTopN: return "TopN";
  case DisplayKind::kBanding: return "Banding";
  case DisplayKind::kPartialSequential: return "PartialSequential";
  case DisplayKind::kPartialRandom: return "PartialRandom";
  }
  return "Unknown";
}

std::optional<DisplayKind> display_kind_from_string(std::string_view name) {
  for (auto k : {DisplayKind::kAll, DisplayKind::kTopN, DisplayKind::kBanding,
                 DisplayKind::kPartialSequential, DisplayKind::kPartialRandom})
    if (to_string(k) == name)
      return k;
  return std::nullopt;
}

std::vector<ScoreLevel> default_score_scale() {
  return {{"Excellent", 1.0}, {"Good", 0.75}, {"Average", 0.5}, {"Poor", 0.25},
          {"Dreadful", 0.0}};
}

void check_interaction_config(const InteractionConfig &cfg) {
  auto fail = [](const std::string &what) { throw Error(ErrorCode::kConfigError, what); };
  if (cfg.interval_generations < 1 || cfg.interval_generations > 100)
    fail("interval_generations must lie in [1, 100]");
  if (cfg.strategy.kind != DisplayKind::kAll && cfg.strategy.param < 1)
    fail("strategy parameter must be >= 1");
  if (cfg.score_scale.empty())
    fail("score_scale must not be empty");
  std::set<double> seen;
  for (const auto &level : cfg.score_scale) {
    if (!(level.value >= 0.0 && level.value <= 1.0))
      fail("score value for '" + level.label + "' must lie in [0, 1]");
    if (!seen.insert(level.value).second)
      fail("score values must be distinct");
  }
}

InteractionSession select_for_display(const Population &pop, const InteractionConfig &cfg,
                                      Rng &rng) {
  InteractionSession session;
  session.generation = pop.generation;
  const std::size_t n = pop.members.size();
  const auto param = static_cast<std::size_t>(std::max(cfg.strategy.param, 0));
  if (cfg.strategy.kind != DisplayKind::kAll && param > n)
    throw Error(ErrorCode::kStrategyParamTooLarge,
                std::string(to_string(cfg.strategy.kind)) + " parameter " +
                    std::to_string(param) + " exceeds population size " + std::to_string(n));
  if (cfg.strategy.kind != DisplayKind::kAll && param < 1)
    throw Error(ErrorCode::kInvalidArgument, "strategy parameter must be >= 1");

  const auto ranked = fitness_order(pop);
  auto id_at = [&](std::size_t rank) { return pop.members[ranked[rank]].id; };

  switch (cfg.strategy.kind) {
  case DisplayKind::kAll:
    for (const auto &c : pop.members)
      session.displayed.push_back(c.id);
    break;
  case DisplayKind::kTopN:
    for (std::size_t r = 0; r < param; ++r)
      session.displayed.push_back(id_at(r));
    break;
  case DisplayKind::kBanding: {
    const std::size_t base = n / param, extra = n % param;
    std::size_t rank = 0;
    for (std::size_t b = 0; b < param; ++b) {
      std::vector<ChromosomeId> band;
      const std::size_t size = base + (b < extra ? 1 : 0);
      for (std::size_t k = 0; k < size; ++k)
        band.push_back(id_at(rank++));
      session.displayed.push_back(band[rng.index(band.size())]);
      session.bands.push_back(std::move(band));
    }
    break;
  }
  case DisplayKind::kPartialSequential:
    for (std::size_t r = 0; r < n; r += param)
      session.displayed.push_back(id_at(r));
    break;
  case DisplayKind::kPartialRandom:
    for (std::size_t i : rng.sample(n, param))
      session.displayed.push_back(pop.members[i].id);
    break;
  }
  return session;
}

void check_user_score(const InteractionSession &session, const InteractionConfig &cfg,
                      ChromosomeId id, double score) {
  if (std::find(session.displayed.begin(), session.displayed.end(), id) ==
      session.displayed.end())
    throw Error(ErrorCode::kUnknownChromosomeId,
                "chromosome " + std::to_string(id) + " is not on display");
  const bool on_scale =
      std::any_of(cfg.score_scale.begin(), cfg.score_scale.end(),
                  [&](const ScoreLevel &l) { return std::abs(l.value - score) < 1e-9; });
  if (!on_scale)
    throw Error(ErrorCode::kScoreOffScale,
                "score " + std::to_string(score) + " is not on the score scale");
}

Population merge_user_scores(const Population &pop, const InteractionSession &session,
                             const InteractionConfig &cfg) {
  for (const auto &[id, score] : session.pending_scores)
    check_user_score(session, cfg, id, score);
  Population out = pop;
  if (cfg.strategy.kind == DisplayKind::kBanding) {
    for (std::size_t b = 0; b < session.displayed.size() && b < session.bands.size(); ++b) {
      auto it = session.pending_scores.find(session.displayed[b]);
      if (it == session.pending_scores.end())
        continue;
      for (ChromosomeId id : session.bands[b])
        if (auto *c = out.find(id))
          c->fitness = std::clamp(c->fitness * it->second, 0.0, 1.0);
      if (auto *rep = out.find(it->first))
        rep->user_score = it->second;
    }
    return out;
  }
  for (const auto &[id, score] : session.pending_scores) {
    auto *c = out.find(id);
    if (!c)
      throw Error(ErrorCode::kUnknownChromosomeId,
                  "chromosome " + std::to_string(id) + " is not in the population");
    c->fitness = score;
    c->user_score = score;
  }
  return out;
}

} // namespace molforge
