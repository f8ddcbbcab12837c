//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/evolve.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "molforge/exsmiles.hpp"

namespace molforge {

std::string_view to_string(SelectionMethod method) {
  switch (method) {
  case SelectionMethod::kRoulette: return "Roulette";
  case SelectionMethod::kTournament: return "Tournament";
  case SelectionMethod::kRandom: return "Random";
  case SelectionMethod::kAttractive: return "Attractive";
  case SelectionMethod::kDifference: return "Difference";
  case SelectionMethod::kSequential: return "Sequential";
  }
  return "Unknown";
}

std::optional<SelectionMethod> selection_method_from_string(std::string_view name) {
  for (auto m : {SelectionMethod::kRoulette, SelectionMethod::kTournament,
                 SelectionMethod::kRandom, SelectionMethod::kAttractive,
                 SelectionMethod::kDifference, SelectionMethod::kSequential})
    if (to_string(m) == name)
      return m;
  return std::nullopt;
}

std::string_view to_string(MutationOp op) {
  switch (op) {
  case MutationOp::kInsertAtom: return "InsertAtom";
  case MutationOp::kReplaceH: return "ReplaceH";
  case MutationOp::kRemoveAtom: return "RemoveAtom";
  case MutationOp::kRemoveBondAndAtom: return "RemoveBondAndAtom";
  case MutationOp::kChangeAtomToFragment: return "ChangeAtomToFragment";
  case MutationOp::kSwitchAtom: return "SwitchAtom";
  case MutationOp::kIncreaseBond: return "IncreaseBond";
  case MutationOp::kDecreaseBond: return "DecreaseBond";
  case MutationOp::kCutRing: return "CutRing";
  case MutationOp::kAddRing: return "AddRing";
  }
  return "Unknown";
}

void check_evolve_params(const EvolveParams &p) {
  auto fail = [](const std::string &what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  auto pct = [](double v) { return v >= 0.0 && v <= 100.0; };
  if (p.population_size < 1)
    fail("population_size must be >= 1");
  if (p.iterations < 0)
    fail("iterations must be >= 0");
  if (!pct(p.mutation_rate_pct) || !pct(p.crossover_rate_pct))
    fail("rates must lie in [0, 100]");
  if (p.tournament_size < 2)
    fail("tournament_size must be >= 2");
  if (p.sample_size < 2)
    fail("sample_size must be >= 2");
  if (p.elitism < 0 || p.elitism >= p.population_size)
    fail("elitism must lie in [0, population_size)");
  if (p.max_op_attempts < 1)
    fail("max_op_attempts must be >= 1");
}

// --- selection -------------------------------------------------------------

std::size_t roulette_draw(std::span<const double> fitness, Rng &rng) {
  double total = 0;
  for (double f : fitness)
    total += std::max(f, 0.0);
  double r = rng.unit() * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    const double f = std::max(fitness[i], 0.0);
    if (f <= 0)
      continue;
    last_positive = i;
    if (r < f)
      return i;
    r -= f;
  }
  return last_positive;  // rounding at the top end
}

namespace {

bool fitter(const Chromosome &a, const Chromosome &b) {
  if (a.fitness != b.fitness)
    return a.fitness > b.fitness;
  return a.id < b.id;
}

ParentPair by_similarity(const Population &pop, const EvolveParams &params,
                         const SimilarityFn &similarity, bool closest, Rng &rng) {
  const auto sample = rng.sample(pop.members.size(),
                                 static_cast<std::size_t>(params.sample_size));
  std::optional<std::tuple<double, ChromosomeId, ChromosomeId>> best;
  ParentPair chosen;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = i + 1; j < sample.size(); ++j) {
      std::size_t x = sample[i], y = sample[j];
      if (pop.members[y].id < pop.members[x].id)
        std::swap(x, y);
      const double s = similarity(pop.members[x], pop.members[y]);
      // Maximize (or minimize) similarity, then prefer lower id pairs.
      auto key = std::make_tuple(closest ? -s : s, pop.members[x].id, pop.members[y].id);
      if (!best || key < *best) {
        best = key;
        chosen = {x, y};
      }
    }
  }
  return chosen;
}

} // namespace

ParentPair select_parents(const Population &pop, const EvolveParams &params,
                          const SimilarityFn &similarity, std::size_t cursor, Rng &rng) {
  const std::size_t n = pop.members.size();
  if (n < 2)
    throw Error(ErrorCode::kPopulationTooSmall, "selection needs at least two members");

  auto random_pair = [&] {
    const auto s = rng.sample(n, 2);
    return ParentPair{s[0], s[1]};
  };

  switch (params.selection_method) {
  case SelectionMethod::kRoulette: {
    std::vector<double> fitness(n);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      fitness[i] = pop.members[i].fitness;
      total += std::max(fitness[i], 0.0);
    }
    if (!(total > 0))
      return random_pair();
    ParentPair p{roulette_draw(fitness, rng), 0};
    p.second = roulette_draw(fitness, rng);
    for (int redraw = 0; redraw < 10 && p.second == p.first; ++redraw)
      p.second = roulette_draw(fitness, rng);
    return p;
  }
  case SelectionMethod::kTournament: {
    auto entrants = rng.sample(n, static_cast<std::size_t>(params.tournament_size));
    std::sort(entrants.begin(), entrants.end(), [&](std::size_t x, std::size_t y) {
      return fitter(pop.members[x], pop.members[y]);
    });
    return {entrants[0], entrants[1]};
  }
  case SelectionMethod::kRandom:
    return random_pair();
  case SelectionMethod::kAttractive:
    return by_similarity(pop, params, similarity, true, rng);
  case SelectionMethod::kDifference:
    return by_similarity(pop, params, similarity, false, rng);
  case SelectionMethod::kSequential: {
    const std::size_t first = cursor % n;
    std::size_t second = rng.index(n - 1);
    if (second >= first)
      ++second;
    return {first, second};
  }
  }
  return random_pair();
}

// --- crossover -------------------------------------------------------------

std::vector<DetachableUnit> detachable_units(const MoleculeGraph &g) {
  std::vector<DetachableUnit> out;
  const std::size_t n = g.atom_count();
  for (int bond = 0; bond < static_cast<int>(g.bond_count()); ++bond) {
    std::vector<char> reached(n, 0);
    std::vector<int> stack{g.root()};
    reached[static_cast<std::size_t>(g.root())] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int b = 0; b < static_cast<int>(g.bond_count()); ++b) {
        if (b == bond || !g.bond(b).touches(u))
          continue;
        const int v = g.bond(b).other(u);
        if (!reached[static_cast<std::size_t>(v)]) {
          reached[static_cast<std::size_t>(v)] = 1;
          stack.push_back(v);
        }
      }
    }
    const auto &bd = g.bond(bond);
    if (reached[static_cast<std::size_t>(bd.a)] == reached[static_cast<std::size_t>(bd.b)])
      continue;  // ring bond
    DetachableUnit unit;
    unit.bond = bond;
    unit.anchor = reached[static_cast<std::size_t>(bd.a)] ? bd.a : bd.b;
    for (std::size_t i = 0; i < n; ++i)
      if (!reached[i])
        unit.atoms.push_back(static_cast<int>(i));
    out.push_back(std::move(unit));
  }
  return out;
}

namespace {

// Host minus its unit, with the donor's unit hung from the host anchor.
MoleculeGraph graft(const MoleculeGraph &host, const DetachableUnit &host_unit,
                    const MoleculeGraph &donor, const DetachableUnit &donor_unit) {
  const int order = host.bond(host_unit.bond).order;
  std::vector<int> host_map(host.atom_count(), -1), donor_map(donor.atom_count(), -1);
  std::vector<char> in_unit(host.atom_count(), 0);
  for (int a : host_unit.atoms)
    in_unit[static_cast<std::size_t>(a)] = 1;

  MoleculeGraph out;
  for (int i = 0; i < static_cast<int>(host.atom_count()); ++i)
    if (!in_unit[static_cast<std::size_t>(i)])
      host_map[static_cast<std::size_t>(i)] = out.add_atom(host.atom(i));
  for (int a : donor_unit.atoms)
    donor_map[static_cast<std::size_t>(a)] = out.add_atom(donor.atom(a));
  for (const auto &b : host.bonds()) {
    const int x = host_map[static_cast<std::size_t>(b.a)];
    const int y = host_map[static_cast<std::size_t>(b.b)];
    if (x >= 0 && y >= 0)
      out.add_bond(x, y, b.order);
  }
  for (const auto &b : donor.bonds()) {
    const int x = donor_map[static_cast<std::size_t>(b.a)];
    const int y = donor_map[static_cast<std::size_t>(b.b)];
    if (x >= 0 && y >= 0)
      out.add_bond(x, y, b.order);
  }
  const int donor_head = donor.bond(donor_unit.bond).other(donor_unit.anchor);
  out.add_bond(host_map[static_cast<std::size_t>(host_unit.anchor)],
               donor_map[static_cast<std::size_t>(donor_head)], order);
  out.set_root(host_map[static_cast<std::size_t>(host.root())]);
  return out;
}

ValidityRules completeness_required(ValidityRules rules) {
  rules.require_complete = true;
  return rules;
}

Chromosome rebuild(const ElementTable &table, const Chromosome &base,
                   const MoleculeGraph &graph) {
  Chromosome c = base;
  c.genome = exsmiles::serialize(graph);
  c.graph = exsmiles::parse(table, c.genome);
  return c;
}

} // namespace

std::pair<MoleculeGraph, MoleculeGraph> exchange_units(const MoleculeGraph &a,
                                                       const DetachableUnit &a_unit,
                                                       const MoleculeGraph &b,
                                                       const DetachableUnit &b_unit) {
  if (a.bond(a_unit.bond).order != b.bond(b_unit.bond).order)
    throw Error(ErrorCode::kInvalidArgument, "attachment bond orders differ");
  return {graft(a, a_unit, b, b_unit), graft(b, b_unit, a, a_unit)};
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome &a, const Chromosome &b,
                                            const GenSpec &spec,
                                            const EvolveParams &params,
                                            ChromosomeId &next_id, Rng &rng) {
  const ValidityRules rules = completeness_required(spec.rules);
  const auto a_units = detachable_units(a.graph);
  const auto b_units = detachable_units(b.graph);

  auto child = [&](const Chromosome &base, const MoleculeGraph *graph,
                   const char *log) {
    Chromosome c = graph ? rebuild(spec.table, base, *graph) : base;
    c.id = next_id++;
    c.parent_ids = {a.id, b.id};
    c.op_log = {log};
    c.user_score.reset();
    return c;
  };

  for (int attempt = 0; attempt < params.max_op_attempts && !a_units.empty(); ++attempt) {
    const auto &ua = a_units[rng.index(a_units.size())];
    const int order = a.graph.bond(ua.bond).order;
    std::vector<const DetachableUnit *> matches;
    for (const auto &ub : b_units)
      if (b.graph.bond(ub.bond).order == order)
        matches.push_back(&ub);
    if (matches.empty())
      continue;
    const auto &ub = *matches[rng.index(matches.size())];
    auto [first, second] = exchange_units(a.graph, ua, b.graph, ub);
    if (!validate(spec.table, rules, first).valid() ||
        !validate(spec.table, rules, second).valid())
      continue;
    auto c1 = child(a, &first, "crossover");
    auto c2 = child(b, &second, "crossover");
    return {std::move(c1), std::move(c2)};
  }
  auto c1 = child(a, nullptr, "crossover-failed");
  auto c2 = child(b, nullptr, "crossover-failed");
  return {std::move(c1), std::move(c2)};
}

// --- mutation edits --------------------------------------------------------

namespace edits {

std::optional<MoleculeGraph> insert_unit(const MoleculeGraph &g, int bond,
                                         const MoleculeGraph &unit, int p, int q) {
  const Bond b = g.bond(bond);
  const int k = b.order;
  if (k > 2)
    return std::nullopt;
  if (p == q ? unit.free_valence(p) < 2 * k
             : unit.free_valence(p) < k || unit.free_valence(q) < k)
    return std::nullopt;
  MoleculeGraph out = g;
  out.remove_bond(bond);
  const int offset = out.append(unit);
  out.add_bond(b.a, offset + p, k);
  out.add_bond(offset + q, b.b, k);
  out.cap_with_hydrogens();
  return out;
}

std::optional<MoleculeGraph> replace_h(const MoleculeGraph &g, int atom,
                                       const MoleculeGraph &unit, int unit_site) {
  if (g.atom(atom).h_count < 1 || unit.free_valence(unit_site) < 1)
    return std::nullopt;
  MoleculeGraph out = g;
  out.set_h_count(atom, g.atom(atom).h_count - 1);
  attach_unit(out, atom, unit, unit_site, 1);
  out.cap_with_hydrogens();
  return out;
}

std::optional<MoleculeGraph> remove_atom(const MoleculeGraph &g, int atom) {
  if (g.atom_count() < 2)
    return std::nullopt;
  MoleculeGraph out = g;
  out.remove_atom(atom);
  out.cap_with_hydrogens();
  return out;
}

std::optional<MoleculeGraph> remove_bond_and_atom(const MoleculeGraph &g, int atom) {
  const auto bonds = g.incident_bonds(atom);
  if (bonds.size() != 2)
    return std::nullopt;
  const Bond b1 = g.bond(bonds[0]), b2 = g.bond(bonds[1]);
  if (b1.order != b2.order)
    return std::nullopt;
  const int u = b1.other(atom), v = b2.other(atom);
  if (g.find_bond(u, v) >= 0)
    return std::nullopt;
  MoleculeGraph out = g;
  out.remove_atom(atom);
  auto shifted = [atom](int i) { return i > atom ? i - 1 : i; };
  out.add_bond(shifted(u), shifted(v), b1.order);
  out.cap_with_hydrogens();
  return out;
}

std::optional<MoleculeGraph> change_atom_to_fragment(const MoleculeGraph &g, int atom,
                                                     const MoleculeGraph &fragment,
                                                     int site) {
  const auto bonds = g.incident_bonds(atom);
  if (bonds.size() != 1 || g.atom_count() < 2)
    return std::nullopt;
  const Bond b = g.bond(bonds[0]);
  if (fragment.free_valence(site) < b.order)
    return std::nullopt;
  const int u = b.other(atom);
  MoleculeGraph out = g;
  out.remove_atom(atom);
  attach_unit(out, u > atom ? u - 1 : u, fragment, site, b.order);
  out.cap_with_hydrogens();
  return out;
}

std::optional<MoleculeGraph> switch_atom(const MoleculeGraph &g, int atom,
                                         const ElementTable &table,
                                         std::string_view element) {
  if (g.atom(atom).element == element || element == "H" || !table.contains(element) ||
      table.valence(element) < g.bond_order_sum(atom))
    return std::nullopt;
  MoleculeGraph out = g;
  out.set_h_count(atom, 0);
  out.set_element(table, atom, element);
  out.cap_with_hydrogens();
  return out;
}

std::optional<MoleculeGraph> increase_bond(const MoleculeGraph &g, int bond) {
  const Bond b = g.bond(bond);
  if (b.order != 1 || g.atom(b.a).h_count < 1 || g.atom(b.b).h_count < 1)
    return std::nullopt;
  MoleculeGraph out = g;
  out.set_h_count(b.a, g.atom(b.a).h_count - 1);
  out.set_h_count(b.b, g.atom(b.b).h_count - 1);
  out.set_bond_order(bond, 2);
  return out;
}

std::optional<MoleculeGraph> decrease_bond(const MoleculeGraph &g, int bond) {
  const Bond b = g.bond(bond);
  if (b.order < 2)
    return std::nullopt;
  MoleculeGraph out = g;
  out.set_bond_order(bond, b.order - 1);
  out.set_h_count(b.a, g.atom(b.a).h_count + 1);
  out.set_h_count(b.b, g.atom(b.b).h_count + 1);
  return out;
}

std::optional<MoleculeGraph> cut_ring(const MoleculeGraph &g, int bond) {
  MoleculeGraph out = g;
  out.remove_bond(bond);
  if (!out.is_connected())
    return std::nullopt;  // not a ring bond
  out.cap_with_hydrogens();
  return out;
}

std::optional<MoleculeGraph> add_ring(const MoleculeGraph &g, int a, int b) {
  if (a == b || g.degree(a) != 1 || g.degree(b) != 1 || g.find_bond(a, b) >= 0 ||
      g.atom(a).h_count < 1 || g.atom(b).h_count < 1)
    return std::nullopt;
  MoleculeGraph out = g;
  out.set_h_count(a, g.atom(a).h_count - 1);
  out.set_h_count(b, g.atom(b).h_count - 1);
  out.add_bond(a, b, 1);
  return out;
}

} // namespace edits

// --- mutation driver -------------------------------------------------------

namespace {

class Mutator {
public:
  Mutator(const GenSpec &spec, Rng &rng)
      : spec_(spec), rng_(rng), rules_(completeness_required(spec.rules)) {
    for (const auto &e : spec.table.heavy_elements()) {
      MoleculeGraph unit;
      unit.add_atom(spec.table, e, 0);
      atoms_.push_back(std::move(unit));
    }
  }

  std::optional<MoleculeGraph> run(MutationOp op, const MoleculeGraph &g) {
    switch (op) {
    case MutationOp::kInsertAtom: return insert_atom(g);
    case MutationOp::kReplaceH: return replace_h(g);
    case MutationOp::kRemoveAtom:
      return over_sites(atom_sites(g), [&](int a) { return edits::remove_atom(g, a); });
    case MutationOp::kRemoveBondAndAtom:
      return over_sites(atom_sites(g),
                        [&](int a) { return edits::remove_bond_and_atom(g, a); });
    case MutationOp::kChangeAtomToFragment: return change_to_fragment(g);
    case MutationOp::kSwitchAtom: return switch_atom(g);
    case MutationOp::kIncreaseBond:
      return over_sites(bond_sites(g), [&](int b) { return edits::increase_bond(g, b); });
    case MutationOp::kDecreaseBond:
      return over_sites(bond_sites(g), [&](int b) { return edits::decrease_bond(g, b); });
    case MutationOp::kCutRing:
      return over_sites(exsmiles::ring_closure_bonds(g),
                        [&](int b) { return edits::cut_ring(g, b); });
    case MutationOp::kAddRing: return add_ring(g);
    }
    return std::nullopt;
  }

private:
  static std::vector<int> atom_sites(const MoleculeGraph &g) {
    std::vector<int> s(g.atom_count());
    std::iota(s.begin(), s.end(), 0);
    return s;
  }

  static std::vector<int> bond_sites(const MoleculeGraph &g) {
    std::vector<int> s(g.bond_count());
    std::iota(s.begin(), s.end(), 0);
    return s;
  }

  bool valid(const MoleculeGraph &g) const {
    return validate(spec_.table, rules_, g).valid();
  }

  // Tries sites in random order; first edit that applies and validates wins.
  template <typename Site, typename Edit>
  std::optional<MoleculeGraph> over_sites(std::vector<Site> sites, Edit edit) {
    rng_.shuffle(sites);
    for (const auto &site : sites) {
      if (auto out = edit(site); out && valid(*out))
        return out;
    }
    return std::nullopt;
  }

  // Random unit satisfying `feasible`, drawing from lone atoms or fragments
  // per atom_vs_fragment_pct (falling back to the other pool when one has no
  // feasible member).
  template <typename Pred> const MoleculeGraph *pick_unit(Pred feasible) {
    std::vector<const MoleculeGraph *> atoms, fragments;
    for (const auto &u : atoms_)
      if (feasible(u))
        atoms.push_back(&u);
    for (const auto &f : spec_.fragments)
      if (feasible(f.graph))
        fragments.push_back(&f.graph);
    if (atoms.empty() && fragments.empty())
      return nullptr;
    const bool use_atom = fragments.empty() ||
                          (!atoms.empty() && rng_.chance(spec_.atom_vs_fragment_pct));
    const auto &pool = use_atom ? atoms : fragments;
    return pool[rng_.index(pool.size())];
  }

  std::optional<MoleculeGraph> insert_atom(const MoleculeGraph &g) {
    std::vector<int> sites;
    for (int b = 0; b < static_cast<int>(g.bond_count()); ++b)
      if (g.bond(b).order <= 2)
        sites.push_back(b);
    return over_sites(sites, [&](int bond) -> std::optional<MoleculeGraph> {
      const int k = g.bond(bond).order;
      auto pairs = [k](const MoleculeGraph &u) {
        std::vector<std::pair<int, int>> out;
        const int n = static_cast<int>(u.atom_count());
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q)
            if (p == q ? u.free_valence(p) >= 2 * k
                       : u.free_valence(p) >= k && u.free_valence(q) >= k)
              out.emplace_back(p, q);
        return out;
      };
      const MoleculeGraph *unit =
          pick_unit([&](const MoleculeGraph &u) { return !pairs(u).empty(); });
      if (!unit)
        return std::nullopt;
      const auto options = pairs(*unit);
      const auto [p, q] = options[rng_.index(options.size())];
      return edits::insert_unit(g, bond, *unit, p, q);
    });
  }

  std::optional<MoleculeGraph> replace_h(const MoleculeGraph &g) {
    std::vector<int> sites;
    for (int a = 0; a < static_cast<int>(g.atom_count()); ++a)
      if (g.atom(a).h_count > 0)
        sites.push_back(a);
    return over_sites(sites, [&](int atom) -> std::optional<MoleculeGraph> {
      const MoleculeGraph *unit =
          pick_unit([](const MoleculeGraph &u) { return !open_sites(u).empty(); });
      if (!unit)
        return std::nullopt;
      const auto open = open_sites(*unit);
      return edits::replace_h(g, atom, *unit, open[rng_.index(open.size())].atom);
    });
  }

  std::optional<MoleculeGraph> change_to_fragment(const MoleculeGraph &g) {
    if (spec_.fragments.empty())
      return std::nullopt;
    std::vector<int> sites;
    for (int a = 0; a < static_cast<int>(g.atom_count()); ++a)
      if (g.degree(a) == 1)
        sites.push_back(a);
    return over_sites(sites, [&](int atom) -> std::optional<MoleculeGraph> {
      const int k = g.bond(g.incident_bonds(atom).front()).order;
      std::vector<std::pair<const Fragment *, int>> options;
      for (const auto &f : spec_.fragments)
        for (const auto &s : f.open_sites)
          if (s.free_valence >= k)
            options.emplace_back(&f, s.atom);
      if (options.empty())
        return std::nullopt;
      const auto [frag, site] = options[rng_.index(options.size())];
      return edits::change_atom_to_fragment(g, atom, frag->graph, site);
    });
  }

  std::optional<MoleculeGraph> switch_atom(const MoleculeGraph &g) {
    const auto elements = spec_.table.heavy_elements();
    return over_sites(atom_sites(g), [&](int atom) -> std::optional<MoleculeGraph> {
      std::vector<std::string> options;
      for (const auto &e : elements)
        if (e != g.atom(atom).element &&
            spec_.table.valence(e) >= g.bond_order_sum(atom))
          options.push_back(e);
      if (options.empty())
        return std::nullopt;
      return edits::switch_atom(g, atom, spec_.table, options[rng_.index(options.size())]);
    });
  }

  std::optional<MoleculeGraph> add_ring(const MoleculeGraph &g) {
    std::vector<std::pair<int, int>> sites;
    const int n = static_cast<int>(g.atom_count());
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (g.degree(a) == 1 && g.degree(b) == 1 && g.atom(a).h_count > 0 &&
            g.atom(b).h_count > 0 && g.find_bond(a, b) < 0)
          sites.emplace_back(a, b);
    return over_sites(sites, [&](std::pair<int, int> s) {
      return edits::add_ring(g, s.first, s.second);
    });
  }

  const GenSpec &spec_;
  Rng &rng_;
  ValidityRules rules_;
  std::vector<MoleculeGraph> atoms_;
};

} // namespace

std::optional<MoleculeGraph> apply_mutation(MutationOp op, const MoleculeGraph &g,
                                            const GenSpec &spec, Rng &rng) {
  return Mutator(spec, rng).run(op, g);
}

Chromosome mutate(const Chromosome &c, const GenSpec &spec, const EvolveParams &params,
                  Rng &rng) {
  if (!rng.chance(params.mutation_rate_pct))
    return c;
  std::vector<MutationOp> order(kAllMutationOps.begin(), kAllMutationOps.end());
  rng.shuffle(order);
  Mutator mutator(spec, rng);
  for (MutationOp op : order) {
    if (auto g = mutator.run(op, c.graph)) {
      Chromosome out = rebuild(spec.table, c, *g);
      out.op_log.emplace_back(to_string(op));
      return out;
    }
  }
  Chromosome out = c;
  out.op_log.emplace_back("mutation-exhausted");
  return out;
}

// --- generation step -------------------------------------------------------

Population step_generation(const Population &pop, const EvolveParams &params,
                           const FitnessFn &fitness, const SimilarityFn &similarity,
                           const GenSpec &spec, Rng &rng) {
  if (pop.members.size() < 2)
    throw Error(ErrorCode::kPopulationTooSmall, "a generation needs at least two members");
  Population next;
  next.generation = pop.generation + 1;
  next.next_id = pop.next_id;
  const auto size = static_cast<std::size_t>(params.population_size);

  const auto ranked = fitness_order(pop);
  const auto elites = std::min<std::size_t>(static_cast<std::size_t>(params.elitism),
                                            std::min(size, ranked.size()));
  for (std::size_t i = 0; i < elites; ++i) {
    Chromosome c = pop.members[ranked[i]];
    c.parent_ids = {c.id};
    c.id = next.allocate_id();
    c.op_log = {"elite"};
    c.user_score.reset();
    next.members.push_back(std::move(c));
  }

  std::size_t cursor = 0;
  while (next.members.size() < size) {
    const ParentPair parents = select_parents(pop, params, similarity, cursor++, rng);
    const Chromosome &a = pop.members[parents.first];
    const Chromosome &b = pop.members[parents.second];
    std::pair<Chromosome, Chromosome> children;
    if (rng.chance(params.crossover_rate_pct)) {
      children = crossover(a, b, spec, params, next.next_id, rng);
    } else {
      children = {a, b};
      children.first.parent_ids = {a.id};
      children.second.parent_ids = {b.id};
      for (auto *c : {&children.first, &children.second}) {
        c->id = next.allocate_id();
        c->op_log = {"copy"};
        c->user_score.reset();
      }
    }
    for (auto *c : {&children.first, &children.second}) {
      if (next.members.size() == size)
        break;
      Chromosome child = mutate(*c, spec, params, rng);
      child.fitness = fitness(child.graph);
      next.members.push_back(std::move(child));
    }
  }
  return next;
}

} // namespace molforge
